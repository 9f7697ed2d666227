#include "dbbsim/wavefunction.hpp"

#include <cmath>
#include <numbers>

#include "dbbsim/errors.hpp"
#include "dbbsim/quadrature.hpp"

namespace dbb {

namespace {

// <f_a|f_b> for one axis pair at t = 0 by adaptive quadrature. The packets are
// axis products, so the full 2D overlap factorizes exactly.
std::complex<double> axis_overlap(double center_a, double sigma_a, double vel_a,
                                  double center_b, double sigma_b, double vel_b,
                                  const PhysicalConstants& c)
{
    const double span = 12.0 * std::max(sigma_a, sigma_b);
    const Interval domain[] = {{std::min(center_a, center_b) - span,
                                std::max(center_a, center_b) + span}};
    auto kernel = [&](double x) {
        return std::conj(packet_axis_value(center_a, sigma_a, vel_a, c, x, 0.0))
               * packet_axis_value(center_b, sigma_b, vel_b, c, x, 0.0);
    };
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    const double re = try_integrate(
        [&](std::span<const double> x) { return std::real(kernel(x[0])); }, domain, opt).value;
    const double im = try_integrate(
        [&](std::span<const double> x) { return std::imag(kernel(x[0])); }, domain, opt).value;
    return {re, im};
}

struct Packet2D {
    std::complex<double> value, dx, dy, dxx, dyy;
};

Packet2D packet2d(const PacketAxisBasis& bx, const PacketAxisBasis& by, double x, double y)
{
    std::complex<double> fx, fx1, fx2, fy, fy1, fy2;
    bx.eval(x, fx, fx1, fx2);
    by.eval(y, fy, fy1, fy2);
    return {fx * fy, fx1 * fy, fx * fy1, fx2 * fy, fx * fy2};
}

}  // namespace

TwoParticleWaveFunction::TwoParticleWaveFunction(PacketParams packet_a, PacketParams packet_b,
                                                 PhysicalConstants constants, StatisticsMode mode)
    : packet_a_(packet_a), packet_b_(packet_b), constants_(constants), mode_(mode)
{
    const std::complex<double> ox
        = axis_overlap(packet_a_.center_x, packet_a_.sigma_x, packet_a_.velocity_x,
                       packet_b_.center_x, packet_b_.sigma_x, packet_b_.velocity_x, constants_);
    const std::complex<double> oy
        = axis_overlap(packet_a_.center_y, packet_a_.sigma_y, packet_a_.velocity_y,
                       packet_b_.center_y, packet_b_.sigma_y, packet_b_.velocity_y, constants_);
    overlap_ = ox * oy;

    switch (mode_) {
        case StatisticsMode::Bosonic:
            normalization_ = std::sqrt(2.0 * (1.0 + std::norm(overlap_)));
            break;
        case StatisticsMode::MaxwellBoltzmann:
            normalization_ = 1.0;
            break;
        case StatisticsMode::SingleParticle:
            normalization_ = std::sqrt(2.0 * (1.0 + std::real(overlap_)));
            break;
    }
}

TwoParticleWaveFunction TwoParticleWaveFunction::from_geometry(const SlitGeometry& geometry,
                                                               double sigma_x, double sigma_y,
                                                               PhysicalConstants constants,
                                                               StatisticsMode mode)
{
    const PacketParams a = geometry.packet_a(sigma_x, sigma_y);
    return TwoParticleWaveFunction(a, mirrored_in_x(a), constants, mode);
}

WavefunctionSnapshot TwoParticleWaveFunction::at_time(double t) const
{
    WavefunctionSnapshot s;
    s.ax_ = make_axis_basis(packet_a_.center_x, packet_a_.sigma_x, packet_a_.velocity_x,
                            constants_, t);
    s.ay_ = make_axis_basis(packet_a_.center_y, packet_a_.sigma_y, packet_a_.velocity_y,
                            constants_, t);
    s.bx_ = make_axis_basis(packet_b_.center_x, packet_b_.sigma_x, packet_b_.velocity_x,
                            constants_, t);
    s.by_ = make_axis_basis(packet_b_.center_y, packet_b_.sigma_y, packet_b_.velocity_y,
                            constants_, t);
    s.mode_ = mode_;
    s.inv_norm_ = 1.0 / normalization_;
    s.t_ = t;
    s.amplitude_scale_ = amplitude_scale(t);
    return s;
}

std::complex<double> WavefunctionSnapshot::value(double x1, double y1, double x2,
                                                 double y2) const
{
    switch (mode_) {
        case StatisticsMode::Bosonic: {
            const std::complex<double> a1 = ax_.value(x1) * ay_.value(y1);
            const std::complex<double> b2 = bx_.value(x2) * by_.value(y2);
            const std::complex<double> a2 = ax_.value(x2) * ay_.value(y2);
            const std::complex<double> b1 = bx_.value(x1) * by_.value(y1);
            return (a1 * b2 + a2 * b1) * inv_norm_;
        }
        case StatisticsMode::MaxwellBoltzmann:
            return ax_.value(x1) * ay_.value(y1) * (bx_.value(x2) * by_.value(y2));
        case StatisticsMode::SingleParticle:
            return (ax_.value(x1) * ay_.value(y1) + bx_.value(x1) * by_.value(y1)) * inv_norm_;
    }
    return {};
}

double WavefunctionSnapshot::density(double x1, double y1, double x2, double y2) const
{
    return std::norm(value(x1, y1, x2, y2));
}

WavefunctionEval WavefunctionSnapshot::evaluate(double x1, double y1, double x2, double y2) const
{
    WavefunctionEval e;
    switch (mode_) {
        case StatisticsMode::Bosonic: {
            const Packet2D a1 = packet2d(ax_, ay_, x1, y1);
            const Packet2D b1 = packet2d(bx_, by_, x1, y1);
            const Packet2D a2 = packet2d(ax_, ay_, x2, y2);
            const Packet2D b2 = packet2d(bx_, by_, x2, y2);
            // term order is fixed so that particle exchange permutes the same
            // floating-point products; symmetry identities then hold bitwise
            e.value = (a1.value * b2.value + a2.value * b1.value) * inv_norm_;
            e.grad[0] = (a1.dx * b2.value + b1.dx * a2.value) * inv_norm_;
            e.grad[1] = (a1.dy * b2.value + b1.dy * a2.value) * inv_norm_;
            e.grad[2] = (a2.dx * b1.value + b2.dx * a1.value) * inv_norm_;
            e.grad[3] = (a2.dy * b1.value + b2.dy * a1.value) * inv_norm_;
            e.second[0] = (a1.dxx * b2.value + b1.dxx * a2.value) * inv_norm_;
            e.second[1] = (a1.dyy * b2.value + b1.dyy * a2.value) * inv_norm_;
            e.second[2] = (a2.dxx * b1.value + b2.dxx * a1.value) * inv_norm_;
            e.second[3] = (a2.dyy * b1.value + b2.dyy * a1.value) * inv_norm_;
            return e;
        }
        case StatisticsMode::MaxwellBoltzmann: {
            const Packet2D a1 = packet2d(ax_, ay_, x1, y1);
            const Packet2D b2 = packet2d(bx_, by_, x2, y2);
            e.value = a1.value * b2.value;
            e.grad[0] = a1.dx * b2.value;
            e.grad[1] = a1.dy * b2.value;
            e.grad[2] = a1.value * b2.dx;
            e.grad[3] = a1.value * b2.dy;
            e.second[0] = a1.dxx * b2.value;
            e.second[1] = a1.dyy * b2.value;
            e.second[2] = a1.value * b2.dxx;
            e.second[3] = a1.value * b2.dyy;
            return e;
        }
        case StatisticsMode::SingleParticle: {
            const Packet2D a1 = packet2d(ax_, ay_, x1, y1);
            const Packet2D b1 = packet2d(bx_, by_, x1, y1);
            e.value = (a1.value + b1.value) * inv_norm_;
            e.grad[0] = (a1.dx + b1.dx) * inv_norm_;
            e.grad[1] = (a1.dy + b1.dy) * inv_norm_;
            e.grad[2] = 0.0;
            e.grad[3] = 0.0;
            e.second[0] = (a1.dxx + b1.dxx) * inv_norm_;
            e.second[1] = (a1.dyy + b1.dyy) * inv_norm_;
            e.second[2] = 0.0;
            e.second[3] = 0.0;
            return e;
        }
    }
    return e;
}

std::complex<double> TwoParticleWaveFunction::value(const ConfigurationPoint& q) const
{
    return at_time(q.t).value(q.x1, q.y1, q.x2, q.y2);
}

WavefunctionEval TwoParticleWaveFunction::evaluate(const ConfigurationPoint& q) const
{
    return at_time(q.t).evaluate(q.x1, q.y1, q.x2, q.y2);
}

double TwoParticleWaveFunction::density(const ConfigurationPoint& q) const
{
    return std::norm(value(q));
}

double quantum_potential_from_eval(const WavefunctionEval& e, const PhysicalConstants& c)
{
    // lap R = sum_i [ |d_i Psi|^2 + Re(Psi* d_i^2 Psi) - (Re(Psi* d_i Psi)/R)^2 ] / R
    const double r = std::abs(e.value);
    const std::complex<double> conj_value = std::conj(e.value);
    double lap_r = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double grad_r = std::real(conj_value * e.grad[i]) / r;
        lap_r += std::norm(e.grad[i]) + std::real(conj_value * e.second[i]) - grad_r * grad_r;
    }
    lap_r /= r;
    return -c.hbar * c.hbar / (2.0 * c.mass) * lap_r / r;
}

double TwoParticleWaveFunction::quantum_potential(const ConfigurationPoint& q,
                                                  double node_epsilon) const
{
    const WavefunctionEval e = evaluate(q);
    const double r = std::abs(e.value);
    const double threshold = node_epsilon * amplitude_scale(q.t);
    if (!(r > threshold)) {
        throw NodeProximityError(r, threshold);
    }
    return quantum_potential_from_eval(e, constants_);
}

double TwoParticleWaveFunction::amplitude_scale(double t) const
{
    const double peak_a = packet_peak_modulus(packet_a_, constants_, t);
    const double peak_b = packet_peak_modulus(packet_b_, constants_, t);
    switch (mode_) {
        case StatisticsMode::Bosonic:
            return 2.0 * peak_a * peak_b / normalization_;
        case StatisticsMode::MaxwellBoltzmann:
            return peak_a * peak_b;
        case StatisticsMode::SingleParticle:
            return (peak_a + peak_b) / normalization_;
    }
    return 0.0;
}

std::array<std::complex<double>, 2> wavefunction_gradient(const TwoParticleWaveFunction& w,
                                                          const ConfigurationPoint& q,
                                                          int particle_index)
{
    const WavefunctionEval e = w.evaluate(q);
    if (particle_index == 1) return {e.grad[0], e.grad[1]};
    return {e.grad[2], e.grad[3]};
}

}  // namespace dbb
