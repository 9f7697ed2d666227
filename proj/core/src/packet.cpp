#include "dbbsim/packet.hpp"

#include <cmath>
#include <numbers>

namespace dbb {

// The expression layout here matters: evaluating the mirrored packet
// (-xi0, -u) at -xi must produce exactly {value, -d1, d2}, which holds
// because IEEE rounding commutes with negation for every operation used.

PacketAxisBasis make_axis_basis(double center, double sigma0, double velocity,
                                const PhysicalConstants& c, double t)
{
    const std::complex<double> s_t = spread_parameter(sigma0, c, t);
    PacketAxisBasis b;
    b.drifted_center = center + velocity * t;
    b.momentum = c.mass * velocity / c.hbar;
    b.half_ut = 0.5 * velocity * t;
    b.prefactor = std::pow(2.0 * std::numbers::pi * s_t * s_t, -0.25);
    b.half_inv_width = 1.0 / (2.0 * sigma0 * s_t);
    b.quarter_inv_width = 0.5 * b.half_inv_width;
    return b;
}

std::complex<double> PacketAxisBasis::value(double xi) const
{
    const double dxi = xi - drifted_center;
    const std::complex<double> exponent
        = -(dxi * dxi) * quarter_inv_width
          + std::complex<double>(0.0, momentum * (xi - half_ut));
    return prefactor * std::exp(exponent);
}

void PacketAxisBasis::eval(double xi, std::complex<double>& v, std::complex<double>& d1,
                           std::complex<double>& d2) const
{
    const double dxi = xi - drifted_center;
    const std::complex<double> exponent
        = -(dxi * dxi) * quarter_inv_width
          + std::complex<double>(0.0, momentum * (xi - half_ut));
    v = prefactor * std::exp(exponent);
    // log-derivatives: g1 = d/dxi log psi, g2 = d/dxi g1
    const std::complex<double> g1
        = -dxi * half_inv_width + std::complex<double>(0.0, momentum);
    const std::complex<double> g2 = -half_inv_width;
    d1 = g1 * v;
    d2 = (g2 + g1 * g1) * v;
}

PacketParams mirrored_in_x(const PacketParams& p)
{
    PacketParams m = p;
    m.center_x = -p.center_x;
    m.velocity_x = -p.velocity_x;
    return m;
}

std::complex<double> spread_parameter(double sigma0, const PhysicalConstants& c, double t)
{
    return sigma0 * std::complex<double>(1.0, c.hbar * t / (2.0 * c.mass * sigma0 * sigma0));
}

double packet_width(double sigma0, const PhysicalConstants& c, double t)
{
    return std::abs(spread_parameter(sigma0, c, t));
}

std::complex<double> packet_axis_value(double center, double sigma0, double velocity,
                                       const PhysicalConstants& c, double xi, double t)
{
    return make_axis_basis(center, sigma0, velocity, c, t).value(xi);
}

std::complex<double> gaussian_packet_value(const PacketParams& p, const PhysicalConstants& c,
                                           double x, double y, double t)
{
    return make_axis_basis(p.center_x, p.sigma_x, p.velocity_x, c, t).value(x)
           * make_axis_basis(p.center_y, p.sigma_y, p.velocity_y, c, t).value(y);
}

PacketEval evaluate_packet(const PacketParams& p, const PhysicalConstants& c,
                           double x, double y, double t)
{
    const PacketAxisBasis bx = make_axis_basis(p.center_x, p.sigma_x, p.velocity_x, c, t);
    const PacketAxisBasis by = make_axis_basis(p.center_y, p.sigma_y, p.velocity_y, c, t);
    std::complex<double> fx, fx1, fx2, fy, fy1, fy2;
    bx.eval(x, fx, fx1, fx2);
    by.eval(y, fy, fy1, fy2);
    PacketEval e;
    e.value = fx * fy;
    e.dx = fx1 * fy;
    e.dy = fx * fy1;
    e.dxx = fx2 * fy;
    e.dyy = fx * fy2;
    return e;
}

double packet_peak_modulus(const PacketParams& p, const PhysicalConstants& c, double t)
{
    const double sx = packet_width(p.sigma_x, c, t);
    const double sy = packet_width(p.sigma_y, c, t);
    return std::pow(2.0 * std::numbers::pi * sx * sx, -0.25)
           * std::pow(2.0 * std::numbers::pi * sy * sy, -0.25);
}

}  // namespace dbb
