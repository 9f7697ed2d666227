#include "dbbsim/sampling.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "dbbsim/errors.hpp"
#include "dbbsim/packet.hpp"
#include "dbbsim/random.hpp"

namespace dbb {

namespace {

constexpr double kSafetyFactor = 1.5;

struct AxisNormal {
    double mu = 0.0;
    double sigma = 1.0;

    double pdf(double x) const
    {
        const double z = (x - mu) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }
};

// |f(xi,t)|^2 of a packet axis factor is exactly the normal density with the
// drifted center and spread width.
AxisNormal modulus_axis(double center, double sigma0, double velocity,
                        const PhysicalConstants& c, double t)
{
    return {center + velocity * t, packet_width(sigma0, c, t)};
}

// Product of two normal densities as (mass) x (normal density).
struct ScaledNormal {
    double mass = 1.0;
    AxisNormal n;
};

ScaledNormal product(const AxisNormal& a, const AxisNormal& b)
{
    const double var_sum = a.sigma * a.sigma + b.sigma * b.sigma;
    const double diff = a.mu - b.mu;
    ScaledNormal out;
    out.mass = std::exp(-0.5 * diff * diff / var_sum)
               / std::sqrt(2.0 * std::numbers::pi * var_sum);
    const double inv_var = 1.0 / (a.sigma * a.sigma) + 1.0 / (b.sigma * b.sigma);
    out.n.sigma = std::sqrt(1.0 / inv_var);
    out.n.mu = (a.mu / (a.sigma * a.sigma) + b.mu / (b.sigma * b.sigma)) / inv_var;
    return out;
}

AxisNormal reflected(const AxisNormal& a) { return {-a.mu, a.sigma}; }

struct MixtureComponent {
    double mass = 1.0;
    std::vector<AxisNormal> axes;
};

// Rejection sampler from density(coords) with envelope
//   env = kSafetyFactor * prefactor * sum_i mass_i * prod_j pdf_ij.
// `assemble` turns a coordinate vector into a ConfigurationPoint.
template <typename DensityFn, typename AssembleFn>
std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
rejection_sample(const std::vector<MixtureComponent>& mixture, double prefactor,
                 const DensityFn& density, const AssembleFn& assemble, std::size_t n,
                 std::uint64_t seed)
{
    RandomStream rng(seed);
    std::vector<ConfigurationPoint> points;
    points.reserve(n);
    SamplerDiagnostics diag;

    double total_mass = 0.0;
    for (const auto& comp : mixture) total_mass += comp.mass;

    const std::size_t dim = mixture.front().axes.size();
    std::vector<double> coords(dim);
    const std::size_t proposal_cap = 1000 * n + 100000;

    while (points.size() < n) {
        if (diag.proposals >= proposal_cap) {
            throw SimulationError("rejection sampler acceptance rate too low");
        }
        ++diag.proposals;

        // pick a mixture component proportional to mass
        double pick = rng.uniform() * total_mass;
        std::size_t ci = 0;
        for (; ci + 1 < mixture.size(); ++ci) {
            pick -= mixture[ci].mass;
            if (pick < 0.0) break;
        }
        const MixtureComponent& comp = mixture[ci];
        for (std::size_t j = 0; j < dim; ++j) {
            coords[j] = rng.normal(comp.axes[j].mu, comp.axes[j].sigma);
        }

        double envelope = 0.0;
        for (const auto& c : mixture) {
            double p = c.mass;
            for (std::size_t j = 0; j < dim; ++j) p *= c.axes[j].pdf(coords[j]);
            envelope += p;
        }
        envelope *= kSafetyFactor * prefactor;

        const double f = density(coords);
        diag.max_density_seen = std::max(diag.max_density_seen, f);
        if (f > envelope * (1.0 + 1e-12)) {
            throw EnvelopeViolationError(f, envelope);
        }
        if (rng.uniform() * envelope < f) {
            points.push_back(assemble(coords));
        }
    }
    diag.acceptance_rate = static_cast<double>(n) / static_cast<double>(diag.proposals);
    return {std::move(points), diag};
}

struct PacketAxes {
    AxisNormal ax, ay, bx, by;
};

PacketAxes packet_axes(const TwoParticleWaveFunction& w, double t0)
{
    const auto& pa = w.packet_a();
    const auto& pb = w.packet_b();
    const auto& c = w.constants();
    return {modulus_axis(pa.center_x, pa.sigma_x, pa.velocity_x, c, t0),
            modulus_axis(pa.center_y, pa.sigma_y, pa.velocity_y, c, t0),
            modulus_axis(pb.center_x, pb.sigma_x, pb.velocity_x, c, t0),
            modulus_axis(pb.center_y, pb.sigma_y, pb.velocity_y, c, t0)};
}

}  // namespace

std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_density(const TwoParticleWaveFunction& w, double t0, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw SimulationError("sample_density requires n >= 1");
    const PacketAxes ax = packet_axes(w, t0);

    std::vector<MixtureComponent> mixture;
    double prefactor = 1.0;
    switch (w.mode()) {
        case StatisticsMode::Bosonic: {
            const double n2 = w.normalization() * w.normalization();
            prefactor = 2.0 / n2;
            mixture.push_back({1.0, {ax.ax, ax.ay, ax.bx, ax.by}});
            mixture.push_back({1.0, {ax.bx, ax.by, ax.ax, ax.ay}});
            break;
        }
        case StatisticsMode::MaxwellBoltzmann:
            prefactor = 1.0;
            mixture.push_back({1.0, {ax.ax, ax.ay, ax.bx, ax.by}});
            break;
        case StatisticsMode::SingleParticle:
            throw SimulationError(
                "sample_density expects a two-particle mode; use sample_single_particle");
    }

    const WavefunctionSnapshot snap = w.at_time(t0);
    auto density = [&](const std::vector<double>& c) {
        return snap.density(c[0], c[1], c[2], c[3]);
    };
    auto assemble = [&](const std::vector<double>& c) {
        return ConfigurationPoint{c[0], c[1], c[2], c[3], t0};
    };
    return rejection_sample(mixture, prefactor, density, assemble, n, seed);
}

std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_antisymmetric_slice(const TwoParticleWaveFunction& w, double t0, std::size_t n,
                           std::uint64_t seed)
{
    if (n == 0) throw SimulationError("sample_antisymmetric_slice requires n >= 1");
    const PacketAxes ax = packet_axes(w, t0);
    const double n2 = w.normalization() * w.normalization();

    // On the slice (x, y, -x, y) each |packet product|^2 collapses to a
    // product of two 1D normal-density products.
    const ScaledNormal gx1 = product(ax.ax, reflected(ax.bx));  // A(x) B(-x)
    const ScaledNormal gx2 = product(reflected(ax.ax), ax.bx);  // A(-x) B(x)
    const ScaledNormal gy = product(ax.ay, ax.by);

    std::vector<MixtureComponent> mixture;
    mixture.push_back({gx1.mass * gy.mass, {gx1.n, gy.n}});
    mixture.push_back({gx2.mass * gy.mass, {gx2.n, gy.n}});

    const WavefunctionSnapshot snap = w.at_time(t0);
    auto density = [&](const std::vector<double>& c) {
        return snap.density(c[0], c[1], -c[0], c[1]);
    };
    auto assemble = [&](const std::vector<double>& c) {
        return ConfigurationPoint{c[0], c[1], -c[0], c[1], t0};
    };
    return rejection_sample(mixture, 2.0 / n2, density, assemble, n, seed);
}

std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_slice_independent_y(const TwoParticleWaveFunction& w, double t0, std::size_t n,
                           std::uint64_t seed)
{
    if (n == 0) throw SimulationError("sample_slice_independent_y requires n >= 1");
    const PacketAxes ax = packet_axes(w, t0);
    const double n2 = w.normalization() * w.normalization();

    const ScaledNormal gx1 = product(ax.ax, reflected(ax.bx));
    const ScaledNormal gx2 = product(reflected(ax.ax), ax.bx);

    std::vector<MixtureComponent> mixture;
    mixture.push_back({gx1.mass, {gx1.n, ax.ay, ax.by}});
    mixture.push_back({gx2.mass, {gx2.n, ax.by, ax.ay}});

    const WavefunctionSnapshot snap = w.at_time(t0);
    auto density = [&](const std::vector<double>& c) {
        return snap.density(c[0], c[1], -c[0], c[2]);
    };
    auto assemble = [&](const std::vector<double>& c) {
        return ConfigurationPoint{c[0], c[1], -c[0], c[2], t0};
    };
    return rejection_sample(mixture, 2.0 / n2, density, assemble, n, seed);
}

std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_single_particle(const TwoParticleWaveFunction& w, double t0, std::size_t n,
                       std::uint64_t seed)
{
    if (n == 0) throw SimulationError("sample_single_particle requires n >= 1");
    if (w.mode() != StatisticsMode::SingleParticle) {
        throw SimulationError("sample_single_particle requires SingleParticle mode");
    }
    const PacketAxes ax = packet_axes(w, t0);
    const double n2 = w.normalization() * w.normalization();

    std::vector<MixtureComponent> mixture;
    mixture.push_back({1.0, {ax.ax, ax.ay}});
    mixture.push_back({1.0, {ax.bx, ax.by}});

    const WavefunctionSnapshot snap = w.at_time(t0);
    auto density = [&](const std::vector<double>& c) {
        return snap.density(c[0], c[1], 0.0, 0.0);
    };
    auto assemble = [&](const std::vector<double>& c) {
        return ConfigurationPoint{c[0], c[1], 0.0, 0.0, t0};
    };
    return rejection_sample(mixture, 2.0 / n2, density, assemble, n, seed);
}

}  // namespace dbb
