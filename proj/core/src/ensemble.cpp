#include "dbbsim/ensemble.hpp"

#include <cmath>

#include "dbbsim/errors.hpp"

namespace dbb {

namespace {

// |Psi|^2 restricted to the slab |x1 + x2| <= width, by thinning the
// unconstrained sampler. Acceptance is roughly width / spread(x1 + x2), so
// this is only meant for moderate widths.
std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_slab(const TwoParticleWaveFunction& w, double width, std::size_t n, std::uint64_t seed)
{
    std::vector<ConfigurationPoint> points;
    points.reserve(n);
    SamplerDiagnostics diag;
    std::uint64_t stream = seed;
    std::size_t batches = 0;
    while (points.size() < n) {
        if (++batches > 1000) {
            throw SimulationError("slab-constrained sampling acceptance too low; "
                                  "increase constraint_width or use the exact slice");
        }
        auto [candidates, d] = sample_density(w, 0.0, n, stream++);
        diag.proposals += d.proposals;
        diag.max_density_seen = std::max(diag.max_density_seen, d.max_density_seen);
        for (const auto& q : candidates) {
            if (std::abs(q.x1 + q.x2) <= width) {
                points.push_back(q);
                if (points.size() == n) break;
            }
        }
    }
    diag.acceptance_rate = static_cast<double>(n) / static_cast<double>(diag.proposals);
    return {std::move(points), diag};
}

}  // namespace

std::vector<std::size_t> Ensemble::valid_indices() const
{
    std::vector<std::size_t> idx;
    idx.reserve(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        if (!trajectories[i].truncated()) idx.push_back(i);
    }
    return idx;
}

Ensemble build_ensemble(const TwoParticleWaveFunction& w, const EnsembleSpec& spec, double t_end,
                        const IntegratorConfig& cfg, std::span<const double> sample_times)
{
    if (spec.size == 0) throw SimulationError("ensemble size must be >= 1");
    if (!(t_end > 0.0)) throw SimulationError("ensemble propagation horizon must be positive");

    Ensemble out;
    out.spec = spec;
    out.end_time = t_end;

    switch (spec.kind) {
        case EnsembleKind::Gibbs: {
            auto [points, diag] = sample_density(w, 0.0, spec.size, spec.seed);
            out.initial_points = std::move(points);
            out.sampler_diagnostics = diag;
            break;
        }
        case EnsembleKind::TimeEnsemble: {
            if (spec.constraint_width > 0.0) {
                auto [points, diag] = sample_slab(w, spec.constraint_width, spec.size, spec.seed);
                out.initial_points = std::move(points);
                out.sampler_diagnostics = diag;
            } else if (spec.independent_y) {
                auto [points, diag]
                    = sample_slice_independent_y(w, 0.0, spec.size, spec.seed);
                out.initial_points = std::move(points);
                out.sampler_diagnostics = diag;
            } else {
                auto [points, diag] = sample_antisymmetric_slice(w, 0.0, spec.size, spec.seed);
                out.initial_points = std::move(points);
                out.sampler_diagnostics = diag;
            }
            break;
        }
    }

    out.trajectories = integrate_batch(w, out.initial_points, t_end, cfg, sample_times);
    for (const auto& traj : out.trajectories) {
        if (traj.truncated()) ++out.truncated_count;
    }
    // more than 1% truncation means the statistics are no longer trustworthy
    if (out.truncated_count * 100 > spec.size) {
        throw SimulationError("ensemble lost " + std::to_string(out.truncated_count) + " of "
                              + std::to_string(spec.size)
                              + " trajectories to node truncation (> 1%)");
    }
    return out;
}

}  // namespace dbb
