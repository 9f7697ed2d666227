#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dbbsim/dynamics.hpp"
#include "dbbsim/sampling.hpp"

namespace dbb {

enum class EnsembleKind {
    Gibbs,         // unconstrained |Psi|^2 pairs at a common time
    TimeEnsemble,  // sequence of single pairs, each constrained to x1+x2 = 0
};

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Gibbs;
    std::size_t size = 1;
    std::uint64_t seed = 0;
    /// TimeEnsemble only: 0 samples the exact slice; > 0 samples |Psi|^2
    /// restricted to the slab |x1 + x2| <= constraint_width.
    double constraint_width = 0.0;
    /// TimeEnsemble only: sample y1 and y2 independently instead of forcing
    /// y1 = y2. The slice is then not exactly flow-invariant and sum
    /// conservation becomes a measured quantity.
    bool independent_y = false;
};

struct Ensemble {
    EnsembleSpec spec;
    std::vector<ConfigurationPoint> initial_points;
    std::vector<Trajectory> trajectories;
    SamplerDiagnostics sampler_diagnostics;
    std::size_t truncated_count = 0;
    double end_time = 0.0;

    /// Indices of trajectories that completed; only these enter statistics.
    std::vector<std::size_t> valid_indices() const;
};

/// Samples spec.size initial points at t0 = 0 (Gibbs from the full density,
/// TimeEnsemble from the antisymmetric slice) and propagates them to t_end.
/// Truncated trajectories are kept but excluded from statistics and counted.
Ensemble build_ensemble(const TwoParticleWaveFunction& w, const EnsembleSpec& spec, double t_end,
                        const IntegratorConfig& cfg, std::span<const double> sample_times = {});

}  // namespace dbb
