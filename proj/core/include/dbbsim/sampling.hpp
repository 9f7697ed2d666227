#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dbbsim/configuration.hpp"
#include "dbbsim/wavefunction.hpp"

namespace dbb {

struct SamplerDiagnostics {
    std::size_t proposals = 0;
    double acceptance_rate = 0.0;
    double max_density_seen = 0.0;
};

/// n i.i.d. samples from the 4D configuration density |Psi(., t0)|^2 via
/// rejection sampling. The envelope is the Gaussian mixture formed by the
/// packet-product components of |Psi|^2 (the elementary bound
/// |T1 + T2|^2 <= 2|T1|^2 + 2|T2|^2), scaled by a 1.5 safety factor; a
/// proposal whose density exceeds the envelope raises EnvelopeViolationError.
/// Deterministic for a fixed seed.
std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_density(const TwoParticleWaveFunction& w, double t0, std::size_t n, std::uint64_t seed);

/// n i.i.d. samples (x, y, -x, y) from the conditional density on the
/// antisymmetric slice, |Psi(x, y, -x, y, t0)|^2 as a 2D density. Every
/// sample satisfies x1 + x2 = 0 and y1 = y2 exactly (by construction).
std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_antisymmetric_slice(const TwoParticleWaveFunction& w, double t0, std::size_t n,
                           std::uint64_t seed);

/// Slice sampling with independent y coordinates: (x, y1, -x, y2) distributed
/// as the 3D conditional density |Psi(x, y1, -x, y2, t0)|^2. With this choice
/// the slice is no longer exactly flow-invariant; sum conservation must then
/// be measured, not assumed.
std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_slice_independent_y(const TwoParticleWaveFunction& w, double t0, std::size_t n,
                           std::uint64_t seed);

/// Samples (x, y) from the single-particle density |psi(x, y, t0)|^2 of a
/// SingleParticle-mode wavefunction; particle 2 coordinates are fixed at 0.
std::pair<std::vector<ConfigurationPoint>, SamplerDiagnostics>
sample_single_particle(const TwoParticleWaveFunction& w, double t0, std::size_t n,
                       std::uint64_t seed);

}  // namespace dbb
