#pragma once

#include <cstdint>
#include <vector>

#include "dbbsim/ensemble.hpp"
#include "dbbsim/quadrature.hpp"

namespace dbb {

/// Detection window [x_min, x_max] on the screen line, evaluated at fixed time.
struct DetectorWindow {
    double x_min = 0.0;
    double x_max = 0.0;

    bool contains(double x) const { return x >= x_min && x <= x_max; }
    double width() const { return x_max - x_min; }
    DetectorWindow mirrored() const { return {-x_max, -x_min}; }
    bool overlaps(const DetectorWindow& other) const
    {
        return x_min < other.x_max && other.x_min < x_max;
    }
};

struct DetectorPair {
    DetectorWindow p;
    DetectorWindow q;
    bool allow_overlap = false;
};

/// Physical detectors cannot tell particle labels apart, so UnorderedPair is
/// the default: a coincidence is (x1 in P and x2 in Q) or (x1 in Q and x2 in P).
enum class PairMode {
    OrderedPair,
    UnorderedPair,
};

struct CoincidenceResult {
    std::size_t trials = 0;
    std::size_t coincidences = 0;
    double rate = 0.0;
    double standard_error = 0.0;
    PairMode mode = PairMode::UnorderedPair;
};

/// Joint detection probability at fixed time T,
///   int_P dx1 int_Q dx2 int dy1 int dy2 |Psi(x1,y1,x2,y2,T)|^2,
/// with the y integrals marginalized over the full (effective) line, by
/// adaptive quadrature. UnorderedPair adds the (Q,P) ordering with the
/// overlap region counted once.
double sqt_joint_probability(const TwoParticleWaveFunction& w, const DetectorPair& pair, double T,
                             PairMode mode = PairMode::UnorderedPair,
                             const QuadratureOptions& opt = {1e-6, 1e-10, 50'000'000});

/// Coincidence counting over a propagated ensemble: reads (x1(T), x2(T)) of
/// every completed pair trajectory. Binomial standard error.
CoincidenceResult dbb_coincidences(const Ensemble& ensemble, const DetectorPair& pair, double T,
                                   PairMode mode = PairMode::UnorderedPair);

struct SingleParticleCounts {
    CoincidenceResult coincidence;
    std::size_t p_hits = 0;
    std::size_t q_hits = 0;
    double p_rate = 0.0;
    double q_rate = 0.0;
    double p_standard_error = 0.0;
    double q_standard_error = 0.0;
};

/// n single-particle trials: each trajectory is sampled from |psi(0)|^2 and
/// propagated to T. At most one detector can fire per trial, so disjoint
/// windows give exactly zero coincidences in both theories.
SingleParticleCounts single_particle_anticoincidence(const TwoParticleWaveFunction& w,
                                                     std::size_t n, const DetectorPair& pair,
                                                     double T, std::uint64_t seed,
                                                     const IntegratorConfig& cfg);

struct ScanRow {
    DetectorPair pair;
    double sqt = 0.0;
    double gibbs_rate = 0.0;
    double gibbs_se = 0.0;
    double time_rate = 0.0;
    double time_se = 0.0;
    double discrepancy = 0.0;  // sqt - time_rate
};

/// Side-by-side comparison over a grid of detector placements: the SQT
/// quadrature value, the Gibbs-ensemble rate and the time-ensemble rate.
/// Both ensembles are built once from their specs and reused for all rows.
std::vector<ScanRow> discrepancy_scan(const TwoParticleWaveFunction& w,
                                      const EnsembleSpec& gibbs_spec,
                                      const EnsembleSpec& time_spec,
                                      const std::vector<DetectorPair>& placements, double T,
                                      const IntegratorConfig& cfg,
                                      PairMode mode = PairMode::UnorderedPair);

/// Row computation against already-propagated ensembles.
std::vector<ScanRow> discrepancy_scan(const TwoParticleWaveFunction& w, const Ensemble& gibbs,
                                      const Ensemble& time_ensemble,
                                      const std::vector<DetectorPair>& placements, double T,
                                      PairMode mode = PairMode::UnorderedPair);

/// Diagnostic for the fixed-time detection model: the fraction of completed
/// pairs whose particles are both within |y - screen_center| <= band at time
/// T. Counting happens at fixed t, not at a screen crossing, so this reports
/// how many pairs are actually near the screen line when they are read out.
double screen_band_fraction(const Ensemble& ensemble, double screen_center, double band,
                            double T);

/// Effective y-integration band at time t: all packet centers plus/minus
/// 10 spread widths.
Interval effective_y_interval(const TwoParticleWaveFunction& w, double t);

/// Effective x range at time t, same construction as effective_y_interval.
Interval effective_x_interval(const TwoParticleWaveFunction& w, double t);

}  // namespace dbb
