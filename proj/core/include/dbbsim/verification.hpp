#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbbsim/ensemble.hpp"
#include "dbbsim/quadrature.hpp"

namespace dbb {

struct InvariantReport {
    std::string name;
    std::size_t samples_tested = 0;
    double max_violation = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

InvariantReport make_report(std::string name, std::size_t samples, double max_violation,
                            double threshold);

/// Normalized residual of the continuity equation
///   d(R^2)/dt + sum_i d_i (R^2 v_i) = 0
/// at q: the time derivative by central finite difference with step dt, the
/// spatial divergence from analytic second derivatives. The result is scaled
/// by the larger term magnitude, so 0 means exact balance.
double continuity_residual(const TwoParticleWaveFunction& w, const ConfigurationPoint& q,
                           double dt = 1e-5, double node_epsilon = 1e-10);

/// x1 bin masses of |Psi(., t)|^2 by adaptive 4D quadrature: one integral per
/// bin over [bin] x [full y] x [full x2] x [full y]. axis 0 selects x1,
/// axis 2 selects x2.
std::vector<double> quadrature_bin_masses(const TwoParticleWaveFunction& w, double t, int axis,
                                          Interval range, std::size_t bins,
                                          const QuadratureOptions& opt = {1e-4, 1e-7, 2'000'000});

/// (x1, x2) joint cell masses (row-major, bins x bins) by adaptive quadrature.
std::vector<double> quadrature_joint_masses(const TwoParticleWaveFunction& w, double t,
                                            Interval range, std::size_t bins,
                                            const QuadratureOptions& opt = {1e-4, 1e-7,
                                                                            2'000'000});

struct PositionMoments {
    double mean_x1 = 0.0;
    double second_x1 = 0.0;  // <x1^2>
    double mean_x2 = 0.0;
    double second_x2 = 0.0;
};

/// <x_i> and <x_i^2> of |Psi(., t)|^2 by 4D quadrature. The absolute floor
/// matters: <x_i> vanishes by symmetry, so a pure relative target would
/// never be reached on that cancelling integral. The defaults keep the
/// quadrature error three orders below typical Monte Carlo standard errors.
PositionMoments quadrature_position_moments(const TwoParticleWaveFunction& w, double t,
                                            const QuadratureOptions& opt = {1e-5, 1e-6,
                                                                            20'000'000});

/// Histogram range for position marginals: packet x centers +- 4 spread widths.
Interval histogram_x_interval(const TwoParticleWaveFunction& w, double t);

/// Propagates an n-sample Gibbs ensemble to time t and compares empirical
/// position statistics against quadrature of |Psi(t)|^2:
///  - total-variation distance of the x1, x2 and joint (x1,x2) histograms
///    (the joint uses floor(sqrt(bins)) bins per axis),
///  - z-scores of means and variances against Monte Carlo standard errors.
std::vector<InvariantReport> equivariance_test(const TwoParticleWaveFunction& w, std::size_t n,
                                               double t, std::size_t bins, std::uint64_t seed,
                                               const IntegratorConfig& cfg, double tv_threshold
                                               = 0.05);

/// Evaluates the exact symmetry identities at random density-weighted
/// configurations with random times in (0, t_max]: particle exchange,
/// reflection in x = 0, the mirror-slit condition, velocity antisymmetry,
/// the velocity exchange identity, and vanishing transverse velocity on the
/// symmetry plane. In MaxwellBoltzmann mode the exchange reports fail by
/// construction.
std::vector<InvariantReport> symmetry_suite(const TwoParticleWaveFunction& w,
                                            std::size_t n_points, std::uint64_t seed,
                                            double t_max);

/// Checks m dv/dt = -grad Q along one trajectory at n_checkpoints interior
/// sample times. The acceleration is a central finite difference of the
/// velocity field along a freshly integrated micro-segment; grad Q is a
/// central finite difference of the analytic quantum potential with step h.
/// Checkpoints within node proximity are skipped and counted out of
/// samples_tested.
InvariantReport newton_diagnostic(const Trajectory& trajectory,
                                  const TwoParticleWaveFunction& w, std::size_t n_checkpoints,
                                  const IntegratorConfig& cfg, double dt = 1e-4, double h = 1e-4,
                                  double threshold = 1e-3);

/// Continuity residuals at n density-weighted random points; reports the
/// maximum residual and verifies nothing about decay (see the paired
/// *_decay report from continuity_decay_check).
InvariantReport continuity_check(const TwoParticleWaveFunction& w, std::size_t n,
                                 std::uint64_t seed, double t_max, double dt = 1e-5,
                                 double threshold = 1e-4);

/// Median ratio of residuals at step dt and dt/2 over n points; second-order
/// finite differences give a ratio near 4. Passes when the ratio is >= 2.
InvariantReport continuity_decay_check(const TwoParticleWaveFunction& w, std::size_t n,
                                       std::uint64_t seed, double t_max, double dt = 1e-3);

}  // namespace dbb
