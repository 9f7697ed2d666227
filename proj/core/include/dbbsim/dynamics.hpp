#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbbsim/configuration.hpp"
#include "dbbsim/wavefunction.hpp"

namespace dbb {

/// Configuration-space velocity (vx1, vy1, vx2, vy2) at one point.
struct VelocitySample {
    double vx1 = 0.0;
    double vy1 = 0.0;
    double vx2 = 0.0;
    double vy2 = 0.0;
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    double max_step = 0.25;
    double min_step = 1e-12;
    /// Node threshold relative to the wavefunction's amplitude scale.
    double node_epsilon = 1e-10;
    /// Re-project onto the antisymmetric slice after each accepted step.
    /// Off by default so that sum conservation stays a measured property.
    bool resymmetrize = false;
    std::size_t max_steps = 1'000'000;
};

struct VelocityEval {
    VelocitySample velocity;
    double abs_psi = 0.0;
};

/// Guidance law v_i = (hbar/m) Im(d_i Psi / Psi), from analytic gradients.
/// Throws NodeProximityError when |Psi| <= node_epsilon * amplitude_scale.
VelocitySample velocity_field(const TwoParticleWaveFunction& w, const ConfigurationPoint& q,
                              double node_epsilon = 1e-10);

/// Non-throwing variant; empty when the point is below the node threshold.
std::optional<VelocityEval> try_velocity(const TwoParticleWaveFunction& w,
                                         const ConfigurationPoint& q, double node_epsilon);

struct TrajectorySample {
    ConfigurationPoint point;
    VelocitySample velocity;
    double abs_psi = 0.0;
};

enum class TrajectoryStatus {
    Complete,
    TruncatedAtNode,   // step control could not keep |Psi| above threshold
    StepControlFailed, // runaway rejection (batch only; single call throws)
};

struct IntegratorStats {
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t node_rejections = 0;
    double min_abs_psi = 0.0;
    /// Sum of accepted per-step error estimates (absolute, rms over components).
    double accumulated_error = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    IntegratorStats stats;
    TrajectoryStatus status = TrajectoryStatus::Complete;
    double end_time = 0.0;
    std::string failure_message;

    bool truncated() const { return status != TrajectoryStatus::Complete; }
    /// Recorded sample nearest to time `t`; throws if none is within 1e-9.
    const TrajectorySample& at_time(double t) const;
};

/// Integrates dq/dt = v(q,t) from q0.t to t_end with an adaptive embedded
/// Dormand-Prince 5(4) scheme. Samples are emitted at q0.t, at every
/// requested time in (q0.t, t_end], and at t_end. Steps landing below the
/// node threshold are rejected and retried smaller; if min_step is reached
/// the trajectory is returned truncated with TrajectoryStatus::TruncatedAtNode.
/// Throws StepLimitExceededError on runaway step rejection.
Trajectory integrate_trajectory(const TwoParticleWaveFunction& w, const ConfigurationPoint& q0,
                                double t_end, const IntegratorConfig& cfg,
                                std::span<const double> sample_times = {});

/// Order-preserving batch driver. Each trajectory is computed independently
/// and is bitwise identical to a single call, whatever the scheduling;
/// per-item failures are recorded in the returned Trajectory and never abort
/// the batch. n_threads 0 uses the hardware concurrency.
std::vector<Trajectory> integrate_batch(const TwoParticleWaveFunction& w,
                                        std::span<const ConfigurationPoint> initial_points,
                                        double t_end, const IntegratorConfig& cfg,
                                        std::span<const double> sample_times = {},
                                        unsigned n_threads = 0);

}  // namespace dbb
