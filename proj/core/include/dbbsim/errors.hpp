#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace dbb {

namespace detail {
inline std::string scientific(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}
}  // namespace detail

/// Base class for all simulator failures.
class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The wavefunction modulus at a query point is below the node threshold;
/// velocity and quantum-potential values there are unreliable.
class NodeProximityError : public SimulationError {
  public:
    NodeProximityError(double abs_psi, double threshold)
        : SimulationError("wavefunction modulus " + detail::scientific(abs_psi)
                          + " below node threshold " + detail::scientific(threshold))
        , abs_psi_(abs_psi)
        , threshold_(threshold)
    {
    }
    double abs_psi() const { return abs_psi_; }
    double threshold() const { return threshold_; }

  private:
    double abs_psi_;
    double threshold_;
};

/// The adaptive integrator rejected steps until the step-size floor without
/// making progress.
class StepLimitExceededError : public SimulationError {
  public:
    explicit StepLimitExceededError(double t)
        : SimulationError("step control failed to advance past t = " + std::to_string(t)), t_(t)
    {
    }
    double t() const { return t_; }

  private:
    double t_;
};

/// A rejection-sampling proposal found target density above the envelope,
/// which means the envelope constant is mis-specified.
class EnvelopeViolationError : public SimulationError {
  public:
    EnvelopeViolationError(double density, double envelope)
        : SimulationError("target density " + detail::scientific(density)
                          + " exceeds envelope " + detail::scientific(envelope))
        , density_(density)
        , envelope_(envelope)
    {
    }
    double density() const { return density_; }
    double envelope() const { return envelope_; }

  private:
    double density_;
    double envelope_;
};

/// Adaptive quadrature stopped at the evaluation budget before reaching the
/// requested tolerance. Carries the achieved error estimate.
class QuadratureNonConvergence : public SimulationError {
  public:
    QuadratureNonConvergence(double value, double error_estimate, std::size_t evaluations)
        : SimulationError("quadrature did not converge: value " + detail::scientific(value)
                          + ", achieved error " + detail::scientific(error_estimate)
                          + " after " + std::to_string(evaluations) + " evaluations")
        , value_(value)
        , error_estimate_(error_estimate)
        , evaluations_(evaluations)
    {
    }
    double value() const { return value_; }
    double error_estimate() const { return error_estimate_; }
    std::size_t evaluations() const { return evaluations_; }

  private:
    double value_;
    double error_estimate_;
    std::size_t evaluations_;
};

/// Detection was requested at a time beyond the ensemble's propagation horizon.
class EnsembleTooShortError : public SimulationError {
  public:
    using SimulationError::SimulationError;
};

/// Experiment configuration failed validation. Carries the offending field path.
class ConfigError : public SimulationError {
  public:
    ConfigError(std::string field_path, const std::string& what)
        : SimulationError(field_path.empty() ? what : field_path + ": " + what)
        , field_path_(std::move(field_path))
    {
    }
    const std::string& field_path() const { return field_path_; }

  private:
    std::string field_path_;
};

}  // namespace dbb
