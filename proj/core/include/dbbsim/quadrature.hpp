#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dbb {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double abs_tol = 0.0;
    std::size_t max_evaluations = 50'000'000;
};

/// Axis-aligned integration domain plus tolerances, serializable as a unit.
struct QuadratureSpec {
    std::vector<Interval> bounds;
    double rel_tol = 1e-6;
    double abs_tol = 0.0;
    std::size_t max_evaluations = 50'000'000;

    QuadratureOptions options() const { return {rel_tol, abs_tol, max_evaluations}; }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Adaptive quadrature over an axis-aligned box of dimension 1..4.
/// Dimension 1 uses a Gauss-Kronrod 7/15 pair; dimensions 2..4 use the
/// Genz-Malik degree-7 rule with an embedded degree-5 error estimate.
/// Regions are subdivided largest-error-first along the axis with the
/// largest fourth difference. Stops when
///   total_error <= max(abs_tol, rel_tol * |total_value|).
/// Never throws on non-convergence; inspect `converged`.
QuadratureResult try_integrate(const Integrand& f, std::span<const Interval> domain,
                               const QuadratureOptions& opt = {});

/// As try_integrate, but throws QuadratureNonConvergence when the evaluation
/// budget is exhausted first.
double integrate(const Integrand& f, std::span<const Interval> domain,
                 const QuadratureOptions& opt = {});

}  // namespace dbb
