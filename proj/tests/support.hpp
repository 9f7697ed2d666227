#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dbbsim/config.hpp"
#include "dbbsim/random.hpp"
#include "dbbsim/wavefunction.hpp"

namespace testsupport {

/// Default experiment: hbar = m = 1, sigma0 = 1, slits at +-5, forward speed
/// 5 toward a screen at y = 25 (arrival time T = 5).
inline dbb::ExperimentConfig default_config()
{
    return dbb::ExperimentConfig{};
}

inline dbb::TwoParticleWaveFunction make_wavefunction(
    dbb::StatisticsMode mode = dbb::StatisticsMode::Bosonic)
{
    dbb::ExperimentConfig cfg;
    cfg.statistics_mode = mode;
    return cfg.wavefunction();
}

/// Random configuration in the populated part of configuration space.
inline dbb::ConfigurationPoint random_point(dbb::RandomStream& rng, double t)
{
    return {rng.uniform(-9.0, 9.0), rng.uniform(-3.0, 3.0) + 5.0 * t,
            rng.uniform(-9.0, 9.0), rng.uniform(-3.0, 3.0) + 5.0 * t, t};
}

/// Central finite difference of a scalar-valued function of one coordinate.
inline std::complex<double> central_diff(
    const std::function<std::complex<double>(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Crank-Nicolson evolution of the free 1D Schroedinger equation on a uniform
/// grid; an implementation-independent oracle for packet spreading.
struct GridEvolver {
    std::vector<double> x;
    std::vector<std::complex<double>> psi;
    double dx;
    double hbar;
    double mass;

    GridEvolver(double x_lo, double x_hi, std::size_t n, double hbar_, double mass_)
        : x(n), psi(n), dx((x_hi - x_lo) / static_cast<double>(n - 1)), hbar(hbar_), mass(mass_)
    {
        for (std::size_t j = 0; j < n; ++j) x[j] = x_lo + dx * static_cast<double>(j);
    }

    // psi <- (1 - i dt H / 2hbar)(1 + i dt H / 2hbar)^{-1} psi with H = -hbar^2/2m d^2/dx^2
    void step(double dt)
    {
        const std::size_t n = psi.size();
        const std::complex<double> lambda
            = std::complex<double>(0.0, hbar * dt / (4.0 * mass * dx * dx));
        // rhs = (1 + lambda D2) psi, D2 = second difference
        std::vector<std::complex<double>> rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            const std::complex<double> left = j > 0 ? psi[j - 1] : 0.0;
            const std::complex<double> right = j + 1 < n ? psi[j + 1] : 0.0;
            rhs[j] = psi[j] + lambda * (left - 2.0 * psi[j] + right);
        }
        // solve (1 - lambda D2) psi = rhs (tridiagonal Thomas algorithm)
        const std::complex<double> a = -lambda;
        const std::complex<double> b = 1.0 + 2.0 * lambda;
        std::vector<std::complex<double>> c_prime(n), d_prime(n);
        c_prime[0] = a / b;
        d_prime[0] = rhs[0] / b;
        for (std::size_t j = 1; j < n; ++j) {
            const std::complex<double> denom = b - a * c_prime[j - 1];
            c_prime[j] = a / denom;
            d_prime[j] = (rhs[j] - a * d_prime[j - 1]) / denom;
        }
        psi[n - 1] = d_prime[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) {
            psi[j] = d_prime[j] - c_prime[j] * psi[j + 1];
        }
    }

    double rms_width() const
    {
        double norm = 0.0, mean = 0.0, second = 0.0;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            const double p = std::norm(psi[j]);
            norm += p;
            mean += x[j] * p;
            second += x[j] * x[j] * p;
        }
        mean /= norm;
        second /= norm;
        return std::sqrt(second - mean * mean);
    }
};

}  // namespace testsupport
