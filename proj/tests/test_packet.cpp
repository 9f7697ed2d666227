#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dbbsim/packet.hpp"
#include "dbbsim/quadrature.hpp"

#include "support.hpp"

using dbb::PacketParams;
using dbb::PhysicalConstants;

TEST_SUITE("packet")
{
    TEST_CASE("peak modulus at t = 0 is the normalized Gaussian prefactor")
    {
        const PhysicalConstants c;
        const PacketParams p{1.5, -0.5, 0.8, 1.3, 0.0, 0.0};
        const auto value = dbb::gaussian_packet_value(p, c, p.center_x, p.center_y, 0.0);
        const double expected = std::pow(2.0 * std::numbers::pi * p.sigma_x * p.sigma_x, -0.25)
                                * std::pow(2.0 * std::numbers::pi * p.sigma_y * p.sigma_y, -0.25);
        CHECK(std::abs(value) == doctest::Approx(expected).epsilon(1e-14));
    }

    TEST_CASE("unit norm is preserved by the free evolution")
    {
        const PhysicalConstants c;
        const PacketParams p{2.0, 0.0, 1.0, 1.0, 0.5, 5.0};
        for (const double t : {0.0, 0.7, 3.0}) {
            const double sx = dbb::packet_width(p.sigma_x, c, t);
            const double sy = dbb::packet_width(p.sigma_y, c, t);
            const dbb::Interval domain[2]
                = {{p.center_x + p.velocity_x * t - 12.0 * sx,
                    p.center_x + p.velocity_x * t + 12.0 * sx},
                   {p.center_y + p.velocity_y * t - 12.0 * sy,
                    p.center_y + p.velocity_y * t + 12.0 * sy}};
            auto density = [&](std::span<const double> v) {
                return std::norm(dbb::gaussian_packet_value(p, c, v[0], v[1], t));
            };
            const double norm = dbb::integrate(density, domain, {1e-12, 1e-13, 20'000'000});
            CAPTURE(t);
            CHECK(std::abs(norm - 1.0) < 1e-10);
        }
    }

    TEST_CASE("rms width matches a Crank-Nicolson grid evolution")
    {
        // hbar = m = sigma0 = 1: sigma(2) = sqrt(1 + (2/2)^2) = sqrt(2)
        const PhysicalConstants c;
        const double t_final = 2.0;
        CHECK(dbb::packet_width(1.0, c, t_final) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

        testsupport::GridEvolver grid(-20.0, 20.0, 4001, c.hbar, c.mass);
        for (std::size_t j = 0; j < grid.x.size(); ++j) {
            grid.psi[j] = dbb::packet_axis_value(0.0, 1.0, 0.0, c, grid.x[j], 0.0);
        }
        const int steps = 2000;
        for (int s = 0; s < steps; ++s) grid.step(t_final / steps);
        CHECK(grid.rms_width() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));

        // and the grid wavefunction agrees pointwise with the closed form
        double max_err = 0.0;
        for (std::size_t j = 0; j < grid.x.size(); j += 50) {
            const auto exact = dbb::packet_axis_value(0.0, 1.0, 0.0, c, grid.x[j], t_final);
            max_err = std::max(max_err, std::abs(grid.psi[j] - exact));
        }
        CHECK(max_err < 1e-5);
    }

    TEST_CASE("free Schroedinger equation holds: i hbar dpsi/dt = -(hbar^2/2m) lap psi")
    {
        const PhysicalConstants c{1.0, 1.3};
        const PacketParams p{1.0, -2.0, 0.9, 1.1, 0.4, 1.5};
        const double h = 1e-4;
        dbb::RandomStream rng(11);
        double max_rel = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double t = rng.uniform(0.1, 4.0);
            const double x = p.center_x + p.velocity_x * t + rng.uniform(-3.0, 3.0);
            const double y = p.center_y + p.velocity_y * t + rng.uniform(-3.0, 3.0);
            const auto e = dbb::evaluate_packet(p, c, x, y, t);
            const std::complex<double> dpsi_dt
                = (dbb::gaussian_packet_value(p, c, x, y, t + h)
                   - dbb::gaussian_packet_value(p, c, x, y, t - h))
                  / (2.0 * h);
            const std::complex<double> lhs = std::complex<double>(0.0, c.hbar) * dpsi_dt;
            const std::complex<double> rhs
                = -(c.hbar * c.hbar / (2.0 * c.mass)) * (e.dxx + e.dyy);
            max_rel = std::max(max_rel, std::abs(lhs - rhs) / std::abs(rhs));
        }
        CHECK(max_rel < 1e-5);
    }

    TEST_CASE("mirrored packet satisfies psi_B(-x, y, t) == psi_A(x, y, t) bitwise")
    {
        const PhysicalConstants c;
        const PacketParams a{5.0, 0.0, 1.0, 1.0, 0.7, 5.0};
        const PacketParams b = dbb::mirrored_in_x(a);
        dbb::RandomStream rng(3);
        for (int i = 0; i < 500; ++i) {
            const double x = rng.uniform(-10.0, 10.0);
            const double y = rng.uniform(-2.0, 27.0);
            const double t = rng.uniform(0.0, 5.0);
            const auto va = dbb::gaussian_packet_value(a, c, x, y, t);
            const auto vb = dbb::gaussian_packet_value(b, c, -x, y, t);
            CHECK(va.real() == vb.real());
            CHECK(va.imag() == vb.imag());
        }
    }

    TEST_CASE("gradient at the packet center at t = 0 is i m u / hbar times the value")
    {
        const PhysicalConstants c{0.7, 2.1};
        const PacketParams p{1.0, 2.0, 1.2, 0.9, 1.7, -0.6};
        const auto e = dbb::evaluate_packet(p, c, p.center_x, p.center_y, 0.0);
        const std::complex<double> expected_dx
            = std::complex<double>(0.0, c.mass * p.velocity_x / c.hbar) * e.value;
        const std::complex<double> expected_dy
            = std::complex<double>(0.0, c.mass * p.velocity_y / c.hbar) * e.value;
        CHECK(std::abs(e.dx - expected_dx) < 1e-14 * std::abs(e.value));
        CHECK(std::abs(e.dy - expected_dy) < 1e-14 * std::abs(e.value));
    }

    TEST_CASE("analytic derivatives match finite differences of the value")
    {
        const PhysicalConstants c;
        const PacketParams p{-1.0, 3.0, 1.4, 0.8, -0.3, 1.1};
        dbb::RandomStream rng(5);
        const double h = 1e-6;
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(-4.0, 2.0);
            const double y = rng.uniform(0.0, 6.0);
            const double t = rng.uniform(0.0, 3.0);
            const auto e = dbb::evaluate_packet(p, c, x, y, t);
            const auto fd_x = testsupport::central_diff(
                [&](double xx) { return dbb::gaussian_packet_value(p, c, xx, y, t); }, x, h);
            const auto fd_y = testsupport::central_diff(
                [&](double yy) { return dbb::gaussian_packet_value(p, c, x, yy, t); }, y, h);
            CHECK(std::abs(e.dx - fd_x) <= 1e-6 * std::max(1.0, std::abs(e.dx)));
            CHECK(std::abs(e.dy - fd_y) <= 1e-6 * std::max(1.0, std::abs(e.dy)));
        }
    }
}
