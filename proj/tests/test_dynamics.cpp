#include <doctest.h>

#include <cmath>
#include <vector>

#include "dbbsim/dynamics.hpp"
#include "dbbsim/errors.hpp"
#include "dbbsim/packet.hpp"
#include "dbbsim/random.hpp"

#include "support.hpp"

using dbb::ConfigurationPoint;
using dbb::IntegratorConfig;
using dbb::StatisticsMode;
using dbb::Trajectory;

namespace {

std::vector<double> coarse_grid(double t_end, int n)
{
    std::vector<double> times;
    for (int k = 1; k <= n; ++k) times.push_back(t_end * k / n);
    return times;
}

}  // namespace

TEST_SUITE("dynamics")
{
    TEST_CASE("transverse velocities vanish exactly with both particles on the plane")
    {
        const auto w = testsupport::make_wavefunction();
        dbb::RandomStream rng(41);
        for (int i = 0; i < 200; ++i) {
            // early times leave the plane in a density shadow; bypass the
            // node guard so the identity is exercised at every time
            const double t = rng.uniform(0.0, 5.0);
            const ConfigurationPoint q{0.0, rng.uniform(-2.0, 2.0) + 5.0 * t, 0.0,
                                       rng.uniform(-2.0, 2.0) + 5.0 * t, t};
            const auto v = dbb::try_velocity(w, q, 0.0);
            REQUIRE(v.has_value());
            CHECK(v->velocity.vx1 == 0.0);
            CHECK(v->velocity.vx2 == 0.0);
        }
        // late times populate the plane; the throwing interface works there
        const auto v = dbb::velocity_field(w, {0.0, 22.5, 0.0, 22.6, 4.5});
        CHECK(v.vx1 == 0.0);
        CHECK(v.vx2 == 0.0);
    }

    TEST_CASE("x-velocity is antisymmetric under reflection")
    {
        const auto w = testsupport::make_wavefunction();
        dbb::RandomStream rng(43);
        for (int i = 0; i < 300; ++i) {
            const auto q = testsupport::random_point(rng, rng.uniform(0.0, 5.0));
            const auto v = dbb::try_velocity(w, q, 1e-12);
            const auto vr = dbb::try_velocity(w, q.reflected_in_x(), 1e-12);
            if (!v || !vr) continue;
            CHECK(std::abs(v->velocity.vx1 + vr->velocity.vx1)
                  <= 1e-10 * std::max(1.0, std::abs(v->velocity.vx1)));
            CHECK(std::abs(v->velocity.vy1 - vr->velocity.vy1)
                  <= 1e-10 * std::max(1.0, std::abs(v->velocity.vy1)));
        }
    }

    TEST_CASE("velocity exchange identity vx1(q1,q2) == vx2(q2,q1)")
    {
        const auto w = testsupport::make_wavefunction();
        dbb::RandomStream rng(47);
        for (int i = 0; i < 300; ++i) {
            const auto q = testsupport::random_point(rng, rng.uniform(0.0, 5.0));
            const auto v = dbb::try_velocity(w, q, 1e-12);
            const auto ve = dbb::try_velocity(w, q.exchanged(), 1e-12);
            if (!v || !ve) continue;
            CHECK(v->velocity.vx1 == ve->velocity.vx2);
            CHECK(v->velocity.vy1 == ve->velocity.vy2);
        }
    }

    TEST_CASE("single-Gaussian trajectories follow the closed form")
    {
        // d -> 0 single-particle mode collapses to one spreading packet with
        // known Bohmian flow: x(t) = x0 sigma(t)/sigma0, y(t) = u t + y0 sigma(t)/sigma0
        dbb::ExperimentConfig cfg;
        cfg.geometry.d = 1e-30;
        cfg.statistics_mode = StatisticsMode::SingleParticle;
        const auto w = cfg.wavefunction();
        const auto c = w.constants();
        const double T = 5.0;

        SUBCASE("packet-centered start moves at the group velocity")
        {
            const auto grid = coarse_grid(T, 10);
            const Trajectory traj = dbb::integrate_trajectory(
                w, {0.0, 0.0, 0.0, 0.0, 0.0}, T, cfg.integrator, grid);
            REQUIRE(!traj.truncated());
            for (const auto& s : traj.samples) {
                CHECK(std::abs(s.point.x1) < 1e-9);
                CHECK(std::abs(s.point.y1 - cfg.geometry.forward_speed * s.point.t) < 1e-7);
            }
        }

        SUBCASE("off-center start spreads with sigma(t)")
        {
            const double x0 = 0.8, y0 = -0.4;
            const auto grid = coarse_grid(T, 10);
            const Trajectory traj = dbb::integrate_trajectory(
                w, {x0, y0, 0.0, 0.0, 0.0}, T, cfg.integrator, grid);
            REQUIRE(!traj.truncated());
            for (const auto& s : traj.samples) {
                const double spread = dbb::packet_width(1.0, c, s.point.t);
                CHECK(std::abs(s.point.x1 - x0 * spread) < 1e-6);
                CHECK(std::abs(s.point.y1 - (5.0 * s.point.t + y0 * spread)) < 1e-6);
            }
        }
    }

    TEST_CASE("antisymmetric starts conserve x1 + x2 exactly")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig cfg;
        dbb::RandomStream rng(53);
        const auto grid = coarse_grid(5.0, 20);
        for (int i = 0; i < 10; ++i) {
            const double x = rng.uniform(3.0, 7.0);
            const double y = rng.uniform(-1.0, 1.0);
            const ConfigurationPoint q0{x, y, -x, y, 0.0};
            const Trajectory traj = dbb::integrate_trajectory(w, q0, 5.0, cfg, grid);
            REQUIRE(!traj.truncated());
            for (const auto& s : traj.samples) {
                CHECK(s.point.x1 + s.point.x2 == 0.0);
                CHECK(s.point.y1 == s.point.y2);
                CHECK(s.velocity.vx1 == -s.velocity.vx2);
                CHECK(s.velocity.vy1 == s.velocity.vy2);
            }
            // partners stay on their own side of the plane
            const double sign0 = traj.samples.front().point.x1 > 0.0 ? 1.0 : -1.0;
            for (const auto& s : traj.samples) {
                CHECK(sign0 * s.point.x1 > 0.0);
            }
        }
    }

    TEST_CASE("Maxwell-Boltzmann trajectories can cross the symmetry plane")
    {
        const auto w = testsupport::make_wavefunction(StatisticsMode::MaxwellBoltzmann);
        IntegratorConfig cfg;
        // particle 1 starts on the inner flank of the +x packet; dispersion
        // pushes it through x = 0
        const ConfigurationPoint q0{3.0, 0.0, -5.0, 0.0, 0.0};
        const auto grid = coarse_grid(5.0, 50);
        const Trajectory traj = dbb::integrate_trajectory(w, q0, 5.0, cfg, grid);
        REQUIRE(!traj.truncated());
        bool crossed = false;
        for (const auto& s : traj.samples) {
            if (s.point.x1 < 0.0) crossed = true;
        }
        CHECK(crossed);
    }

    TEST_CASE("batch of one equals a single call bitwise and order is preserved")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig cfg;
        const auto grid = coarse_grid(2.0, 5);
        const std::vector<ConfigurationPoint> points{
            {4.0, 0.5, -6.0, -0.5, 0.0}, {5.5, 0.0, -4.0, 0.3, 0.0}, {6.0, 1.0, 4.5, 0.9, 0.0}};

        const auto batch = dbb::integrate_batch(w, points, 2.0, cfg, grid);
        REQUIRE(batch.size() == points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Trajectory single = dbb::integrate_trajectory(w, points[i], 2.0, cfg, grid);
            REQUIRE(batch[i].samples.size() == single.samples.size());
            for (std::size_t k = 0; k < single.samples.size(); ++k) {
                CHECK(batch[i].samples[k].point.x1 == single.samples[k].point.x1);
                CHECK(batch[i].samples[k].point.y1 == single.samples[k].point.y1);
                CHECK(batch[i].samples[k].point.x2 == single.samples[k].point.x2);
                CHECK(batch[i].samples[k].point.y2 == single.samples[k].point.y2);
            }
        }

        // permuting the input permutes the output identically
        const std::vector<ConfigurationPoint> permuted{points[2], points[0], points[1]};
        const auto batch2 = dbb::integrate_batch(w, permuted, 2.0, cfg, grid);
        CHECK(batch2[0].samples.back().point.x1 == batch[2].samples.back().point.x1);
        CHECK(batch2[1].samples.back().point.x1 == batch[0].samples.back().point.x1);
        CHECK(batch2[2].samples.back().point.x1 == batch[1].samples.back().point.x1);

        // concurrent execution must not change a single bit of the output
        const auto threaded = dbb::integrate_batch(w, points, 2.0, cfg, grid, 3);
        REQUIRE(threaded.size() == batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            REQUIRE(threaded[i].samples.size() == batch[i].samples.size());
            for (std::size_t k = 0; k < batch[i].samples.size(); ++k) {
                CHECK(threaded[i].samples[k].point.x1 == batch[i].samples[k].point.x1);
                CHECK(threaded[i].samples[k].point.x2 == batch[i].samples[k].point.x2);
                CHECK(threaded[i].samples[k].velocity.vy1 == batch[i].samples[k].velocity.vy1);
            }
        }
    }

    TEST_CASE("dense output matches independently restarted integration")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig cfg;
        const ConfigurationPoint q0{4.5, 0.2, -5.5, -0.1, 0.0};
        const auto grid = coarse_grid(5.0, 16);
        const Trajectory traj = dbb::integrate_trajectory(w, q0, 5.0, cfg, grid);
        REQUIRE(!traj.truncated());

        IntegratorConfig tight = cfg;
        tight.rel_tol = tight.abs_tol = 1e-12;
        for (const double t : {1.25, 3.125, 4.0625}) {
            const Trajectory direct = dbb::integrate_trajectory(w, q0, t, tight, {});
            const auto& dense = traj.at_time(t);
            CHECK(std::abs(dense.point.x1 - direct.samples.back().point.x1) < 1e-6);
            CHECK(std::abs(dense.point.y1 - direct.samples.back().point.y1) < 1e-6);
        }
    }

    TEST_CASE("halving the tolerance moves endpoints less than 10x the error estimate")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig loose;
        loose.rel_tol = loose.abs_tol = 1e-6;
        IntegratorConfig tight;
        tight.rel_tol = tight.abs_tol = 5e-7;

        const ConfigurationPoint q0{5.2, 0.1, -4.6, 0.4, 0.0};
        const Trajectory a = dbb::integrate_trajectory(w, q0, 5.0, loose, {});
        const Trajectory b = dbb::integrate_trajectory(w, q0, 5.0, tight, {});
        const auto& pa = a.samples.back().point;
        const auto& pb = b.samples.back().point;
        const double shift = std::sqrt(std::pow(pa.x1 - pb.x1, 2) + std::pow(pa.y1 - pb.y1, 2)
                                       + std::pow(pa.x2 - pb.x2, 2)
                                       + std::pow(pa.y2 - pb.y2, 2));
        CHECK(a.stats.accumulated_error > 0.0);
        CHECK(shift < 10.0 * a.stats.accumulated_error);
    }

    TEST_CASE("a start below the node threshold is returned truncated")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig cfg;
        const Trajectory traj
            = dbb::integrate_trajectory(w, {60.0, 0.0, -60.0, 0.0, 0.0}, 5.0, cfg, {});
        CHECK(traj.truncated());
        CHECK(traj.status == dbb::TrajectoryStatus::TruncatedAtNode);
        CHECK(traj.end_time == 0.0);
    }

    TEST_CASE("runaway step limit raises StepLimitExceededError")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig cfg;
        cfg.max_steps = 3;
        CHECK_THROWS_AS(
            dbb::integrate_trajectory(w, {5.0, 0.0, -5.0, 0.0, 0.0}, 5.0, cfg, {}),
            dbb::StepLimitExceededError);
    }

    TEST_CASE("sample timestamps are strictly increasing")
    {
        const auto w = testsupport::make_wavefunction();
        IntegratorConfig cfg;
        const auto grid = coarse_grid(3.0, 12);
        const Trajectory traj
            = dbb::integrate_trajectory(w, {4.8, 0.0, -5.1, 0.2, 0.0}, 3.0, cfg, grid);
        REQUIRE(traj.samples.size() > 2);
        for (std::size_t i = 1; i < traj.samples.size(); ++i) {
            CHECK(traj.samples[i].point.t > traj.samples[i - 1].point.t);
        }
        CHECK(traj.samples.back().point.t == 3.0);
        CHECK_THROWS_AS(traj.at_time(2.71828), dbb::SimulationError);
    }
}
