#include <doctest.h>

#include <cmath>

#include "dbbsim/detection.hpp"
#include "dbbsim/errors.hpp"

#include "support.hpp"

using dbb::DetectorPair;
using dbb::DetectorWindow;
using dbb::EnsembleKind;
using dbb::EnsembleSpec;
using dbb::PairMode;

namespace {

constexpr double kT = 5.0;

DetectorPair symmetric_pair(double center, double width)
{
    const DetectorWindow p{center - 0.5 * width, center + 0.5 * width};
    return {p, p.mirrored(), false};
}

}  // namespace

TEST_SUITE("detection")
{
    TEST_CASE("whole-line windows recover unit probability")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::Interval x = dbb::effective_x_interval(w, kT);
        const DetectorPair whole{{x.lo, x.hi}, {x.lo, x.hi}, true};
        const double total
            = dbb::sqt_joint_probability(w, whole, kT, PairMode::OrderedPair,
                                         {1e-6, 1e-9, 80'000'000});
        CHECK(std::abs(total - 1.0) < 1e-6);
    }

    TEST_CASE("mirror-image pair gives the identical probability")
    {
        const auto w = testsupport::make_wavefunction();
        const DetectorPair pair{{1.0, 1.5}, {-3.5, -3.0}, false};
        const DetectorPair mirrored{{3.0, 3.5}, {-1.5, -1.0}, false};
        const double a = dbb::sqt_joint_probability(w, pair, kT);
        const double b = dbb::sqt_joint_probability(w, mirrored, kT);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }

    TEST_CASE("ordered probabilities are exchange symmetric for the bosonic state")
    {
        const auto w = testsupport::make_wavefunction();
        const DetectorPair pq{{1.0, 1.5}, {-3.5, -3.0}, false};
        const DetectorPair qp{{-3.5, -3.0}, {1.0, 1.5}, false};
        const double a = dbb::sqt_joint_probability(w, pq, kT, PairMode::OrderedPair);
        const double b = dbb::sqt_joint_probability(w, qp, kT, PairMode::OrderedPair);
        CHECK(a == doctest::Approx(b).epsilon(1e-5));
        // and the unordered probability is their sum for disjoint windows
        const double u = dbb::sqt_joint_probability(w, pq, kT, PairMode::UnorderedPair);
        CHECK(u == doctest::Approx(a + b).epsilon(1e-5));
    }

    TEST_CASE("enlarging a window never decreases the joint probability")
    {
        const auto w = testsupport::make_wavefunction();
        const DetectorPair base{{1.0, 1.5}, {-3.5, -3.0}, false};
        const DetectorPair wider{{0.5, 2.0}, {-3.5, -3.0}, false};
        const DetectorPair wider_q{{1.0, 1.5}, {-4.5, -2.5}, false};
        const double p0 = dbb::sqt_joint_probability(w, base, kT);
        CHECK(dbb::sqt_joint_probability(w, wider, kT) >= p0 - 1e-9);
        CHECK(dbb::sqt_joint_probability(w, wider_q, kT) >= p0 - 1e-9);
    }

    TEST_CASE("overlapping windows are rejected unless explicitly allowed")
    {
        const auto w = testsupport::make_wavefunction();
        const DetectorPair overlapping{{-0.5, 0.5}, {0.0, 1.0}, false};
        CHECK_THROWS_AS(dbb::sqt_joint_probability(w, overlapping, kT), dbb::SimulationError);
        DetectorPair allowed = overlapping;
        allowed.allow_overlap = true;
        CHECK_NOTHROW(dbb::sqt_joint_probability(w, allowed, kT));
        // inclusion-exclusion keeps the unordered result a probability
        CHECK(dbb::sqt_joint_probability(w, allowed, kT) <= 1.0);
    }

    TEST_CASE("time-ensemble rate is exactly zero when Q misses the mirror of P")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec spec{EnsembleKind::TimeEnsemble, 800, 99, 0.0, false};
        const std::vector<double> times{kT};
        const dbb::Ensemble ensemble = dbb::build_ensemble(w, spec, kT, cfg, times);

        const DetectorPair asym{{2.0, 2.5}, {-8.0, -7.5}, false};  // mirror(P) = [-2.5,-2]
        const auto result = dbb::dbb_coincidences(ensemble, asym, kT);
        CHECK(result.trials > 0);
        CHECK(result.coincidences == 0);
        CHECK(result.rate == 0.0);

        // the SQT prediction for the same pair is positive
        CHECK(dbb::sqt_joint_probability(w, asym, kT) > 1e-3);
    }

    TEST_CASE("gibbs-ensemble rate agrees with the SQT probability within 3 SE")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec spec{EnsembleKind::Gibbs, 4000, 12121, 0.0, false};
        const std::vector<double> times{kT};
        const dbb::Ensemble ensemble = dbb::build_ensemble(w, spec, kT, cfg, times);

        for (const auto& pair : {symmetric_pair(2.25, 0.5),
                                 DetectorPair{{2.0, 3.0}, {-8.0, -7.0}, false}}) {
            const double sqt = dbb::sqt_joint_probability(w, pair, kT);
            const auto counted = dbb::dbb_coincidences(ensemble, pair, kT);
            const double se = std::max(counted.standard_error, 1e-4);
            CHECK(std::abs(counted.rate - sqt) <= 3.0 * se);
        }
    }

    TEST_CASE("coincidence counting honors the pair mode")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec spec{EnsembleKind::Gibbs, 2000, 555, 0.0, false};
        const std::vector<double> times{kT};
        const dbb::Ensemble ensemble = dbb::build_ensemble(w, spec, kT, cfg, times);
        const DetectorPair pair{{1.0, 2.0}, {-3.0, -2.0}, false};
        const auto unordered = dbb::dbb_coincidences(ensemble, pair, kT,
                                                     PairMode::UnorderedPair);
        const auto ordered = dbb::dbb_coincidences(ensemble, pair, kT, PairMode::OrderedPair);
        CHECK(unordered.coincidences >= ordered.coincidences);
        CHECK(unordered.trials == ordered.trials);
    }

    TEST_CASE("detection beyond the propagation horizon is refused")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec spec{EnsembleKind::Gibbs, 10, 3, 0.0, false};
        const std::vector<double> times{1.0};
        const dbb::Ensemble ensemble = dbb::build_ensemble(w, spec, 1.0, cfg, times);
        CHECK_THROWS_AS(
            dbb::dbb_coincidences(ensemble, symmetric_pair(1.0, 0.5), 2.0),
            dbb::EnsembleTooShortError);
    }

    TEST_CASE("single-particle trials never fire both detectors")
    {
        const auto w = testsupport::make_wavefunction(dbb::StatisticsMode::SingleParticle);
        const dbb::IntegratorConfig cfg;
        const DetectorPair pair{{1.0, 2.0}, {-2.0, -1.0}, false};

        const DetectorPair overlapping{{1.0, 2.0}, {1.5, 2.5}, false};
        CHECK_THROWS_AS(
            dbb::single_particle_anticoincidence(w, 10, overlapping, kT, 1, cfg),
            dbb::SimulationError);
        const auto counts = dbb::single_particle_anticoincidence(w, 2000, pair, kT, 808, cfg);
        CHECK(counts.coincidence.trials > 1900);
        CHECK(counts.coincidence.coincidences == 0);
        CHECK(counts.p_hits > 0);
        CHECK(counts.q_hits > 0);

        // single-window rates match the 2D quadrature of |psi(T)|^2
        const auto snap = w.at_time(kT);
        const dbb::Interval y_band = dbb::effective_y_interval(w, kT);
        auto window_probability = [&](const DetectorWindow& win) {
            const dbb::Interval domain[2] = {{win.x_min, win.x_max}, y_band};
            auto f = [&](std::span<const double> v) {
                return snap.density(v[0], v[1], 0.0, 0.0);
            };
            return dbb::integrate(f, domain, {1e-8, 1e-12, 10'000'000});
        };
        const double pp = window_probability(pair.p);
        const double pq = window_probability(pair.q);
        CHECK(std::abs(counts.p_rate - pp) <= 3.0 * std::max(counts.p_standard_error, 1e-4));
        CHECK(std::abs(counts.q_rate - pq) <= 3.0 * std::max(counts.q_standard_error, 1e-4));
    }

    TEST_CASE("discrepancy scan: empty grid gives an empty table")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec gibbs{EnsembleKind::Gibbs, 10, 1, 0.0, false};
        const EnsembleSpec time{EnsembleKind::TimeEnsemble, 10, 2, 0.0, false};
        CHECK(dbb::discrepancy_scan(w, gibbs, time, {}, kT, cfg).empty());
    }

    TEST_CASE("discrepancy scan reproduces the asymmetric null result")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec gibbs{EnsembleKind::Gibbs, 3000, 11, 0.0, false};
        const EnsembleSpec time{EnsembleKind::TimeEnsemble, 3000, 12, 0.0, false};
        const std::vector<DetectorPair> placements{
            symmetric_pair(2.25, 0.5),
            {{2.0, 2.5}, {-8.0, -7.5}, false},
            {{1.0, 1.5}, {-4.0, -3.5}, false},
        };
        const auto rows = dbb::discrepancy_scan(w, gibbs, time, placements, kT, cfg);
        REQUIRE(rows.size() == placements.size());

        // asymmetric placements: the time ensemble records nothing, so the
        // discrepancy equals the full SQT probability
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].sqt > 1e-4);
            CHECK(rows[i].time_rate == 0.0);
            CHECK(rows[i].discrepancy == rows[i].sqt);
        }
        // gibbs agrees with SQT everywhere
        for (const auto& row : rows) {
            CHECK(std::abs(row.gibbs_rate - row.sqt) <= 3.0 * std::max(row.gibbs_se, 1e-4));
        }
        // mirror-symmetric placement: the time ensemble does count
        CHECK(rows[0].time_rate > 0.0);
    }

    TEST_CASE("most pairs sit near the screen line at the readout time")
    {
        const auto w = testsupport::make_wavefunction();
        const dbb::IntegratorConfig cfg;
        const EnsembleSpec spec{EnsembleKind::Gibbs, 1000, 321, 0.0, false};
        const std::vector<double> times{kT};
        const dbb::Ensemble e = dbb::build_ensemble(w, spec, kT, cfg, times);

        const double sigma_y_t = dbb::packet_width(1.0, w.constants(), kT);
        const double f2 = dbb::screen_band_fraction(e, 25.0, 2.0 * sigma_y_t, kT);
        const double f1 = dbb::screen_band_fraction(e, 25.0, sigma_y_t, kT);
        // both particles ~ N(screen_y, sigma_y(T)) independently: about 0.91
        // inside two widths, about 0.47 inside one
        CHECK(f2 > 0.85);
        CHECK(f2 <= 1.0);
        CHECK(f1 < f2);
        CHECK(f1 > 0.3);
    }
}
