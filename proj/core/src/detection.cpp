#include "dbbsim/detection.hpp"

#include <algorithm>
#include <cmath>

#include "dbbsim/errors.hpp"
#include "dbbsim/sampling.hpp"

namespace dbb {

namespace {

double binomial_se(double rate, std::size_t trials)
{
    if (trials == 0) return 0.0;
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

void check_overlap(const DetectorPair& pair)
{
    if (pair.p.overlaps(pair.q) && !pair.allow_overlap) {
        throw SimulationError("detector windows overlap; set allow_overlap to permit this");
    }
    if (!(pair.p.x_min < pair.p.x_max) || !(pair.q.x_min < pair.q.x_max)) {
        throw SimulationError("detector window requires x_min < x_max");
    }
}

// int_{W1} dx1 int_{W2} dx2 int dy1 int dy2 |Psi(T)|^2
double ordered_probability(const TwoParticleWaveFunction& w, const DetectorWindow& w1,
                           const DetectorWindow& w2, double T, const QuadratureOptions& opt)
{
    const Interval y_band = effective_y_interval(w, T);
    const Interval domain[4] = {{w1.x_min, w1.x_max}, y_band, {w2.x_min, w2.x_max}, y_band};
    const WavefunctionSnapshot snap = w.at_time(T);
    auto integrand = [&](std::span<const double> v) {
        return snap.density(v[0], v[1], v[2], v[3]);
    };
    return integrate(integrand, domain, opt);
}

}  // namespace

Interval effective_y_interval(const TwoParticleWaveFunction& w, double t)
{
    const auto& a = w.packet_a();
    const auto& b = w.packet_b();
    const auto& c = w.constants();
    const double ca = a.center_y + a.velocity_y * t;
    const double cb = b.center_y + b.velocity_y * t;
    const double width = std::max(packet_width(a.sigma_y, c, t), packet_width(b.sigma_y, c, t));
    return {std::min(ca, cb) - 10.0 * width, std::max(ca, cb) + 10.0 * width};
}

Interval effective_x_interval(const TwoParticleWaveFunction& w, double t)
{
    const auto& a = w.packet_a();
    const auto& b = w.packet_b();
    const auto& c = w.constants();
    const double ca = a.center_x + a.velocity_x * t;
    const double cb = b.center_x + b.velocity_x * t;
    const double width = std::max(packet_width(a.sigma_x, c, t), packet_width(b.sigma_x, c, t));
    return {std::min(ca, cb) - 10.0 * width, std::max(ca, cb) + 10.0 * width};
}

double sqt_joint_probability(const TwoParticleWaveFunction& w, const DetectorPair& pair, double T,
                             PairMode mode, const QuadratureOptions& opt)
{
    if (!(T > 0.0)) throw SimulationError("detection time must be positive");
    check_overlap(pair);

    double result = ordered_probability(w, pair.p, pair.q, T, opt);
    if (mode == PairMode::UnorderedPair) {
        result += ordered_probability(w, pair.q, pair.p, T, opt);
        if (pair.p.overlaps(pair.q)) {
            // the overlap-square region was counted by both orderings
            const DetectorWindow common{std::max(pair.p.x_min, pair.q.x_min),
                                        std::min(pair.p.x_max, pair.q.x_max)};
            result -= ordered_probability(w, common, common, T, opt);
        }
    }
    return result;
}

CoincidenceResult dbb_coincidences(const Ensemble& ensemble, const DetectorPair& pair, double T,
                                   PairMode mode)
{
    check_overlap(pair);
    if (T > ensemble.end_time * (1.0 + 1e-12)) {
        throw EnsembleTooShortError("ensemble propagated to t = "
                                    + std::to_string(ensemble.end_time)
                                    + " but detection requested at T = " + std::to_string(T));
    }

    CoincidenceResult out;
    out.mode = mode;
    for (const std::size_t i : ensemble.valid_indices()) {
        const TrajectorySample& s = ensemble.trajectories[i].at_time(T);
        const double x1 = s.point.x1;
        const double x2 = s.point.x2;
        bool hit = pair.p.contains(x1) && pair.q.contains(x2);
        if (mode == PairMode::UnorderedPair) {
            hit = hit || (pair.q.contains(x1) && pair.p.contains(x2));
        }
        ++out.trials;
        if (hit) ++out.coincidences;
    }
    out.rate = out.trials ? static_cast<double>(out.coincidences)
                                / static_cast<double>(out.trials)
                          : 0.0;
    out.standard_error = binomial_se(out.rate, out.trials);
    return out;
}

SingleParticleCounts single_particle_anticoincidence(const TwoParticleWaveFunction& w,
                                                     std::size_t n, const DetectorPair& pair,
                                                     double T, std::uint64_t seed,
                                                     const IntegratorConfig& cfg)
{
    if (w.mode() != StatisticsMode::SingleParticle) {
        throw SimulationError("single_particle_anticoincidence requires SingleParticle mode");
    }
    check_overlap(pair);

    auto [points, diag] = sample_single_particle(w, 0.0, n, seed);
    const std::vector<double> times{T};
    const auto trajectories = integrate_batch(w, points, T, cfg, times);

    SingleParticleCounts out;
    out.coincidence.mode = PairMode::UnorderedPair;
    for (const auto& traj : trajectories) {
        if (traj.truncated()) continue;
        const double x = traj.at_time(T).point.x1;
        const bool in_p = pair.p.contains(x);
        const bool in_q = pair.q.contains(x);
        ++out.coincidence.trials;
        if (in_p) ++out.p_hits;
        if (in_q) ++out.q_hits;
        if (in_p && in_q) ++out.coincidence.coincidences;
    }
    const auto trials = out.coincidence.trials;
    out.coincidence.rate
        = trials ? static_cast<double>(out.coincidence.coincidences) / trials : 0.0;
    out.coincidence.standard_error = binomial_se(out.coincidence.rate, trials);
    out.p_rate = trials ? static_cast<double>(out.p_hits) / trials : 0.0;
    out.q_rate = trials ? static_cast<double>(out.q_hits) / trials : 0.0;
    out.p_standard_error = binomial_se(out.p_rate, trials);
    out.q_standard_error = binomial_se(out.q_rate, trials);
    return out;
}

std::vector<ScanRow> discrepancy_scan(const TwoParticleWaveFunction& w, const Ensemble& gibbs,
                                      const Ensemble& time_ensemble,
                                      const std::vector<DetectorPair>& placements, double T,
                                      PairMode mode)
{
    std::vector<ScanRow> rows;
    rows.reserve(placements.size());
    for (const auto& pair : placements) {
        ScanRow row;
        row.pair = pair;
        row.sqt = sqt_joint_probability(w, pair, T, mode);
        const CoincidenceResult g = dbb_coincidences(gibbs, pair, T, mode);
        const CoincidenceResult te = dbb_coincidences(time_ensemble, pair, T, mode);
        row.gibbs_rate = g.rate;
        row.gibbs_se = g.standard_error;
        row.time_rate = te.rate;
        row.time_se = te.standard_error;
        row.discrepancy = row.sqt - row.time_rate;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ScanRow> discrepancy_scan(const TwoParticleWaveFunction& w,
                                      const EnsembleSpec& gibbs_spec,
                                      const EnsembleSpec& time_spec,
                                      const std::vector<DetectorPair>& placements, double T,
                                      const IntegratorConfig& cfg, PairMode mode)
{
    if (placements.empty()) return {};

    const std::vector<double> times{T};
    const Ensemble gibbs = build_ensemble(w, gibbs_spec, T, cfg, times);
    const Ensemble time_ens = build_ensemble(w, time_spec, T, cfg, times);
    return discrepancy_scan(w, gibbs, time_ens, placements, T, mode);
}

double screen_band_fraction(const Ensemble& ensemble, double screen_center, double band,
                            double T)
{
    const auto valid = ensemble.valid_indices();
    if (valid.empty()) return 0.0;
    std::size_t inside = 0;
    for (const std::size_t i : valid) {
        const auto& p = ensemble.trajectories[i].at_time(T).point;
        if (std::abs(p.y1 - screen_center) <= band && std::abs(p.y2 - screen_center) <= band) {
            ++inside;
        }
    }
    return static_cast<double>(inside) / static_cast<double>(valid.size());
}

}  // namespace dbb
