#include "dbbsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "dbbsim/errors.hpp"

namespace dbb {

namespace {

using State = std::array<double, 4>;  // x1, y1, x2, y2

ConfigurationPoint to_point(const State& y, double t)
{
    return {y[0], y[1], y[2], y[3], t};
}

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// b - b* (5th-order weights minus embedded 4th-order weights)
constexpr double kE1 = kB1 - 5179.0 / 57600.0;
constexpr double kE3 = kB3 - 7571.0 / 16695.0;
constexpr double kE4 = kB4 - 393.0 / 640.0;
constexpr double kE5 = kB5 + 92097.0 / 339200.0;
constexpr double kE6 = kB6 - 187.0 / 2100.0;
constexpr double kE7 = -1.0 / 40.0;
// dense-output quartic coefficients (continuous extension of DOPRI5)
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

struct Stepper {
    const TwoParticleWaveFunction& w;
    const IntegratorConfig& cfg;
    IntegratorStats stats;

    std::optional<State> rhs(const State& y, double t)
    {
        const auto v = try_velocity(w, to_point(y, t), cfg.node_epsilon);
        if (!v) return std::nullopt;
        if (stats.min_abs_psi == 0.0 || v->abs_psi < stats.min_abs_psi) {
            stats.min_abs_psi = v->abs_psi;
        }
        return State{v->velocity.vx1, v->velocity.vy1, v->velocity.vx2, v->velocity.vy2};
    }
};

struct StepResult {
    State y1;
    std::array<State, 7> k;
    double error = 0.0;      // rms of component errors over tolerance scales
    double error_abs = 0.0;  // rms of raw component errors
};

// One trial step. k1 is the derivative at (t, y0) and must be valid.
// Returns nullopt if any stage or the endpoint lands below the node threshold.
std::optional<StepResult> attempt_step(Stepper& s, const State& y0, double t, double h,
                                       const State& k1)
{
    StepResult r;
    r.k[0] = k1;
    State y{};

    auto stage = [&](int idx, double c, auto... terms) -> bool {
        for (int i = 0; i < 4; ++i) {
            double acc = 0.0;
            ((acc += terms.first * r.k[terms.second][i]), ...);
            y[i] = y0[i] + h * acc;
        }
        const auto k = s.rhs(y, t + c * h);
        if (!k) return false;
        r.k[idx] = *k;
        return true;
    };
    using P = std::pair<double, int>;
    if (!stage(1, kC[1], P{kA21, 0})) return std::nullopt;
    if (!stage(2, kC[2], P{kA31, 0}, P{kA32, 1})) return std::nullopt;
    if (!stage(3, kC[3], P{kA41, 0}, P{kA42, 1}, P{kA43, 2})) return std::nullopt;
    if (!stage(4, kC[4], P{kA51, 0}, P{kA52, 1}, P{kA53, 2}, P{kA54, 3})) return std::nullopt;
    if (!stage(5, kC[5], P{kA61, 0}, P{kA62, 1}, P{kA63, 2}, P{kA64, 3}, P{kA65, 4}))
        return std::nullopt;

    for (int i = 0; i < 4; ++i) {
        double acc = kB1 * r.k[0][i];
        acc += kB3 * r.k[2][i];
        acc += kB4 * r.k[3][i];
        acc += kB5 * r.k[4][i];
        acc += kB6 * r.k[5][i];
        r.y1[i] = y0[i] + h * acc;
    }
    const auto k7 = s.rhs(r.y1, t + h);
    if (!k7) return std::nullopt;
    r.k[6] = *k7;

    double err_sq = 0.0;
    double err_abs_sq = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = kE1 * r.k[0][i];
        e += kE3 * r.k[2][i];
        e += kE4 * r.k[3][i];
        e += kE5 * r.k[4][i];
        e += kE6 * r.k[5][i];
        e += kE7 * r.k[6][i];
        e *= h;
        const double sc
            = s.cfg.abs_tol + s.cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(r.y1[i]));
        err_sq += (e / sc) * (e / sc);
        err_abs_sq += e * e;
    }
    r.error = std::sqrt(err_sq / 4.0);
    r.error_abs = std::sqrt(err_abs_sq / 4.0);
    return r;
}

struct DenseCoefficients {
    std::array<State, 5> r;

    DenseCoefficients(const State& y0, const StepResult& sr, double h)
    {
        for (int i = 0; i < 4; ++i) {
            const double ydiff = sr.y1[i] - y0[i];
            const double bspl = h * sr.k[0][i] - ydiff;
            r[0][i] = y0[i];
            r[1][i] = ydiff;
            r[2][i] = bspl;
            r[3][i] = ydiff - h * sr.k[6][i] - bspl;
            double acc = kD1 * sr.k[0][i];
            acc += kD3 * sr.k[2][i];
            acc += kD4 * sr.k[3][i];
            acc += kD5 * sr.k[4][i];
            acc += kD6 * sr.k[5][i];
            acc += kD7 * sr.k[6][i];
            r[4][i] = h * acc;
        }
    }

    State at(double theta) const
    {
        State y{};
        for (int i = 0; i < 4; ++i) {
            y[i] = r[0][i]
                   + theta
                         * (r[1][i]
                            + (1.0 - theta)
                                  * (r[2][i] + theta * (r[3][i] + (1.0 - theta) * r[4][i])));
        }
        return y;
    }
};

}  // namespace

std::optional<VelocityEval> try_velocity(const TwoParticleWaveFunction& w,
                                         const ConfigurationPoint& q, double node_epsilon)
{
    const WavefunctionSnapshot snap = w.at_time(q.t);
    const WavefunctionEval e = snap.evaluate(q.x1, q.y1, q.x2, q.y2);
    const double abs_psi = std::abs(e.value);
    if (!(abs_psi > node_epsilon * snap.amplitude_scale())) {
        return std::nullopt;
    }
    const double factor = w.constants().hbar / w.constants().mass;
    VelocityEval out;
    out.abs_psi = abs_psi;
    out.velocity.vx1 = factor * std::imag(e.grad[0] / e.value);
    out.velocity.vy1 = factor * std::imag(e.grad[1] / e.value);
    out.velocity.vx2 = factor * std::imag(e.grad[2] / e.value);
    out.velocity.vy2 = factor * std::imag(e.grad[3] / e.value);
    return out;
}

VelocitySample velocity_field(const TwoParticleWaveFunction& w, const ConfigurationPoint& q,
                              double node_epsilon)
{
    const auto v = try_velocity(w, q, node_epsilon);
    if (!v) {
        throw NodeProximityError(std::abs(w.value(q)), node_epsilon * w.amplitude_scale(q.t));
    }
    return v->velocity;
}

const TrajectorySample& Trajectory::at_time(double t) const
{
    const TrajectorySample* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const double dist = std::abs(s.point.t - t);
        if (dist < best_dist) {
            best_dist = dist;
            best = &s;
        }
    }
    if (!best || best_dist > 1e-9 * std::max(1.0, std::abs(t))) {
        throw SimulationError("no trajectory sample at t = " + std::to_string(t));
    }
    return *best;
}

Trajectory integrate_trajectory(const TwoParticleWaveFunction& w, const ConfigurationPoint& q0,
                                double t_end, const IntegratorConfig& cfg,
                                std::span<const double> sample_times)
{
    if (!(q0.t < t_end)) {
        throw SimulationError("integrate_trajectory requires q0.t < t_end");
    }

    // requested output times, strictly inside (t0, t_end], plus t_end itself
    std::vector<double> wanted(sample_times.begin(), sample_times.end());
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    std::erase_if(wanted, [&](double t) { return t <= q0.t || t > t_end; });
    if (wanted.empty() || wanted.back() != t_end) wanted.push_back(t_end);

    Stepper stepper{w, cfg, {}};
    Trajectory traj;

    State y{q0.x1, q0.y1, q0.x2, q0.y2};
    double t = q0.t;

    auto record = [&](const State& state, double time) {
        const auto v = try_velocity(w, to_point(state, time), 0.0);
        traj.samples.push_back({to_point(state, time), v ? v->velocity : VelocitySample{},
                                v ? v->abs_psi : 0.0});
    };

    auto truncate = [&](TrajectoryStatus status, const std::string& message) {
        traj.status = status;
        traj.failure_message = message;
        traj.end_time = t;
        traj.stats = stepper.stats;
        return traj;
    };

    record(y, t);

    auto k1_opt = stepper.rhs(y, t);
    if (!k1_opt) {
        return truncate(TrajectoryStatus::TruncatedAtNode,
                        "initial point is below the node threshold");
    }
    State k1 = *k1_opt;

    double h = std::min(cfg.max_step, (t_end - q0.t) / 100.0);
    std::size_t next_sample = 0;
    std::size_t consecutive_rejections = 0;
    const double t_snap = 1e-12 * std::max(1.0, std::abs(t_end));

    while (t < t_end) {
        h = std::min(h, t_end - t);
        if (stepper.stats.steps_accepted + stepper.stats.steps_rejected >= cfg.max_steps) {
            throw StepLimitExceededError(t);
        }

        const auto step = attempt_step(stepper, y, t, h, k1);
        const bool node_hit = !step;
        const bool accepted = step && step->error <= 1.0;

        if (!accepted) {
            ++consecutive_rejections;
            if (node_hit) {
                ++stepper.stats.node_rejections;
                h *= 0.5;
            } else {
                ++stepper.stats.steps_rejected;
                h *= std::max(0.2, 0.9 * std::pow(step->error, -0.2));
            }
            if (h < cfg.min_step) {
                if (node_hit) {
                    return truncate(TrajectoryStatus::TruncatedAtNode,
                                    "node encountered at t = " + std::to_string(t));
                }
                throw StepLimitExceededError(t);
            }
            if (consecutive_rejections > 200) {
                throw StepLimitExceededError(t);
            }
            continue;
        }
        consecutive_rejections = 0;

        const double step_start = t;
        double t1 = step_start + h;
        if (t_end - t1 <= t_snap) t1 = t_end;

        // dense output for every requested time inside this step
        const DenseCoefficients dense(y, *step, h);
        while (next_sample < wanted.size() && wanted[next_sample] <= t1 + t_snap) {
            const double ts = std::min(wanted[next_sample], t1);
            const double theta = std::clamp((ts - step_start) / h, 0.0, 1.0);
            record(dense.at(theta), ts);
            ++next_sample;
        }

        ++stepper.stats.steps_accepted;
        stepper.stats.accumulated_error += step->error_abs;
        y = step->y1;
        k1 = step->k[6];  // FSAL
        t = t1;

        if (cfg.resymmetrize) {
            const double xm = 0.5 * (y[0] - y[2]);
            const double ym = 0.5 * (y[1] + y[3]);
            y[0] = xm;
            y[2] = -xm;
            y[1] = ym;
            y[3] = ym;
            const auto k = stepper.rhs(y, t);
            if (!k) {
                return truncate(TrajectoryStatus::TruncatedAtNode,
                                "node encountered after re-symmetrization");
            }
            k1 = *k;
        }

        const double grow = std::min(5.0, std::max(0.2, 0.9 * std::pow(step->error, -0.2)));
        h = std::min(cfg.max_step, h * grow);
    }

    traj.end_time = t;
    traj.stats = stepper.stats;
    return traj;
}

std::vector<Trajectory> integrate_batch(const TwoParticleWaveFunction& w,
                                        std::span<const ConfigurationPoint> initial_points,
                                        double t_end, const IntegratorConfig& cfg,
                                        std::span<const double> sample_times,
                                        unsigned n_threads)
{
    std::vector<Trajectory> out(initial_points.size());

    auto run_one = [&](std::size_t i) {
        try {
            out[i] = integrate_trajectory(w, initial_points[i], t_end, cfg, sample_times);
        } catch (const SimulationError& err) {
            out[i].status = TrajectoryStatus::StepControlFailed;
            out[i].failure_message = err.what();
            out[i].end_time = initial_points[i].t;
        }
    };

    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, initial_points.size());

    if (n_threads <= 1) {
        for (std::size_t i = 0; i < initial_points.size(); ++i) run_one(i);
        return out;
    }

    // each trajectory is a pure function of its inputs and writes only its
    // own slot, so the result is independent of scheduling
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < initial_points.size();
             i = next.fetch_add(1)) {
            run_one(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace dbb
