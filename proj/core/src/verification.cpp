#include "dbbsim/verification.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dbbsim/detection.hpp"
#include "dbbsim/dynamics.hpp"
#include "dbbsim/errors.hpp"
#include "dbbsim/random.hpp"
#include "dbbsim/sampling.hpp"

namespace dbb {

namespace {

// One density-weighted random configuration at a random time in (0, t_max].
ConfigurationPoint random_configuration(const TwoParticleWaveFunction& w, RandomStream& rng,
                                        std::uint64_t point_seed, double t_max)
{
    const double t = rng.uniform(0.0, t_max);
    if (w.mode() == StatisticsMode::SingleParticle) {
        return sample_single_particle(w, t, 1, point_seed).first.front();
    }
    return sample_density(w, t, 1, point_seed).first.front();
}

double norm4(const std::array<double, 4>& v)
{
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

double& coordinate(ConfigurationPoint& q, int axis)
{
    switch (axis) {
        case 0: return q.x1;
        case 1: return q.y1;
        case 2: return q.x2;
        default: return q.y2;
    }
}

}  // namespace

InvariantReport make_report(std::string name, std::size_t samples, double max_violation,
                            double threshold)
{
    InvariantReport r;
    r.name = std::move(name);
    r.samples_tested = samples;
    r.max_violation = max_violation;
    r.threshold = threshold;
    r.passed = max_violation <= threshold;
    return r;
}

double continuity_residual(const TwoParticleWaveFunction& w, const ConfigurationPoint& q,
                           double dt, double node_epsilon)
{
    const WavefunctionEval e = w.evaluate(q);
    const double abs_psi = std::abs(e.value);
    const double node_threshold = node_epsilon * w.amplitude_scale(q.t);
    if (!(abs_psi > node_threshold)) {
        throw NodeProximityError(abs_psi, node_threshold);
    }

    // sum_i d_i (R^2 v_i) = (hbar/m) sum_i Im(conj(Psi) d_i^2 Psi); the
    // |d_i Psi|^2 cross terms are real and drop out of the imaginary part.
    const double factor = w.constants().hbar / w.constants().mass;
    double divergence = 0.0;
    for (int i = 0; i < 4; ++i) {
        divergence += factor * std::imag(std::conj(e.value) * e.second[i]);
    }

    ConfigurationPoint forward = q;
    forward.t = q.t + dt;
    ConfigurationPoint backward = q;
    backward.t = q.t - dt;
    const double ddt = (w.density(forward) - w.density(backward)) / (2.0 * dt);

    const double scale = std::max(std::abs(ddt), std::abs(divergence));
    if (scale < 1e-300) return 0.0;
    return std::abs(ddt + divergence) / scale;
}

Interval histogram_x_interval(const TwoParticleWaveFunction& w, double t)
{
    const auto& a = w.packet_a();
    const auto& b = w.packet_b();
    const auto& c = w.constants();
    const double ca = a.center_x + a.velocity_x * t;
    const double cb = b.center_x + b.velocity_x * t;
    const double width = std::max(packet_width(a.sigma_x, c, t), packet_width(b.sigma_x, c, t));
    return {std::min(ca, cb) - 4.0 * width, std::max(ca, cb) + 4.0 * width};
}

std::vector<double> quadrature_bin_masses(const TwoParticleWaveFunction& w, double t, int axis,
                                          Interval range, std::size_t bins,
                                          const QuadratureOptions& opt)
{
    if (axis != 0 && axis != 2) throw SimulationError("marginal axis must be 0 (x1) or 2 (x2)");
    const Interval x_full = effective_x_interval(w, t);
    const Interval y_full = effective_y_interval(w, t);
    const double bin_width = range.width() / static_cast<double>(bins);

    const WavefunctionSnapshot snap = w.at_time(t);
    std::vector<double> masses(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        const Interval bin{range.lo + bin_width * static_cast<double>(i),
                           range.lo + bin_width * static_cast<double>(i + 1)};
        Interval domain[4] = {x_full, y_full, x_full, y_full};
        domain[axis] = bin;
        auto integrand = [&](std::span<const double> v) {
            return snap.density(v[0], v[1], v[2], v[3]);
        };
        masses[i] = try_integrate(integrand, domain, opt).value;
    }
    return masses;
}

std::vector<double> quadrature_joint_masses(const TwoParticleWaveFunction& w, double t,
                                            Interval range, std::size_t bins,
                                            const QuadratureOptions& opt)
{
    const Interval y_full = effective_y_interval(w, t);
    const double bin_width = range.width() / static_cast<double>(bins);

    const WavefunctionSnapshot snap = w.at_time(t);
    std::vector<double> masses(bins * bins);
    for (std::size_t i = 0; i < bins; ++i) {
        for (std::size_t j = 0; j < bins; ++j) {
            const Interval bi{range.lo + bin_width * static_cast<double>(i),
                              range.lo + bin_width * static_cast<double>(i + 1)};
            const Interval bj{range.lo + bin_width * static_cast<double>(j),
                              range.lo + bin_width * static_cast<double>(j + 1)};
            const Interval domain[4] = {bi, y_full, bj, y_full};
            auto integrand = [&](std::span<const double> v) {
                return snap.density(v[0], v[1], v[2], v[3]);
            };
            masses[i * bins + j] = try_integrate(integrand, domain, opt).value;
        }
    }
    return masses;
}

PositionMoments quadrature_position_moments(const TwoParticleWaveFunction& w, double t,
                                            const QuadratureOptions& opt)
{
    const Interval x_full = effective_x_interval(w, t);
    const Interval y_full = effective_y_interval(w, t);
    const Interval domain[4] = {x_full, y_full, x_full, y_full};

    const WavefunctionSnapshot snap = w.at_time(t);
    auto moment = [&](int axis, int power) {
        auto integrand = [&, axis, power](std::span<const double> v) {
            const double weight = power == 1 ? v[axis] : v[axis] * v[axis];
            return weight * snap.density(v[0], v[1], v[2], v[3]);
        };
        return try_integrate(integrand, domain, opt).value;
    };

    PositionMoments m;
    m.mean_x1 = moment(0, 1);
    m.second_x1 = moment(0, 2);
    m.mean_x2 = moment(2, 1);
    m.second_x2 = moment(2, 2);
    return m;
}

std::vector<InvariantReport> equivariance_test(const TwoParticleWaveFunction& w, std::size_t n,
                                               double t, std::size_t bins, std::uint64_t seed,
                                               const IntegratorConfig& cfg, double tv_threshold)
{
    EnsembleSpec spec;
    spec.kind = EnsembleKind::Gibbs;
    spec.size = n;
    spec.seed = seed;

    std::vector<ConfigurationPoint> endpoints;
    if (t > 0.0) {
        const std::vector<double> times{t};
        const Ensemble ensemble = build_ensemble(w, spec, t, cfg, times);
        endpoints.reserve(ensemble.trajectories.size());
        for (const std::size_t i : ensemble.valid_indices()) {
            endpoints.push_back(ensemble.trajectories[i].at_time(t).point);
        }
    } else {
        endpoints = sample_density(w, 0.0, n, seed).first;
    }
    const std::size_t m = endpoints.size();

    const Interval range = histogram_x_interval(w, t);
    const double bin_width = range.width() / static_cast<double>(bins);

    auto tv_distance = [](const std::vector<double>& emp, const std::vector<double>& quad,
                          double emp_overflow, double quad_overflow) {
        double tv = std::abs(emp_overflow - quad_overflow);
        for (std::size_t i = 0; i < emp.size(); ++i) tv += std::abs(emp[i] - quad[i]);
        return 0.5 * tv;
    };

    auto empirical_1d = [&](int axis) {
        std::vector<double> h(bins, 0.0);
        double overflow = 0.0;
        const double unit = 1.0 / static_cast<double>(m);
        for (const auto& p : endpoints) {
            const double x = axis == 0 ? p.x1 : p.x2;
            const double u = (x - range.lo) / bin_width;
            if (u < 0.0 || u >= static_cast<double>(bins)) {
                overflow += unit;
            } else {
                h[static_cast<std::size_t>(u)] += unit;
            }
        }
        return std::pair{h, overflow};
    };

    std::vector<InvariantReport> reports;

    for (const int axis : {0, 2}) {
        const auto [emp, emp_overflow] = empirical_1d(axis);
        const std::vector<double> quad = quadrature_bin_masses(w, t, axis, range, bins);
        double quad_total = 0.0;
        for (const double q : quad) quad_total += q;
        const double quad_overflow = std::max(0.0, 1.0 - quad_total);
        const double tv = tv_distance(emp, quad, emp_overflow, quad_overflow);
        reports.push_back(make_report(axis == 0 ? "equivariance_tv_x1" : "equivariance_tv_x2", m,
                                      tv, tv_threshold));
    }

    {
        const std::size_t joint_bins
            = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(
                                           static_cast<double>(bins))));
        const double jw = range.width() / static_cast<double>(joint_bins);
        std::vector<double> emp(joint_bins * joint_bins, 0.0);
        double emp_overflow = 0.0;
        const double unit = 1.0 / static_cast<double>(m);
        for (const auto& p : endpoints) {
            const double u = (p.x1 - range.lo) / jw;
            const double v = (p.x2 - range.lo) / jw;
            if (u < 0.0 || u >= static_cast<double>(joint_bins) || v < 0.0
                || v >= static_cast<double>(joint_bins)) {
                emp_overflow += unit;
            } else {
                emp[static_cast<std::size_t>(u) * joint_bins + static_cast<std::size_t>(v)]
                    += unit;
            }
        }
        const std::vector<double> quad = quadrature_joint_masses(w, t, range, joint_bins);
        double quad_total = 0.0;
        for (const double q : quad) quad_total += q;
        const double quad_overflow = std::max(0.0, 1.0 - quad_total);
        const double tv = tv_distance(emp, quad, emp_overflow, quad_overflow);
        reports.push_back(make_report("equivariance_tv_joint_x1x2", m, tv, tv_threshold));
    }

    // position moments vs. quadrature, in Monte Carlo standard errors
    {
        const PositionMoments qm = quadrature_position_moments(w, t);
        auto moment_reports = [&](int axis, double q_mean, double q_second) {
            double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
            for (const auto& p : endpoints) {
                const double x = axis == 0 ? p.x1 : p.x2;
                s1 += x;
                s2 += x * x;
                s3 += x * x * x;
                s4 += x * x * x * x;
            }
            const double dm = static_cast<double>(m);
            const double mean = s1 / dm;
            const double raw2 = s2 / dm;
            const double var = raw2 - mean * mean;
            const double raw3 = s3 / dm;
            const double raw4 = s4 / dm;
            // central moments for the variance standard error
            const double mu2 = var;
            const double mu4 = raw4 - 4.0 * mean * raw3 + 6.0 * mean * mean * raw2
                               - 3.0 * mean * mean * mean * mean;
            const double se_mean = std::sqrt(mu2 / dm);
            const double se_var = std::sqrt(std::max(mu4 - mu2 * mu2, 0.0) / dm);
            const double q_var = q_second - q_mean * q_mean;
            const std::string suffix = axis == 0 ? "x1" : "x2";
            reports.push_back(make_report("moment_mean_" + suffix, m,
                                          std::abs(mean - q_mean) / se_mean, 3.0));
            reports.push_back(make_report("moment_var_" + suffix, m,
                                          std::abs(var - q_var) / se_var, 3.0));
        };
        moment_reports(0, qm.mean_x1, qm.second_x1);
        moment_reports(2, qm.mean_x2, qm.second_x2);
    }

    return reports;
}

std::vector<InvariantReport> symmetry_suite(const TwoParticleWaveFunction& w,
                                            std::size_t n_points, std::uint64_t seed,
                                            double t_max)
{
    RandomStream rng(seed);
    const double v_char = w.constants().hbar
                          / (w.constants().mass
                             * std::min(w.packet_a().sigma_x, w.packet_a().sigma_y));

    double exchange_max = 0.0;
    double reflection_max = 0.0;
    double mirror_max = 0.0;
    double v_antisym_max = 0.0;
    double v_exchange_max = 0.0;
    double v_plane_max = 0.0;

    const bool two_particle = w.mode() != StatisticsMode::SingleParticle;

    for (std::size_t i = 0; i < n_points; ++i) {
        const ConfigurationPoint q = random_configuration(w, rng, seed + 1 + i, t_max);

        const std::complex<double> psi = w.value(q);
        const double scale = std::max(std::abs(psi), 1e-300);

        if (two_particle) {
            exchange_max = std::max(exchange_max,
                                    std::abs(psi - w.value(q.exchanged())) / scale);
        }
        reflection_max = std::max(reflection_max,
                                  std::abs(psi - w.value(q.reflected_in_x())) / scale);

        const std::complex<double> a
            = gaussian_packet_value(w.packet_a(), w.constants(), q.x1, q.y1, q.t);
        const std::complex<double> b
            = gaussian_packet_value(w.packet_b(), w.constants(), -q.x1, q.y1, q.t);
        mirror_max = std::max(mirror_max, std::abs(a - b) / std::max(std::abs(a), 1e-300));

        const auto v = try_velocity(w, q, 1e-12);
        const auto v_r = try_velocity(w, q.reflected_in_x(), 1e-12);
        if (v && v_r) {
            const double vscale = std::max({std::abs(v->velocity.vx1),
                                            std::abs(v_r->velocity.vx1), 1e-3 * v_char});
            v_antisym_max = std::max(v_antisym_max,
                                     std::abs(v->velocity.vx1 + v_r->velocity.vx1) / vscale);
        }
        if (two_particle) {
            const auto v_e = try_velocity(w, q.exchanged(), 1e-12);
            if (v && v_e) {
                const double vscale = std::max({std::abs(v->velocity.vx1),
                                                std::abs(v_e->velocity.vx2), 1e-3 * v_char});
                v_exchange_max = std::max(
                    v_exchange_max, std::abs(v->velocity.vx1 - v_e->velocity.vx2) / vscale);
            }
        }

        // both particles placed on the symmetry plane, transverse velocity
        // must vanish identically
        const ConfigurationPoint plane{0.0, q.y1, 0.0, q.y2, q.t};
        if (const auto vp = try_velocity(w, plane, 1e-12)) {
            v_plane_max = std::max({v_plane_max, std::abs(vp->velocity.vx1),
                                    std::abs(vp->velocity.vx2)});
        }
    }

    std::vector<InvariantReport> reports;
    if (two_particle) {
        reports.push_back(make_report("exchange_symmetry", n_points, exchange_max, 1e-12));
    }
    reports.push_back(make_report("reflection_symmetry", n_points, reflection_max, 1e-12));
    reports.push_back(make_report("mirror_slit_condition", n_points, mirror_max, 1e-12));
    reports.push_back(make_report("velocity_antisymmetry", n_points, v_antisym_max, 1e-10));
    if (two_particle) {
        reports.push_back(make_report("velocity_exchange", n_points, v_exchange_max, 1e-10));
    }
    reports.push_back(make_report("velocity_vanishes_on_plane", n_points, v_plane_max, 1e-12));
    return reports;
}

InvariantReport newton_diagnostic(const Trajectory& trajectory,
                                  const TwoParticleWaveFunction& w, std::size_t n_checkpoints,
                                  const IntegratorConfig& cfg, double dt, double h,
                                  double threshold)
{
    if (trajectory.samples.size() < 3) {
        throw SimulationError("newton_diagnostic requires a trajectory with several samples");
    }
    const double f_char = w.constants().hbar * w.constants().hbar
                          / (w.constants().mass
                             * std::pow(std::min(w.packet_a().sigma_x, w.packet_a().sigma_y), 3));

    IntegratorConfig tight = cfg;
    tight.rel_tol = std::min(cfg.rel_tol, 1e-10);
    tight.abs_tol = std::min(cfg.abs_tol, 1e-12);
    tight.max_step = dt;

    double max_deviation = 0.0;
    std::size_t tested = 0;
    std::size_t skipped = 0;

    // interior sample times, uniformly spread
    const std::size_t count = trajectory.samples.size();
    for (std::size_t k = 0; k < n_checkpoints; ++k) {
        const std::size_t idx = 1 + (k * (count - 2)) / std::max<std::size_t>(n_checkpoints, 1);
        if (idx + 1 >= count) break;
        const ConfigurationPoint q0 = trajectory.samples[idx].point;

        try {
            // forward micro-segment q(t) -> q(t+dt) -> q(t+2dt); the central
            // difference lands on the midpoint q(t+dt)
            const std::vector<double> times{q0.t + dt, q0.t + 2.0 * dt};
            const Trajectory seg = integrate_trajectory(w, q0, q0.t + 2.0 * dt, tight, times);
            if (seg.truncated()) {
                ++skipped;
                continue;
            }
            const TrajectorySample& mid = seg.at_time(q0.t + dt);
            const TrajectorySample& end = seg.at_time(q0.t + 2.0 * dt);
            const VelocitySample v0 = velocity_field(w, q0, 1e-12);
            const VelocitySample v2 = end.velocity;

            const double inv = 1.0 / (2.0 * dt);
            const double mass = w.constants().mass;
            const std::array<double, 4> force_fd = {
                mass * (v2.vx1 - v0.vx1) * inv, mass * (v2.vy1 - v0.vy1) * inv,
                mass * (v2.vx2 - v0.vx2) * inv, mass * (v2.vy2 - v0.vy2) * inv};

            std::array<double, 4> grad_q{};
            const ConfigurationPoint qc = mid.point;
            for (int i = 0; i < 4; ++i) {
                ConfigurationPoint plus = qc;
                ConfigurationPoint minus = qc;
                coordinate(plus, i) += h;
                coordinate(minus, i) -= h;
                grad_q[i] = (w.quantum_potential(plus) - w.quantum_potential(minus)) / (2.0 * h);
            }

            const std::array<double, 4> residual
                = {force_fd[0] + grad_q[0], force_fd[1] + grad_q[1], force_fd[2] + grad_q[2],
                   force_fd[3] + grad_q[3]};
            const double denom = std::max(norm4(force_fd), norm4(grad_q));
            ++tested;
            if (denom < 1e-9 * f_char) continue;  // both sides vanish: agreement
            max_deviation = std::max(max_deviation, norm4(residual) / denom);
        } catch (const NodeProximityError&) {
            ++skipped;
        }
    }

    InvariantReport r = make_report("newton_quantum_force", tested, max_deviation, threshold);
    if (tested == 0) r.passed = false;
    return r;
}

InvariantReport continuity_check(const TwoParticleWaveFunction& w, std::size_t n,
                                 std::uint64_t seed, double t_max, double dt, double threshold)
{
    RandomStream rng(seed);
    double max_residual = 0.0;
    std::size_t tested = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ConfigurationPoint q = random_configuration(w, rng, seed + 1 + i, t_max);
        // keep t - dt positive for the central difference
        q.t = std::max(q.t, 2.0 * dt);
        try {
            max_residual = std::max(max_residual, continuity_residual(w, q, dt));
            ++tested;
        } catch (const NodeProximityError&) {
        }
    }
    return make_report("continuity_residual", tested, max_residual, threshold);
}

InvariantReport continuity_decay_check(const TwoParticleWaveFunction& w, std::size_t n,
                                       std::uint64_t seed, double t_max, double dt)
{
    RandomStream rng(seed);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < n; ++i) {
        ConfigurationPoint q = random_configuration(w, rng, seed + 1 + i, t_max);
        q.t = std::max(q.t, 2.0 * dt);
        try {
            const double coarse = continuity_residual(w, q, dt);
            const double fine = continuity_residual(w, q, 0.5 * dt);
            if (fine > 1e-14) ratios.push_back(coarse / fine);
        } catch (const NodeProximityError&) {
        }
    }
    if (ratios.empty()) {
        return make_report("continuity_residual_decay", 0, 0.0, 0.0);
    }
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median = ratios[ratios.size() / 2];
    // second-order decay: halving dt divides the residual by about 4;
    // violation is how far the median falls below 2
    const double violation = median >= 2.0 ? 0.0 : 2.0 - median;
    InvariantReport r = make_report("continuity_residual_decay", ratios.size(), violation, 0.0);
    r.threshold = 0.0;
    r.passed = violation == 0.0;
    return r;
}

}  // namespace dbb
