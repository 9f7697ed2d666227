#include "dbbsim/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dbbsim/errors.hpp"
#include "dbbsim/io.hpp"
#include "dbbsim/sampling.hpp"

namespace dbb {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<double> sample_grid(double dt, double t_end)
{
    std::vector<double> times;
    for (std::size_t k = 1; static_cast<double>(k) * dt < t_end; ++k) {
        times.push_back(static_cast<double>(k) * dt);
    }
    times.push_back(t_end);
    return times;
}

void write_json(const fs::path& path, const ordered_json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

void write_run_manifest(const fs::path& dir, const std::string& subcommand,
                        const ExperimentConfig& resolved, const std::vector<std::string>& files)
{
    ordered_json run;
    run["subcommand"] = subcommand;
    run["config"] = ordered_json::parse(resolved.to_json_string());
    run["artifacts"] = files;
    write_json(dir / "run.json", run);
}

std::vector<ConfigurationPoint> initial_points_for(const TwoParticleWaveFunction& w,
                                                   const EnsembleSpec& spec, std::size_t count)
{
    if (w.mode() == StatisticsMode::SingleParticle) {
        return sample_single_particle(w, 0.0, count, spec.seed).first;
    }
    if (spec.kind == EnsembleKind::TimeEnsemble) {
        return spec.independent_y
                   ? sample_slice_independent_y(w, 0.0, count, spec.seed).first
                   : sample_antisymmetric_slice(w, 0.0, count, spec.seed).first;
    }
    return sample_density(w, 0.0, count, spec.seed).first;
}

RunOutcome run_trajectories(const ExperimentConfig& cfg, const fs::path& dir)
{
    const TwoParticleWaveFunction w = cfg.wavefunction();
    const double T = cfg.resolved_detection_time();
    const auto points = initial_points_for(w, cfg.ensemble, cfg.trajectories.count);
    const auto times = sample_grid(cfg.trajectories.sample_dt, T);
    const auto trajectories = integrate_batch(w, points, T, cfg.integrator, times);

    RunOutcome out;
    ordered_json status = ordered_json::array();
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "traj_%05zu.csv", i);
        write_trajectory_csv(dir / name, trajectories[i]);
        out.artifacts.push_back(name);
        status.push_back({{"file", name},
                          {"complete", !trajectories[i].truncated()},
                          {"steps", trajectories[i].stats.steps_accepted},
                          {"min_abs_psi", trajectories[i].stats.min_abs_psi}});
    }
    write_json(dir / "trajectories.json", status);
    out.artifacts.push_back("trajectories.json");
    return out;
}

RunOutcome run_ensemble(const ExperimentConfig& cfg, const fs::path& dir)
{
    const TwoParticleWaveFunction w = cfg.wavefunction();
    const double T = cfg.resolved_detection_time();
    const auto times = sample_grid(cfg.sample_dt, T);
    const Ensemble ensemble = build_ensemble(w, cfg.ensemble, T, cfg.integrator, times);

    write_ensemble_manifest(dir / "ensemble_initial.csv", dir / "ensemble.json", ensemble);
    RunOutcome out;
    out.artifacts = {"ensemble_initial.csv", "ensemble.json"};
    return out;
}

ordered_json row_json(const ScanRow& r)
{
    return {{"p_min", r.pair.p.x_min},
            {"p_max", r.pair.p.x_max},
            {"q_min", r.pair.q.x_min},
            {"q_max", r.pair.q.x_max},
            {"sqt", r.sqt},
            {"gibbs_rate", r.gibbs_rate},
            {"gibbs_se", r.gibbs_se},
            {"time_rate", r.time_rate},
            {"time_se", r.time_se},
            {"discrepancy", r.discrepancy}};
}

RunOutcome run_detect(const ExperimentConfig& cfg, const fs::path& dir)
{
    const TwoParticleWaveFunction w = cfg.wavefunction();
    const double T = cfg.resolved_detection_time();
    RunOutcome out;

    if (cfg.statistics_mode == StatisticsMode::SingleParticle) {
        // one particle per trial: anti-coincidence counting plus the
        // quadrature single-window probabilities
        ordered_json results = ordered_json::array();
        const Interval y_band = effective_y_interval(w, T);
        const WavefunctionSnapshot snap = w.at_time(T);
        for (const auto& pair : cfg.detect.pairs) {
            const SingleParticleCounts counts = single_particle_anticoincidence(
                w, cfg.detect.single_trials, pair, T, cfg.detect.single_seed, cfg.integrator);
            auto window_probability = [&](const DetectorWindow& win) {
                const Interval domain[2] = {{win.x_min, win.x_max}, y_band};
                auto f = [&](std::span<const double> v) {
                    return snap.density(v[0], v[1], 0.0, 0.0);
                };
                return integrate(f, domain, {1e-8, 1e-12, 50'000'000});
            };
            results.push_back({{"p_min", pair.p.x_min},
                               {"p_max", pair.p.x_max},
                               {"q_min", pair.q.x_min},
                               {"q_max", pair.q.x_max},
                               {"trials", counts.coincidence.trials},
                               {"coincidences", counts.coincidence.coincidences},
                               {"p_rate", counts.p_rate},
                               {"p_se", counts.p_standard_error},
                               {"p_quadrature", window_probability(pair.p)},
                               {"q_rate", counts.q_rate},
                               {"q_se", counts.q_standard_error},
                               {"q_quadrature", window_probability(pair.q)}});
        }
        write_json(dir / "anticoincidence.json", results);
        out.artifacts = {"anticoincidence.json"};
        return out;
    }

    const EnsembleSpec gibbs_spec{EnsembleKind::Gibbs, cfg.detect.gibbs.size,
                                  cfg.detect.gibbs.seed, 0.0, false};
    const EnsembleSpec time_spec{EnsembleKind::TimeEnsemble, cfg.detect.time.size,
                                 cfg.detect.time.seed, cfg.detect.time.constraint_width,
                                 cfg.detect.time.independent_y};
    const std::vector<double> times{T};
    const Ensemble gibbs = build_ensemble(w, gibbs_spec, T, cfg.integrator, times);
    const Ensemble time_ens = build_ensemble(w, time_spec, T, cfg.integrator, times);
    const auto rows = discrepancy_scan(w, gibbs, time_ens, cfg.detect.pairs, T,
                                       cfg.detect.mode);

    // fixed-time readout diagnostic: how many pairs sit near the screen line
    const double band = 2.0 * packet_width(cfg.geometry.sigma_y, cfg.constants, T);

    write_scan_csv(dir / "results.csv", rows);
    ordered_json summary;
    summary["detection_time"] = T;
    summary["seeds"] = {{"gibbs", gibbs_spec.seed}, {"time", time_spec.seed}};
    summary["ensemble_sizes"] = {{"gibbs", gibbs_spec.size}, {"time", time_spec.size}};
    summary["screen_band"] = {
        {"center", cfg.geometry.screen_y},
        {"halfwidth", band},
        {"gibbs_fraction", screen_band_fraction(gibbs, cfg.geometry.screen_y, band, T)},
        {"time_fraction", screen_band_fraction(time_ens, cfg.geometry.screen_y, band, T)},
    };
    summary["rows"] = ordered_json::array();
    for (const auto& r : rows) summary["rows"].push_back(row_json(r));
    write_json(dir / "summary.json", summary);
    out.artifacts = {"results.csv", "summary.json"};
    return out;
}

RunOutcome run_scan(const ExperimentConfig& cfg, const fs::path& dir)
{
    const TwoParticleWaveFunction w = cfg.wavefunction();
    const double T = cfg.resolved_detection_time();

    std::vector<DetectorPair> placements;
    const double half = 0.5 * cfg.scan.width;
    for (double c = cfg.scan.center_start; c <= cfg.scan.center_stop + 1e-12;
         c += cfg.scan.center_step) {
        DetectorPair pair;
        pair.p = {c - half, c + half};
        const DetectorWindow mirror = pair.p.mirrored();
        pair.q = {mirror.x_min + cfg.scan.q_offset, mirror.x_max + cfg.scan.q_offset};
        if (pair.p.overlaps(pair.q)) pair.allow_overlap = true;
        placements.push_back(pair);
    }

    const EnsembleSpec gibbs_spec{EnsembleKind::Gibbs, cfg.detect.gibbs.size,
                                  cfg.detect.gibbs.seed, 0.0, false};
    const EnsembleSpec time_spec{EnsembleKind::TimeEnsemble, cfg.detect.time.size,
                                 cfg.detect.time.seed, cfg.detect.time.constraint_width,
                                 cfg.detect.time.independent_y};
    const std::vector<double> times{T};
    const Ensemble gibbs = build_ensemble(w, gibbs_spec, T, cfg.integrator, times);
    const Ensemble time_ens = build_ensemble(w, time_spec, T, cfg.integrator, times);
    const auto rows = discrepancy_scan(w, gibbs, time_ens, placements, T, cfg.detect.mode);

    write_scan_csv(dir / "scan.csv", rows);
    const double band = 2.0 * packet_width(cfg.geometry.sigma_y, cfg.constants, T);
    ordered_json sidecar;
    sidecar["detection_time"] = T;
    sidecar["screen_band"] = {
        {"center", cfg.geometry.screen_y},
        {"halfwidth", band},
        {"gibbs_fraction", screen_band_fraction(gibbs, cfg.geometry.screen_y, band, T)},
        {"time_fraction", screen_band_fraction(time_ens, cfg.geometry.screen_y, band, T)},
    };
    write_json(dir / "scan.json", sidecar);
    RunOutcome out;
    out.artifacts = {"scan.csv", "scan.json"};
    return out;
}

RunOutcome run_verify(const ExperimentConfig& cfg, const fs::path& dir)
{
    const TwoParticleWaveFunction w = cfg.wavefunction();
    const double T = cfg.resolved_detection_time();
    const auto& v = cfg.verify;

    std::vector<InvariantReport> reports;
    for (auto& r : symmetry_suite(w, v.symmetry_points, v.seed, T)) {
        reports.push_back(std::move(r));
    }
    reports.push_back(continuity_check(w, v.continuity_points, v.seed + 1, T));
    reports.push_back(continuity_decay_check(w, std::min<std::size_t>(v.continuity_points, 100),
                                             v.seed + 2, T));

    if (cfg.statistics_mode != StatisticsMode::SingleParticle) {
        for (auto& r :
             equivariance_test(w, v.equivariance_n, T, v.bins, v.seed + 3, cfg.integrator)) {
            reports.push_back(std::move(r));
        }

        // quantum-force diagnostic along a few density-weighted trajectories
        const auto starts = sample_density(w, 0.0, v.newton_trajectories, v.seed + 4).first;
        const auto times = sample_grid(cfg.sample_dt, T);
        const auto trajectories = integrate_batch(w, starts, T, cfg.integrator, times);
        double worst = 0.0;
        std::size_t tested = 0;
        for (const auto& traj : trajectories) {
            if (traj.truncated()) continue;
            const InvariantReport r
                = newton_diagnostic(traj, w, v.newton_checkpoints, cfg.integrator);
            worst = std::max(worst, r.max_violation);
            tested += r.samples_tested;
        }
        reports.push_back(make_report("newton_quantum_force", tested, worst, 1e-3));
    }

    // Maxwell-Boltzmann statistics must break exchange symmetry; verify the
    // suite can see the breakage
    if (cfg.statistics_mode == StatisticsMode::Bosonic) {
        const TwoParticleWaveFunction mb(w.packet_a(), w.packet_b(), w.constants(),
                                         StatisticsMode::MaxwellBoltzmann);
        const auto mb_reports = symmetry_suite(mb, std::min<std::size_t>(v.symmetry_points, 200),
                                               v.seed + 5, T);
        bool exchange_broken = false;
        for (const auto& r : mb_reports) {
            if (r.name == "exchange_symmetry" && !r.passed) exchange_broken = true;
        }
        reports.push_back(make_report("maxwell_boltzmann_breaks_exchange",
                                      std::min<std::size_t>(v.symmetry_points, 200),
                                      exchange_broken ? 0.0 : 1.0, 0.5));
    }

    write_reports_jsonl(dir / "reports.jsonl", reports);

    RunOutcome out;
    out.artifacts = {"reports.jsonl"};
    for (const auto& r : reports) {
        if (!r.passed) out.exit_code = 1;
    }
    return out;
}

}  // namespace

RunOutcome run_subcommand(const std::string& subcommand, const ExperimentConfig& config)
{
    const ExperimentConfig cfg = config.resolved();
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);

    RunOutcome out;
    if (subcommand == "trajectories") {
        out = run_trajectories(cfg, dir);
    } else if (subcommand == "ensemble") {
        out = run_ensemble(cfg, dir);
    } else if (subcommand == "detect") {
        out = run_detect(cfg, dir);
    } else if (subcommand == "scan") {
        out = run_scan(cfg, dir);
    } else if (subcommand == "verify") {
        out = run_verify(cfg, dir);
    } else {
        throw SimulationError("unknown subcommand '" + subcommand + "'");
    }

    write_run_manifest(dir, subcommand, cfg, out.artifacts);
    return out;
}

}  // namespace dbb
