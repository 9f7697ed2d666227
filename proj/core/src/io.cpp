#include "dbbsim/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "dbbsim/errors.hpp"

namespace dbb {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
    if (!out) {
        throw SimulationError("cannot open " + path.string() + " for writing");
    }
    return out;
}

}  // namespace

std::string format_double(double value)
{
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory)
{
    auto out = open_for_write(path);
    out << "t,x1,y1,x2,y2,vx1,vy1,vx2,vy2,absPsi\n";
    for (const auto& s : trajectory.samples) {
        out << format_double(s.point.t) << ',' << format_double(s.point.x1) << ','
            << format_double(s.point.y1) << ',' << format_double(s.point.x2) << ','
            << format_double(s.point.y2) << ',' << format_double(s.velocity.vx1) << ','
            << format_double(s.velocity.vy1) << ',' << format_double(s.velocity.vx2) << ','
            << format_double(s.velocity.vy2) << ',' << format_double(s.abs_psi) << '\n';
    }
}

void write_ensemble_manifest(const std::filesystem::path& csv_path,
                             const std::filesystem::path& sidecar_path,
                             const Ensemble& ensemble)
{
    {
        auto out = open_for_write(csv_path);
        out << "idx,x1,y1,x2,y2\n";
        for (std::size_t i = 0; i < ensemble.initial_points.size(); ++i) {
            const auto& p = ensemble.initial_points[i];
            out << i << ',' << format_double(p.x1) << ',' << format_double(p.y1) << ','
                << format_double(p.x2) << ',' << format_double(p.y2) << '\n';
        }
    }

    nlohmann::ordered_json sidecar;
    sidecar["spec"] = {
        {"kind", ensemble.spec.kind == EnsembleKind::Gibbs ? "gibbs" : "time"},
        {"size", ensemble.spec.size},
        {"seed", ensemble.spec.seed},
        {"constraint_width", ensemble.spec.constraint_width},
        {"independent_y", ensemble.spec.independent_y},
    };
    sidecar["diagnostics"] = {
        {"proposals", ensemble.sampler_diagnostics.proposals},
        {"acceptance_rate", ensemble.sampler_diagnostics.acceptance_rate},
        {"max_density_seen", ensemble.sampler_diagnostics.max_density_seen},
    };
    sidecar["truncated_count"] = ensemble.truncated_count;
    sidecar["end_time"] = ensemble.end_time;

    auto out = open_for_write(sidecar_path);
    out << sidecar.dump(2) << '\n';
}

void write_scan_csv(const std::filesystem::path& path, const std::vector<ScanRow>& rows)
{
    auto out = open_for_write(path);
    out << "xP_min,xP_max,xQ_min,xQ_max,sqt,gibbs_rate,gibbs_se,time_rate,time_se,discrepancy\n";
    for (const auto& r : rows) {
        out << format_double(r.pair.p.x_min) << ',' << format_double(r.pair.p.x_max) << ','
            << format_double(r.pair.q.x_min) << ',' << format_double(r.pair.q.x_max) << ','
            << format_double(r.sqt) << ',' << format_double(r.gibbs_rate) << ','
            << format_double(r.gibbs_se) << ',' << format_double(r.time_rate) << ','
            << format_double(r.time_se) << ',' << format_double(r.discrepancy) << '\n';
    }
}

void write_reports_jsonl(const std::filesystem::path& path,
                         const std::vector<InvariantReport>& reports)
{
    auto out = open_for_write(path);
    for (const auto& r : reports) {
        nlohmann::ordered_json line = {
            {"name", r.name},
            {"samples_tested", r.samples_tested},
            {"max_violation", r.max_violation},
            {"threshold", r.threshold},
            {"passed", r.passed},
        };
        out << line.dump() << '\n';
    }
}

}  // namespace dbb
