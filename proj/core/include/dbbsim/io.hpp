#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dbbsim/detection.hpp"
#include "dbbsim/dynamics.hpp"
#include "dbbsim/ensemble.hpp"
#include "dbbsim/verification.hpp"

namespace dbb {

/// Shortest text form that parses back to exactly the same double
/// (17 significant digits).
std::string format_double(double value);

/// One row per sample time:
///   t,x1,y1,x2,y2,vx1,vy1,vx2,vy2,absPsi
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// Initial-point manifest `idx,x1,y1,x2,y2` plus a JSON sidecar carrying the
/// spec, sampler diagnostics and truncation count.
void write_ensemble_manifest(const std::filesystem::path& csv_path,
                             const std::filesystem::path& sidecar_path,
                             const Ensemble& ensemble);

/// Detection comparison rows:
///   xP_min,xP_max,xQ_min,xQ_max,sqt,gibbs_rate,gibbs_se,time_rate,time_se,discrepancy
void write_scan_csv(const std::filesystem::path& path, const std::vector<ScanRow>& rows);

/// One InvariantReport per line as a JSON object.
void write_reports_jsonl(const std::filesystem::path& path,
                         const std::vector<InvariantReport>& reports);

}  // namespace dbb
