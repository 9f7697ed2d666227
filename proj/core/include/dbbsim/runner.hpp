#pragma once

#include <string>
#include <vector>

#include "dbbsim/config.hpp"

namespace dbb {

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> artifacts;  // paths relative to the output directory
};

/// Executes one subcommand (`trajectories`, `ensemble`, `detect`, `scan`,
/// `verify`) against a validated config. Artifacts land in the resolved
/// output directory together with run.json, which echoes the fully resolved
/// config and seeds. Exit code 1 means a failed verification report;
/// runtime failures surface as exceptions.
RunOutcome run_subcommand(const std::string& subcommand, const ExperimentConfig& config);

}  // namespace dbb
