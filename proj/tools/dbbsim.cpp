#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dbbsim/config.hpp"
#include "dbbsim/errors.hpp"
#include "dbbsim/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-particle double-slit pilot-wave simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;

    for (const auto& name : {"trajectories", "ensemble", "detect", "scan", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "experiment config (JSON)");
        sub->add_option("-s,--set", overrides,
                        "override a config field, e.g. --set geometry.d=5.0");
        sub->add_option("-o,--out", output_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string subcommand = app.get_subcommands().front()->get_name();

    if (!output_dir.empty()) {
        overrides.push_back("output_dir=\"" + output_dir + "\"");
    }

    dbb::ExperimentConfig config;
    try {
        config = config_path.empty()
                     ? dbb::ExperimentConfig::defaults(overrides)
                     : dbb::ExperimentConfig::from_json_file(config_path, overrides);
    } catch (const dbb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const dbb::RunOutcome outcome = dbb::run_subcommand(subcommand, config);
        for (const auto& artifact : outcome.artifacts) {
            std::cout << config.resolved().output_dir << '/' << artifact << '\n';
        }
        return outcome.exit_code == 0 ? kExitOk : kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
