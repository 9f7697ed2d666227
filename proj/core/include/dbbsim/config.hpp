#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dbbsim/detection.hpp"
#include "dbbsim/dynamics.hpp"
#include "dbbsim/ensemble.hpp"
#include "dbbsim/wavefunction.hpp"

namespace dbb {

/// Full experiment description. Parses from JSON, validates with field-path
/// diagnostics, and serializes back losslessly (doubles at full precision).
struct ExperimentConfig {
    PhysicalConstants constants;

    struct Geometry {
        double d = 5.0;  // slit half-separation
        double sigma_x = 1.0;
        double sigma_y = 1.0;
        double forward_speed = 5.0;
        double screen_y = 25.0;
    } geometry;

    StatisticsMode statistics_mode = StatisticsMode::Bosonic;

    IntegratorConfig integrator;

    /// Used by the `ensemble` and `trajectories` subcommands.
    EnsembleSpec ensemble{EnsembleKind::Gibbs, 2000, 12345, 0.0, false};

    struct EnsembleSizes {
        std::size_t size = 0;
        std::uint64_t seed = 0;
        double constraint_width = 0.0;
        bool independent_y = false;
    };

    struct Detect {
        EnsembleSizes gibbs{20000, 101, 0.0, false};
        EnsembleSizes time{10000, 202, 0.0, false};
        std::size_t single_trials = 10000;
        std::uint64_t single_seed = 303;
        /// Mirror-symmetric and asymmetric placements around the default
        /// interference region.
        std::vector<DetectorPair> pairs{
            {{0.25, 0.75}, {-0.75, -0.25}, false},
            {{2.0, 2.5}, {-2.5, -2.0}, false},
            {{4.0, 4.5}, {-4.5, -4.0}, false},
            {{2.0, 2.5}, {-8.0, -7.5}, false},
            {{1.0, 1.5}, {-3.0, -2.5}, false},
        };
        PairMode mode = PairMode::UnorderedPair;
    } detect;

    struct Scan {
        double center_start = 0.5;
        double center_stop = 4.5;
        double center_step = 0.5;
        double width = 0.5;
        /// Q is the mirror of P shifted by this offset; 0 keeps the pair
        /// mirror-symmetric.
        double q_offset = 0.0;
    } scan;

    struct Trajectories {
        std::size_t count = 10;
        double sample_dt = 0.1;
    } trajectories;

    struct Verify {
        std::size_t symmetry_points = 1000;
        std::size_t continuity_points = 1000;
        std::size_t equivariance_n = 20000;
        std::size_t bins = 50;
        std::size_t newton_trajectories = 10;
        std::size_t newton_checkpoints = 20;
        std::uint64_t seed = 7;
    } verify;

    /// 0 resolves to screen_y / forward_speed.
    double detection_time = 0.0;
    /// Recording grid spacing for ensemble trajectories.
    double sample_dt = 0.25;
    /// Empty resolves to $DBBSIM_OUT, then "out".
    std::string output_dir;

    /// Defaults with every derived quantity filled in (detection_time,
    /// output_dir). run.json echoes this resolved form.
    ExperimentConfig resolved() const;

    double resolved_detection_time() const
    {
        return detection_time > 0.0 ? detection_time
                                    : geometry.screen_y / geometry.forward_speed;
    }

    SlitGeometry slit_geometry() const
    {
        return {geometry.d, geometry.screen_y, geometry.forward_speed};
    }

    TwoParticleWaveFunction wavefunction() const
    {
        return TwoParticleWaveFunction::from_geometry(slit_geometry(), geometry.sigma_x,
                                                      geometry.sigma_y, constants,
                                                      statistics_mode);
    }

    /// Throws ConfigError naming the offending field.
    void validate() const;

    std::string to_json_string() const;

    static ExperimentConfig from_json_string(const std::string& text,
                                             const std::vector<std::string>& overrides = {});
    static ExperimentConfig from_json_file(const std::filesystem::path& path,
                                           const std::vector<std::string>& overrides = {});
    /// Built-in defaults plus overrides.
    static ExperimentConfig defaults(const std::vector<std::string>& overrides = {});
};

}  // namespace dbb
