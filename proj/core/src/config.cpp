#include "dbbsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbbsim/errors.hpp"

namespace dbb {

namespace {

using nlohmann::ordered_json;

std::string mode_name(StatisticsMode mode)
{
    switch (mode) {
        case StatisticsMode::Bosonic: return "bosonic";
        case StatisticsMode::MaxwellBoltzmann: return "maxwell_boltzmann";
        case StatisticsMode::SingleParticle: return "single_particle";
    }
    return "bosonic";
}

StatisticsMode mode_from_name(const std::string& name, const std::string& path)
{
    if (name == "bosonic") return StatisticsMode::Bosonic;
    if (name == "maxwell_boltzmann") return StatisticsMode::MaxwellBoltzmann;
    if (name == "single_particle") return StatisticsMode::SingleParticle;
    throw ConfigError(path, "unknown statistics mode '" + name + "'");
}

ordered_json ensemble_spec_json(const EnsembleSpec& spec)
{
    return {
        {"kind", spec.kind == EnsembleKind::Gibbs ? "gibbs" : "time"},
        {"size", spec.size},
        {"seed", spec.seed},
        {"constraint_width", spec.constraint_width},
        {"independent_y", spec.independent_y},
    };
}

ordered_json sizes_json(const ExperimentConfig::EnsembleSizes& s)
{
    return {
        {"size", s.size},
        {"seed", s.seed},
        {"constraint_width", s.constraint_width},
        {"independent_y", s.independent_y},
    };
}

ordered_json pair_json(const DetectorPair& p)
{
    return {
        {"p_min", p.p.x_min}, {"p_max", p.p.x_max}, {"q_min", p.q.x_min},
        {"q_max", p.q.x_max}, {"allow_overlap", p.allow_overlap},
    };
}

ordered_json to_json(const ExperimentConfig& c)
{
    ordered_json j;
    j["constants"] = {{"hbar", c.constants.hbar}, {"mass", c.constants.mass}};
    j["geometry"] = {{"d", c.geometry.d},
                     {"sigma_x", c.geometry.sigma_x},
                     {"sigma_y", c.geometry.sigma_y},
                     {"forward_speed", c.geometry.forward_speed},
                     {"screen_y", c.geometry.screen_y}};
    j["statistics_mode"] = mode_name(c.statistics_mode);
    j["integrator"] = {{"rel_tol", c.integrator.rel_tol},
                       {"abs_tol", c.integrator.abs_tol},
                       {"max_step", c.integrator.max_step},
                       {"min_step", c.integrator.min_step},
                       {"node_epsilon", c.integrator.node_epsilon},
                       {"resymmetrize", c.integrator.resymmetrize},
                       {"max_steps", c.integrator.max_steps}};
    j["ensemble"] = ensemble_spec_json(c.ensemble);
    j["detect"] = {{"gibbs", sizes_json(c.detect.gibbs)},
                   {"time", sizes_json(c.detect.time)},
                   {"single_trials", c.detect.single_trials},
                   {"single_seed", c.detect.single_seed},
                   {"mode", c.detect.mode == PairMode::UnorderedPair ? "unordered" : "ordered"},
                   {"pairs", ordered_json::array()}};
    for (const auto& p : c.detect.pairs) j["detect"]["pairs"].push_back(pair_json(p));
    j["scan"] = {{"center_start", c.scan.center_start},
                 {"center_stop", c.scan.center_stop},
                 {"center_step", c.scan.center_step},
                 {"width", c.scan.width},
                 {"q_offset", c.scan.q_offset}};
    j["trajectories"] = {{"count", c.trajectories.count},
                         {"sample_dt", c.trajectories.sample_dt}};
    j["verify"] = {{"symmetry_points", c.verify.symmetry_points},
                   {"continuity_points", c.verify.continuity_points},
                   {"equivariance_n", c.verify.equivariance_n},
                   {"bins", c.verify.bins},
                   {"newton_trajectories", c.verify.newton_trajectories},
                   {"newton_checkpoints", c.verify.newton_checkpoints},
                   {"seed", c.verify.seed}};
    j["detection_time"] = c.detection_time;
    j["sample_dt"] = c.sample_dt;
    j["output_dir"] = c.output_dir;
    return j;
}

// Reads `j[key]` with type checking; `path` names the field in diagnostics.
template <typename T>
void read_field(const ordered_json& j, const char* key, T& out, const std::string& path)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + "." + key, e.what());
    }
}

ExperimentConfig::EnsembleSizes read_sizes(const ordered_json& j, const std::string& path,
                                           ExperimentConfig::EnsembleSizes defaults)
{
    ExperimentConfig::EnsembleSizes out = defaults;
    read_field(j, "size", out.size, path);
    read_field(j, "seed", out.seed, path);
    read_field(j, "constraint_width", out.constraint_width, path);
    read_field(j, "independent_y", out.independent_y, path);
    return out;
}

ExperimentConfig from_json(const ordered_json& j)
{
    ExperimentConfig c;
    if (j.contains("constants")) {
        read_field(j["constants"], "hbar", c.constants.hbar, "constants");
        read_field(j["constants"], "mass", c.constants.mass, "constants");
    }
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        read_field(g, "d", c.geometry.d, "geometry");
        read_field(g, "sigma_x", c.geometry.sigma_x, "geometry");
        read_field(g, "sigma_y", c.geometry.sigma_y, "geometry");
        read_field(g, "forward_speed", c.geometry.forward_speed, "geometry");
        read_field(g, "screen_y", c.geometry.screen_y, "geometry");
    }
    if (j.contains("statistics_mode")) {
        c.statistics_mode
            = mode_from_name(j["statistics_mode"].get<std::string>(), "statistics_mode");
    }
    if (j.contains("integrator")) {
        const auto& g = j["integrator"];
        read_field(g, "rel_tol", c.integrator.rel_tol, "integrator");
        read_field(g, "abs_tol", c.integrator.abs_tol, "integrator");
        read_field(g, "max_step", c.integrator.max_step, "integrator");
        read_field(g, "min_step", c.integrator.min_step, "integrator");
        read_field(g, "node_epsilon", c.integrator.node_epsilon, "integrator");
        read_field(g, "resymmetrize", c.integrator.resymmetrize, "integrator");
        read_field(g, "max_steps", c.integrator.max_steps, "integrator");
    }
    if (j.contains("ensemble")) {
        const auto& g = j["ensemble"];
        if (g.contains("kind")) {
            const std::string kind = g["kind"].get<std::string>();
            if (kind == "gibbs") {
                c.ensemble.kind = EnsembleKind::Gibbs;
            } else if (kind == "time") {
                c.ensemble.kind = EnsembleKind::TimeEnsemble;
            } else {
                throw ConfigError("ensemble.kind", "must be 'gibbs' or 'time'");
            }
        }
        read_field(g, "size", c.ensemble.size, "ensemble");
        read_field(g, "seed", c.ensemble.seed, "ensemble");
        read_field(g, "constraint_width", c.ensemble.constraint_width, "ensemble");
        read_field(g, "independent_y", c.ensemble.independent_y, "ensemble");
    }
    if (j.contains("detect")) {
        const auto& g = j["detect"];
        if (g.contains("gibbs")) c.detect.gibbs = read_sizes(g["gibbs"], "detect.gibbs",
                                                             c.detect.gibbs);
        if (g.contains("time")) c.detect.time = read_sizes(g["time"], "detect.time",
                                                           c.detect.time);
        read_field(g, "single_trials", c.detect.single_trials, "detect");
        read_field(g, "single_seed", c.detect.single_seed, "detect");
        if (g.contains("mode")) {
            const std::string m = g["mode"].get<std::string>();
            if (m == "unordered") {
                c.detect.mode = PairMode::UnorderedPair;
            } else if (m == "ordered") {
                c.detect.mode = PairMode::OrderedPair;
            } else {
                throw ConfigError("detect.mode", "must be 'unordered' or 'ordered'");
            }
        }
        if (g.contains("pairs")) {
            c.detect.pairs.clear();
            std::size_t idx = 0;
            for (const auto& pj : g["pairs"]) {
                const std::string path = "detect.pairs[" + std::to_string(idx++) + "]";
                DetectorPair pair;
                read_field(pj, "p_min", pair.p.x_min, path);
                read_field(pj, "p_max", pair.p.x_max, path);
                read_field(pj, "q_min", pair.q.x_min, path);
                read_field(pj, "q_max", pair.q.x_max, path);
                read_field(pj, "allow_overlap", pair.allow_overlap, path);
                c.detect.pairs.push_back(pair);
            }
        }
    }
    if (j.contains("scan")) {
        const auto& g = j["scan"];
        read_field(g, "center_start", c.scan.center_start, "scan");
        read_field(g, "center_stop", c.scan.center_stop, "scan");
        read_field(g, "center_step", c.scan.center_step, "scan");
        read_field(g, "width", c.scan.width, "scan");
        read_field(g, "q_offset", c.scan.q_offset, "scan");
    }
    if (j.contains("trajectories")) {
        const auto& g = j["trajectories"];
        read_field(g, "count", c.trajectories.count, "trajectories");
        read_field(g, "sample_dt", c.trajectories.sample_dt, "trajectories");
    }
    if (j.contains("verify")) {
        const auto& g = j["verify"];
        read_field(g, "symmetry_points", c.verify.symmetry_points, "verify");
        read_field(g, "continuity_points", c.verify.continuity_points, "verify");
        read_field(g, "equivariance_n", c.verify.equivariance_n, "verify");
        read_field(g, "bins", c.verify.bins, "verify");
        read_field(g, "newton_trajectories", c.verify.newton_trajectories, "verify");
        read_field(g, "newton_checkpoints", c.verify.newton_checkpoints, "verify");
        read_field(g, "seed", c.verify.seed, "verify");
    }
    read_field(j, "detection_time", c.detection_time, "");
    read_field(j, "sample_dt", c.sample_dt, "");
    read_field(j, "output_dir", c.output_dir, "");
    return c;
}

// `--set a.b.c=value`: value parsed as JSON when possible, as a string
// otherwise.
void apply_override(ordered_json& j, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("", "override '" + assignment + "' is not of the form path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    ordered_json value;
    try {
        value = ordered_json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;  // bare string
    }

    ordered_json* node = &j;
    std::size_t begin = 0;
    while (true) {
        const auto dot = path.find('.', begin);
        const std::string key = path.substr(begin, dot - begin);
        if (key.empty()) throw ConfigError(path, "empty path segment in override");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        begin = dot + 1;
    }
}

void require(bool ok, const std::string& field, const std::string& message)
{
    if (!ok) throw ConfigError(field, message);
}

}  // namespace

ExperimentConfig ExperimentConfig::resolved() const
{
    ExperimentConfig c = *this;
    c.detection_time = resolved_detection_time();
    if (c.output_dir.empty()) {
        const char* env = std::getenv("DBBSIM_OUT");
        c.output_dir = env && *env ? env : "out";
    }
    return c;
}

void ExperimentConfig::validate() const
{
    require(constants.hbar > 0.0, "constants.hbar", "must be positive");
    require(constants.mass > 0.0, "constants.mass", "must be positive");
    require(geometry.d > 0.0, "geometry.d", "must be positive");
    require(geometry.sigma_x > 0.0, "geometry.sigma_x", "must be positive");
    require(geometry.sigma_y > 0.0, "geometry.sigma_y", "must be positive");
    require(geometry.forward_speed > 0.0, "geometry.forward_speed", "must be positive");
    require(geometry.screen_y > 0.0, "geometry.screen_y", "must be positive");
    require(integrator.rel_tol > 0.0, "integrator.rel_tol", "must be positive");
    require(integrator.abs_tol > 0.0, "integrator.abs_tol", "must be positive");
    require(integrator.min_step > 0.0, "integrator.min_step", "must be positive");
    require(integrator.max_step > integrator.min_step, "integrator.max_step",
            "must exceed min_step");
    require(integrator.node_epsilon > 0.0, "integrator.node_epsilon", "must be positive");
    require(ensemble.size >= 1, "ensemble.size", "must be at least 1");
    require(ensemble.constraint_width >= 0.0, "ensemble.constraint_width",
            "must be nonnegative");
    require(detect.gibbs.size >= 1, "detect.gibbs.size", "must be at least 1");
    require(detect.time.size >= 1, "detect.time.size", "must be at least 1");
    require(detect.single_trials >= 1, "detect.single_trials", "must be at least 1");
    std::size_t idx = 0;
    for (const auto& pair : detect.pairs) {
        const std::string path = "detect.pairs[" + std::to_string(idx++) + "]";
        require(pair.p.x_min < pair.p.x_max, path, "requires p_min < p_max");
        require(pair.q.x_min < pair.q.x_max, path, "requires q_min < q_max");
        require(!pair.p.overlaps(pair.q) || pair.allow_overlap, path,
                "windows overlap; set allow_overlap to permit this");
    }
    require(scan.center_step > 0.0, "scan.center_step", "must be positive");
    require(scan.center_stop >= scan.center_start, "scan.center_stop",
            "must be >= center_start");
    require(scan.width > 0.0, "scan.width", "must be positive");
    require(trajectories.count >= 1, "trajectories.count", "must be at least 1");
    require(trajectories.sample_dt > 0.0, "trajectories.sample_dt", "must be positive");
    require(verify.bins >= 4, "verify.bins", "must be at least 4");
    require(detection_time >= 0.0, "detection_time", "must be nonnegative");
    require(sample_dt > 0.0, "sample_dt", "must be positive");
}

std::string ExperimentConfig::to_json_string() const
{
    return to_json(*this).dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text,
                                                    const std::vector<std::string>& overrides)
{
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("", std::string("JSON parse error: ") + e.what());
    }
    for (const auto& o : overrides) apply_override(j, o);
    ExperimentConfig c = from_json(j);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path,
                                                  const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_string(buffer.str(), overrides);
}

ExperimentConfig ExperimentConfig::defaults(const std::vector<std::string>& overrides)
{
    const ExperimentConfig base;
    return from_json_string(to_json(base).dump(), overrides);
}

}  // namespace dbb
