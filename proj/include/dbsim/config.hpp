#ifndef DBSIM_CONFIG_HPP
#define DBSIM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dbsim/channel.hpp"
#include "dbsim/orchestrator.hpp"
#include "dbsim/placement.hpp"
#include "dbsim/scenario.hpp"

namespace dbsim {

/// What to run and how to aggregate it. An empty cov_presets list means
/// "use this experiment's default preset selection" (see
/// resolved_cov_presets).
struct ExperimentSpec {
    std::string name = "single-run";
    int seeds = 100;
    std::uint64_t master_seed = 12345;
    std::string out_dir = "out";
    std::vector<std::string> cov_presets;              // labels; "uniform" is built in
    std::vector<int> num_dbs = {3};
    std::vector<double> theta_b_deg = {40.0, 60.0, 80.0};
    int num_users = 60;
    double p_delay = 0.2;
    bool verbose = false;

    void validate() const;
};

/// Every tunable of a simulation campaign, fully resolved.
struct SimConfig {
    Environment env;
    Region region;
    std::map<std::string, MaternConfig> matern_presets; // keys: low, mid, high
    AlgoConfig algo;
    SwarmConfig swarm;
    ExperimentSpec experiment;

    void validate() const;
};

/// The built-in configuration: urban channel defaults, 500 m x 500 m region,
/// the three tuned clustering presets, and the solver defaults.
SimConfig default_config();

/// Experiment names accepted by the driver, sorted.
const std::vector<std::string>& experiment_names();

/// The preset labels usable in cov_presets (map keys plus "uniform"), sorted.
std::vector<std::string> available_presets(const SimConfig& cfg);

/// The preset list an experiment runs over: the spec's own list when
/// nonempty, otherwise the per-experiment default (rate-cdf: low, high;
/// association-count: low, mid, high; beamwidth-sweep and single-run: mid).
std::vector<std::string> resolved_cov_presets(const SimConfig& cfg);

/// Parses a JSON configuration text on top of the defaults. All sections
/// (environment, region, matern_presets, algorithm, swarm, experiment) and
/// all keys are optional; unknown keys are rejected. Empty or
/// whitespace-only text yields default_config(). Throws std::runtime_error
/// with line and column on malformed JSON and std::invalid_argument naming
/// the dotted key path, the value, and the allowed range on bad values.
SimConfig parse_config(const std::string& json_text);

/// Reads and parses a configuration file. A missing or unreadable file is an
/// error naming the path.
SimConfig load_config(const std::string& path);

/// Applies one dotted-path override, e.g.
/// apply_override(cfg, "algorithm.theta_b_deg", "60") or
/// apply_override(cfg, "experiment.num_dbs", "[2,3]"). The value is parsed
/// as JSON when possible; a bare word is taken as a string.
void apply_override(SimConfig& cfg, const std::string& key_path, const std::string& value);

/// Renders every resolved parameter as a stable JSON document (fixed key
/// order, two-space indent, trailing newline). Parsing the output and
/// describing it again is the identity.
std::string describe_config(const SimConfig& cfg);

} // namespace dbsim

#endif
