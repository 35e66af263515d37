#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dbsim/config.hpp"

using namespace dbsim;

namespace {

// The complete default-configuration echo, frozen byte for byte. This is the
// determinism anchor for every resolved_config.json the driver writes.
const std::string kDefaultEcho = R"({
  "environment": {
    "a": 9.61,
    "b": 0.16,
    "mu_los_db": 1.0,
    "k_los": 10.39,
    "l_los": 0.05,
    "mu_nlos_db": 20.0,
    "k_nlos": 29.6,
    "l_nlos": 0.03,
    "carrier_hz": 2000000000.0,
    "speed_of_light": 299792458.0,
    "mbs_shadow_sigma_db": 10.0,
    "noise_psd_dbm_hz": -174.0,
    "bandwidth_hz": 10000000.0,
    "exclude_mbs_interference": false
  },
  "region": {
    "width": 500.0,
    "height": 500.0,
    "origin_x": 0.0,
    "origin_y": 0.0
  },
  "matern_presets": {
    "high": {
      "parent_intensity": 1.4e-05,
      "cluster_radius": 60.0,
      "daughters_per_cluster_mean": 22.3
    },
    "low": {
      "parent_intensity": 9.6e-05,
      "cluster_radius": 120.0,
      "daughters_per_cluster_mean": 3.25
    },
    "mid": {
      "parent_intensity": 4e-05,
      "cluster_radius": 60.0,
      "daughters_per_cluster_mean": 7.8
    }
  },
  "algorithm": {
    "epsilon": 0.001,
    "nu": 0.001,
    "alpha_init": 0.5,
    "max_inner": 20,
    "max_outer": 10,
    "rate_floor": 1e-12,
    "theta_b_deg": 60.0,
    "mbs_power_dbm": 46.0,
    "dbs_power_dbm": 36.0,
    "mbs_mast_m": 25.0,
    "h_min": 10.0,
    "h_max": 500.0,
    "penalty_form": "hinge"
  },
  "swarm": {
    "swarm_size": 30,
    "inertia": 0.72,
    "cognitive": 1.49,
    "social": 1.49,
    "max_iters": 60,
    "penalty_weight": 1000.0,
    "v_max": 0.0
  },
  "experiment": {
    "name": "single-run",
    "seeds": 100,
    "master_seed": 12345,
    "out_dir": "out",
    "cov_presets": [],
    "num_dbs": [
      3
    ],
    "theta_b_deg": [
      40.0,
      60.0,
      80.0
    ],
    "num_users": 60,
    "p_delay": 0.2,
    "verbose": false
  }
}
)";

std::string error_of(const std::string& json_text)
{
    try {
        parse_config(json_text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle)
{
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("default configuration echo is frozen byte for byte")
{
    CHECK(describe_config(default_config()) == kDefaultEcho);
}

TEST_CASE("blank text and whitespace yield the defaults")
{
    CHECK(describe_config(parse_config("")) == kDefaultEcho);
    CHECK(describe_config(parse_config("  \n\t  \r\n")) == kDefaultEcho);
}

TEST_CASE("describe then parse is the identity")
{
    const std::string doc = R"({
        "environment": {"carrier_hz": 2.5e9, "exclude_mbs_interference": true},
        "region": {"width": 800, "origin_x": -100},
        "matern_presets": {"mid": {"cluster_radius": 75}},
        "algorithm": {"theta_b_deg": 45, "penalty_form": "verbatim"},
        "swarm": {"swarm_size": 20},
        "experiment": {"name": "rate-cdf", "seeds": 7, "num_dbs": [2, 3],
                       "cov_presets": ["low", "high"], "master_seed": 9007199254740993}
    })";
    const SimConfig cfg = parse_config(doc);
    const std::string echo = describe_config(cfg);
    CHECK(describe_config(parse_config(echo)) == echo);
}

TEST_CASE("sections apply on top of the defaults")
{
    const SimConfig cfg = parse_config(R"({
        "environment": {"carrier_hz": 2.5e9},
        "region": {"width": 800},
        "matern_presets": {"mid": {"cluster_radius": 75}},
        "algorithm": {"theta_b_deg": 45},
        "swarm": {"swarm_size": 20},
        "experiment": {"name": "rate-cdf", "seeds": 7}
    })");
    CHECK(cfg.env.carrier_hz == 2.5e9);
    CHECK(cfg.env.k_los == 10.39);             // untouched neighbor
    CHECK(cfg.region.width == 800.0);
    CHECK(cfg.region.height == 500.0);         // untouched neighbor
    CHECK(cfg.matern_presets.at("mid").cluster_radius == 75.0);
    CHECK(cfg.matern_presets.at("mid").parent_intensity == 4.0e-5); // merge keeps the rest
    CHECK(cfg.matern_presets.at("low").cluster_radius == 120.0);
    CHECK(cfg.algo.theta_b_deg == 45.0);
    CHECK(cfg.algo.alpha_init == 0.5);
    CHECK(cfg.swarm.swarm_size == 20);
    CHECK(cfg.experiment.name == "rate-cdf");
    CHECK(cfg.experiment.seeds == 7);
    CHECK(cfg.experiment.master_seed == 12345);
}

TEST_CASE("range errors name the offending key path and the allowed range")
{
    CHECK(contains(error_of(R"({"algorithm":{"theta_b_deg":200}})"), "algorithm.theta_b_deg"));
    CHECK(contains(error_of(R"({"algorithm":{"theta_b_deg":200}})"), "200"));
    CHECK(contains(error_of(R"({"algorithm":{"theta_b_deg":200}})"), "(0, 180)"));
    CHECK(contains(error_of(R"({"algorithm":{"alpha_init":1.0}})"), "[0, 1)"));
    CHECK(contains(error_of(R"({"swarm":{"inertia":1.5}})"), "swarm.inertia"));
    CHECK(contains(error_of(R"({"experiment":{"p_delay":-0.1}})"), "experiment.p_delay"));
    CHECK(contains(error_of(R"({"environment":{"carrier_hz":0}})"), "environment.carrier_hz"));
    CHECK(contains(error_of(R"({"experiment":{"theta_b_deg":[60,190]}})"),
                   "experiment.theta_b_deg[1]"));
    CHECK(contains(error_of(R"({"experiment":{"master_seed":-3}})"), "non-negative"));
    CHECK_THROWS_AS(parse_config(R"({"algorithm":{"theta_b_deg":200}})"), std::invalid_argument);
}

TEST_CASE("experiment name errors list every available experiment")
{
    const std::string msg = error_of(R"({"experiment":{"name":"bogus"}})");
    CHECK(contains(msg, "association-count"));
    CHECK(contains(msg, "beamwidth-sweep"));
    CHECK(contains(msg, "rate-cdf"));
    CHECK(contains(msg, "single-run"));
}

TEST_CASE("unknown keys and sections are rejected by path")
{
    CHECK(contains(error_of(R"({"environment":{"bogus":1}})"), "environment.bogus"));
    CHECK(contains(error_of(R"({"bogus":{}})"), "unknown section"));
    CHECK(contains(error_of(R"({"bogus":{}})"), "matern_presets"));
}

TEST_CASE("type errors say what was expected")
{
    CHECK(contains(error_of(R"({"algorithm":{"max_inner":2.5}})"), "an integer"));
    CHECK(contains(error_of(R"({"environment":{"exclude_mbs_interference":"yes"}})"), "a boolean"));
    CHECK(contains(error_of(R"({"experiment":{"num_dbs":3}})"), "array"));
}

TEST_CASE("parse errors carry line and column")
{
    const std::string msg = error_of("{\n  \"region\": }\n");
    CHECK(contains(msg, "parse error"));
    CHECK(contains(msg, "line 2"));
    CHECK(contains(msg, "column 13"));
    CHECK_THROWS_AS(parse_config("{\"a\": \"b"), std::runtime_error);
}

TEST_CASE("preset labels are validated and listed")
{
    const std::string msg = error_of(R"({"experiment":{"cov_presets":["nope"]}})");
    CHECK(contains(msg, "unknown preset \"nope\""));
    CHECK(contains(msg, "high, low, mid, uniform"));
    CHECK(contains(error_of(R"({"matern_presets":{"uniform":{"cluster_radius":10}}})"),
                   "built-in"));

    // A newly defined label becomes selectable.
    const SimConfig cfg = parse_config(R"({
        "matern_presets": {"ultra": {"parent_intensity": 1e-5, "cluster_radius": 30,
                                     "daughters_per_cluster_mean": 50}},
        "experiment": {"cov_presets": ["ultra", "uniform"]}
    })");
    CHECK(cfg.matern_presets.count("ultra") == 1);
    CHECK(resolved_cov_presets(cfg) == std::vector<std::string>{"ultra", "uniform"});
}

TEST_CASE("overrides parse values and re-validate")
{
    SimConfig cfg = default_config();
    apply_override(cfg, "algorithm.theta_b_deg", "72.5");
    CHECK(cfg.algo.theta_b_deg == 72.5);
    apply_override(cfg, "experiment.num_dbs", "[2,3]");
    CHECK(cfg.experiment.num_dbs == std::vector<int>{2, 3});
    apply_override(cfg, "experiment.cov_presets", R"(["low","high"])");
    CHECK(cfg.experiment.cov_presets == std::vector<std::string>{"low", "high"});
    apply_override(cfg, "experiment.out_dir", "runs/a"); // bare word becomes a string
    CHECK(cfg.experiment.out_dir == "runs/a");
    apply_override(cfg, "experiment.verbose", "true");
    CHECK(cfg.experiment.verbose);
    apply_override(cfg, "matern_presets.low.cluster_radius", "111");
    CHECK(cfg.matern_presets.at("low").cluster_radius == 111.0);
    apply_override(cfg, "algorithm.penalty_form", "verbatim");
    CHECK(cfg.algo.penalty_form == PenaltyForm::Verbatim);

    CHECK_THROWS_AS(apply_override(cfg, "algorithm.theta_b_deg", "200"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "experiment..x", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "nope.x", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "algorithm", "1"), std::invalid_argument);
}

TEST_CASE("per-experiment default preset lists")
{
    SimConfig cfg = default_config();
    cfg.experiment.name = "rate-cdf";
    CHECK(resolved_cov_presets(cfg) == std::vector<std::string>{"low", "high"});
    cfg.experiment.name = "association-count";
    CHECK(resolved_cov_presets(cfg) == std::vector<std::string>{"low", "mid", "high"});
    cfg.experiment.name = "beamwidth-sweep";
    CHECK(resolved_cov_presets(cfg) == std::vector<std::string>{"mid"});
    cfg.experiment.name = "single-run";
    CHECK(resolved_cov_presets(cfg) == std::vector<std::string>{"mid"});
    cfg.experiment.cov_presets = {"uniform"};
    CHECK(resolved_cov_presets(cfg) == std::vector<std::string>{"uniform"});
}

TEST_CASE("load_config reads files and reports missing paths")
{
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "dbsim_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"experiment": {"name": "beamwidth-sweep", "seeds": 5}})";
    }
    const SimConfig cfg = load_config(path.string());
    CHECK(cfg.experiment.name == "beamwidth-sweep");
    CHECK(cfg.experiment.seeds == 5);
    {
        std::ofstream out(path); // truncate to empty: defaults
    }
    CHECK(describe_config(load_config(path.string())) == kDefaultEcho);
    fs::remove(path);

    try {
        load_config("/nonexistent/dbsim.json");
        CHECK(false);
    } catch (const std::runtime_error& e) {
        CHECK(contains(e.what(), "/nonexistent/dbsim.json"));
    }
}

TEST_CASE("large master seeds survive the JSON roundtrip")
{
    const SimConfig cfg = parse_config(R"({"experiment":{"master_seed":9007199254740993}})");
    CHECK(cfg.experiment.master_seed == 9007199254740993ULL);
    const SimConfig back = parse_config(describe_config(cfg));
    CHECK(back.experiment.master_seed == 9007199254740993ULL);
}
