// Batch experiment driver for the dbsim shared library. Every solver knob
// comes from the JSON config; the flags below override the corresponding
// config keys and then hand the resolved configuration to the library.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dbsim.h>

namespace {

std::string json_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out + "\"";
}

std::string json_int_list(const std::vector<int>& xs)
{
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i != 0 ? "," : "") + std::to_string(xs[i]);
    return out + "]";
}

std::string json_double_list(const std::vector<double>& xs)
{
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
        out += (i != 0 ? "," : "") + std::string(buf);
    }
    return out + "]";
}

std::string json_string_list(const std::vector<std::string>& xs)
{
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i != 0 ? "," : "") + json_quote(xs[i]);
    return out + "]";
}

int bail(dbsim_status status)
{
    std::fprintf(stderr, "error: %s\n", dbsim_last_error());
    return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"dbsim simulate: drone base-station placement experiments"};

    std::string config_path;
    std::string experiment;
    int seeds = -1;
    std::string out_dir;
    std::vector<std::string> target_cov;
    std::vector<int> num_dbs;
    std::vector<double> theta_b;
    bool exclude_mbs = false;
    std::string penalty_form;
    bool verbose = false;
    bool validate_only = false;

    app.add_option("--config", config_path, "JSON configuration file (omit for defaults)");
    app.add_option("--experiment", experiment,
                   "experiment name: rate-cdf, association-count, beamwidth-sweep, single-run");
    app.add_option("--seeds", seeds, "Monte Carlo runs per preset")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--target-cov", target_cov,
                   "clustering preset(s): low, mid, high, uniform (comma separated)")
        ->delimiter(',');
    app.add_option("--num-dbs", num_dbs, "drone count(s) (comma separated)")->delimiter(',');
    app.add_option("--theta-b", theta_b, "antenna beamwidth(s) in degrees (comma separated)")
        ->delimiter(',');
    app.add_flag("--exclude-mbs-interference", exclude_mbs,
                 "drop the macro station from drone-user interference sums");
    app.add_option("--penalty-form", penalty_form, "placement penalty form")
        ->check(CLI::IsMember({"hinge", "verbatim"}));
    app.add_flag("--verbose", verbose, "print per-run JSON trace lines");
    app.add_flag("--validate", validate_only,
                 "echo the fully resolved configuration as JSON and exit");

    CLI11_PARSE(app, argc, argv);

    dbsim_config* cfg = nullptr;
    dbsim_status status = config_path.empty() ? dbsim_config_create(&cfg)
                                              : dbsim_config_load(config_path.c_str(), &cfg);
    if (status != DBSIM_OK) return bail(status);
    const std::unique_ptr<dbsim_config, void (*)(dbsim_config*)> guard(cfg, dbsim_config_free);

    const std::vector<std::pair<std::string, std::string>> overrides = [&] {
        std::vector<std::pair<std::string, std::string>> v;
        if (!experiment.empty()) v.emplace_back("experiment.name", json_quote(experiment));
        if (seeds > 0) v.emplace_back("experiment.seeds", std::to_string(seeds));
        if (!out_dir.empty()) v.emplace_back("experiment.out_dir", json_quote(out_dir));
        if (!target_cov.empty())
            v.emplace_back("experiment.cov_presets", json_string_list(target_cov));
        if (!num_dbs.empty()) v.emplace_back("experiment.num_dbs", json_int_list(num_dbs));
        if (!theta_b.empty()) {
            v.emplace_back("experiment.theta_b_deg", json_double_list(theta_b));
            // A single beamwidth also steers the non-sweep experiments.
            if (theta_b.size() == 1) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", theta_b[0]);
                v.emplace_back("algorithm.theta_b_deg", buf);
            }
        }
        if (exclude_mbs) v.emplace_back("environment.exclude_mbs_interference", "true");
        if (!penalty_form.empty()) v.emplace_back("algorithm.penalty_form", json_quote(penalty_form));
        if (verbose) v.emplace_back("experiment.verbose", "true");
        return v;
    }();
    for (const auto& [key, value] : overrides) {
        status = dbsim_config_set(cfg, key.c_str(), value.c_str());
        if (status != DBSIM_OK) return bail(status);
    }

    if (validate_only) {
        char* echo = nullptr;
        status = dbsim_config_describe(cfg, &echo);
        if (status != DBSIM_OK) return bail(status);
        std::fputs(echo, stdout);
        dbsim_string_free(echo);
        return 0;
    }

    char* files = nullptr;
    status = dbsim_run_experiment(cfg, &files);
    if (status != DBSIM_OK) return bail(status);
    std::fputs(files, stdout);
    dbsim_string_free(files);
    return 0;
}
