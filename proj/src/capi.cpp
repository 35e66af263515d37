#include "dbsim.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "dbsim/config.hpp"
#include "dbsim/experiment.hpp"

struct dbsim_config {
    dbsim::SimConfig cfg;
};

struct dbsim_solution {
    dbsim::SimConfig cfg; // snapshot, for the JSON dump
    std::string cov_label;
    int num_dbs = 0;
    double theta_b_deg = 0.0;
    dbsim::RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

void clear_error() { g_last_error.clear(); }

dbsim_status fail(dbsim_status code, const std::string& message)
{
    g_last_error = message;
    return code;
}

/// Maps an in-flight exception onto a status code. Parse and I/O failures
/// are recognized by the stable prefixes the core puts in its messages.
dbsim_status map_exception()
{
    try {
        throw;
    } catch (const std::invalid_argument& e) {
        return fail(DBSIM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DBSIM_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        if (msg.find("parse error") != std::string::npos) return fail(DBSIM_ERR_PARSE, msg);
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("cannot write") != std::string::npos ||
            msg.find("write failed") != std::string::npos ||
            msg.find("cannot create output directory") != std::string::npos)
            return fail(DBSIM_ERR_IO, msg);
        return fail(DBSIM_ERR_RUNTIME, msg);
    } catch (...) {
        return fail(DBSIM_ERR_RUNTIME, "unknown error");
    }
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

dbsim_status require(bool ok, const char* what)
{
    if (ok) return DBSIM_OK;
    return fail(DBSIM_ERR_INVALID_ARGUMENT, std::string("null or invalid argument: ") + what);
}

} // namespace

extern "C" {

const char* dbsim_version(void) { return "1.0.0"; }

const char* dbsim_last_error(void) { return g_last_error.c_str(); }

dbsim_status dbsim_config_create(dbsim_config** out)
{
    if (require(out != nullptr, "out") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        *out = new dbsim_config{dbsim::default_config()};
        return DBSIM_OK;
    } catch (...) {
        *out = nullptr;
        return map_exception();
    }
}

dbsim_status dbsim_config_load(const char* path, dbsim_config** out)
{
    if (require(out != nullptr, "out") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    if (require(path != nullptr, "path") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        *out = new dbsim_config{dbsim::load_config(path)};
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

dbsim_status dbsim_config_parse(const char* json_text, dbsim_config** out)
{
    if (require(out != nullptr, "out") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    if (require(json_text != nullptr, "json_text") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        *out = new dbsim_config{dbsim::parse_config(json_text)};
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

dbsim_status dbsim_config_set(dbsim_config* cfg, const char* key_path, const char* value)
{
    if (require(cfg != nullptr, "cfg") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    if (require(key_path != nullptr, "key_path") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    if (require(value != nullptr, "value") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        dbsim::SimConfig updated = cfg->cfg; // strong exception guarantee
        dbsim::apply_override(updated, key_path, value);
        cfg->cfg = std::move(updated);
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

dbsim_status dbsim_config_describe(const dbsim_config* cfg, char** json_out)
{
    if (require(json_out != nullptr, "json_out") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    *json_out = nullptr;
    if (require(cfg != nullptr, "cfg") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        *json_out = dup_string(dbsim::describe_config(cfg->cfg));
        if (*json_out == nullptr) return fail(DBSIM_ERR_RUNTIME, "out of memory");
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

void dbsim_config_free(dbsim_config* cfg) { delete cfg; }

dbsim_status dbsim_run_experiment(const dbsim_config* cfg, char** files_out)
{
    if (files_out != nullptr) *files_out = nullptr;
    if (require(cfg != nullptr, "cfg") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        const dbsim::ExperimentResult result = dbsim::run_experiment(cfg->cfg);
        if (files_out != nullptr) {
            std::string joined;
            for (const auto& f : result.files) joined += f + "\n";
            *files_out = dup_string(joined);
            if (*files_out == nullptr) return fail(DBSIM_ERR_RUNTIME, "out of memory");
        }
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

dbsim_status dbsim_solve(const dbsim_config* cfg, const char* cov_label, int run_index,
                         int num_dbs, dbsim_solution** out)
{
    if (require(out != nullptr, "out") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    if (require(cfg != nullptr, "cfg") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        cfg->cfg.validate();
        const std::string label =
            cov_label != nullptr ? cov_label : dbsim::resolved_cov_presets(cfg->cfg).front();
        const int m = num_dbs >= 0 ? num_dbs : cfg->cfg.experiment.num_dbs.front();
        const double theta_b = cfg->cfg.algo.theta_b_deg;
        auto sol = new dbsim_solution{cfg->cfg, label, m, theta_b, {}};
        try {
            sol->outcome = dbsim::solve_run(cfg->cfg, label, run_index, m, theta_b);
        } catch (...) {
            delete sol;
            throw;
        }
        *out = sol;
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

dbsim_status dbsim_solution_alpha(const dbsim_solution* sol, double* out)
{
    if (require(sol != nullptr && out != nullptr, "sol/out") != DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    *out = sol->outcome.solution.alpha;
    return DBSIM_OK;
}

dbsim_status dbsim_solution_utility(const dbsim_solution* sol, double* out)
{
    if (require(sol != nullptr && out != nullptr, "sol/out") != DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    *out = sol->outcome.solution.report.utility;
    return DBSIM_OK;
}

dbsim_status dbsim_solution_num_users(const dbsim_solution* sol, int* out)
{
    if (require(sol != nullptr && out != nullptr, "sol/out") != DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    *out = static_cast<int>(sol->outcome.users.size());
    return DBSIM_OK;
}

dbsim_status dbsim_solution_num_dbs(const dbsim_solution* sol, int* out)
{
    if (require(sol != nullptr && out != nullptr, "sol/out") != DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    *out = static_cast<int>(sol->outcome.solution.dbs_positions.size());
    return DBSIM_OK;
}

dbsim_status dbsim_solution_dbs_position(const dbsim_solution* sol, int index, double* x,
                                         double* y, double* z)
{
    if (require(sol != nullptr && x != nullptr && y != nullptr && z != nullptr, "sol/x/y/z") !=
        DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    const auto& positions = sol->outcome.solution.dbs_positions;
    if (index < 0 || static_cast<std::size_t>(index) >= positions.size())
        return fail(DBSIM_ERR_INVALID_ARGUMENT,
                    "drone index out of range: " + std::to_string(index));
    *x = positions[static_cast<std::size_t>(index)].x;
    *y = positions[static_cast<std::size_t>(index)].y;
    *z = positions[static_cast<std::size_t>(index)].z;
    return DBSIM_OK;
}

dbsim_status dbsim_solution_assignment(const dbsim_solution* sol, int user_index, int* bs_out)
{
    if (require(sol != nullptr && bs_out != nullptr, "sol/bs_out") != DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    if (user_index < 0 || static_cast<std::size_t>(user_index) >= sol->outcome.users.size())
        return fail(DBSIM_ERR_INVALID_ARGUMENT,
                    "user index out of range: " + std::to_string(user_index));
    *bs_out = sol->outcome.solution.association.assignment()[static_cast<std::size_t>(user_index)];
    return DBSIM_OK;
}

dbsim_status dbsim_solution_user_rate(const dbsim_solution* sol, int user_index, double* out)
{
    if (require(sol != nullptr && out != nullptr, "sol/out") != DBSIM_OK)
        return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    const auto& rates = sol->outcome.solution.report.per_user_rate;
    if (user_index < 0 || static_cast<std::size_t>(user_index) >= rates.size())
        return fail(DBSIM_ERR_INVALID_ARGUMENT,
                    "user index out of range: " + std::to_string(user_index));
    *out = rates[static_cast<std::size_t>(user_index)];
    return DBSIM_OK;
}

dbsim_status dbsim_solution_to_json(const dbsim_solution* sol, char** json_out)
{
    if (require(json_out != nullptr, "json_out") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    *json_out = nullptr;
    if (require(sol != nullptr, "sol") != DBSIM_OK) return DBSIM_ERR_INVALID_ARGUMENT;
    clear_error();
    try {
        *json_out = dup_string(dbsim::solution_json(sol->cfg, sol->cov_label, sol->num_dbs,
                                                    sol->theta_b_deg, sol->outcome));
        if (*json_out == nullptr) return fail(DBSIM_ERR_RUNTIME, "out of memory");
        return DBSIM_OK;
    } catch (...) {
        return map_exception();
    }
}

void dbsim_solution_free(dbsim_solution* sol) { delete sol; }

void dbsim_string_free(char* s) { std::free(s); }

} // extern "C"
