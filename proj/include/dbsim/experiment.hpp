#ifndef DBSIM_EXPERIMENT_HPP
#define DBSIM_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "dbsim/config.hpp"
#include "dbsim/orchestrator.hpp"

namespace dbsim {

/// Paths of every file an experiment wrote, in write order.
struct ExperimentResult {
    std::vector<std::string> files;
};

/// One Monte Carlo run: users plus the audited solution they produced.
struct RunOutcome {
    std::vector<User> users;
    Solution solution;
};

/// Executes one run of the full pipeline. The scenario is drawn from the
/// (master seed, cov label, run index) substream and the solver from the
/// (master seed, cov label, run index, cell index) substream, so adding
/// runs, presets, or sweep cells never perturbs existing ones, and every
/// sweep cell of a run sees the same users. The returned solution has
/// passed the full constraint audit (the audit failing is an error).
RunOutcome solve_run(const SimConfig& cfg, const std::string& cov_label, int run_index,
                     int num_dbs, double theta_b_deg, int cell_index = 0);

/// The full solution document (schema dbsim.solution.v1) for one outcome:
/// scenario, placement, association, per-user rates, and the run trace.
/// Exactly the bytes the single-run experiment writes to solution.json.
std::string solution_json(const SimConfig& cfg, const std::string& cov_label, int num_dbs,
                          double theta_b_deg, const RunOutcome& outcome);

/// Executes cfg.experiment and writes its output files into
/// cfg.experiment.out_dir (created if missing). Returns the files written,
/// resolved_config.json first. Numeric CSV fields are printed with "%.12g";
/// rerunning the same configuration reproduces every file byte for byte.
ExperimentResult run_experiment(const SimConfig& cfg);

} // namespace dbsim

#endif
