#include "dbsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dbsim/constraints.hpp"
#include "dbsim/scenario.hpp"

namespace dbsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt_g(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string preset_list(const SimConfig& cfg)
{
    std::string out;
    for (const auto& label : available_presets(cfg)) out += (out.empty() ? "" : ", ") + label;
    return out;
}

std::vector<User> make_users(const SimConfig& cfg, const std::string& label, Rng& rng)
{
    if (label == "uniform")
        return uniform_users(cfg.experiment.num_users, cfg.region, cfg.experiment.p_delay, rng);
    const auto it = cfg.matern_presets.find(label);
    if (it == cfg.matern_presets.end())
        throw std::invalid_argument("experiment: unknown CoV preset \"" + label +
                                    "\"; available presets: " + preset_list(cfg));
    MaternConfig preset = it->second;
    preset.total_users = cfg.experiment.num_users;
    return generate_users(preset, cfg.region, cfg.experiment.p_delay, rng);
}

std::vector<BaseStation> stations_for(const Region& region, const AlgoConfig& algo,
                                      const std::vector<Vec3>& dbs_positions)
{
    std::vector<BaseStation> stations;
    stations.push_back(BaseStation::macro(region.center(), algo.mbs_mast_m, algo.mbs_power_dbm));
    for (std::size_t j = 0; j < dbs_positions.size(); ++j)
        stations.push_back(BaseStation::drone(static_cast<int>(j + 1), dbs_positions[j],
                                              algo.dbs_power_dbm, algo.theta_b_deg));
    return stations;
}

// Mean and sample standard deviation (n - 1 denominator; 0 when n < 2).
std::pair<double, double> mean_std(const std::vector<double>& xs)
{
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

void write_file(const fs::path& path, const std::string& content, std::vector<std::string>& files)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("experiment: cannot write output file: " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("experiment: write failed: " + path.string());
    files.push_back(path.string());
}

std::string trace_json_lines(const Solution& sol, const std::string& label, int run, int num_dbs,
                             double theta_b)
{
    const ordered_json head = {
        {"run", run}, {"cov", label}, {"num_dbs", num_dbs}, {"theta_b", theta_b}};
    std::string out = head.dump() + "\n";
    for (const auto& e : sol.trace) {
        const ordered_json line = {{"stage", e.stage},
                                   {"t", e.inner_t},
                                   {"t_prime", e.outer_t},
                                   {"utility", e.utility},
                                   {"alpha", e.alpha}};
        out += line.dump() + "\n";
    }
    return out;
}

/// Runs task indices 0..task_count-1 through `work` on a small thread pool.
/// Results must land in caller-owned, pre-sized slots so that output content
/// never depends on scheduling; the caller serializes all file writes.
void run_pool(std::size_t task_count, const std::function<void(std::size_t)>& work)
{
    if (task_count == 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers =
        std::min({task_count, static_cast<std::size_t>(hw == 0 ? 1 : hw),
                  static_cast<std::size_t>(8)});
    if (workers <= 1) {
        for (std::size_t i = 0; i < task_count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= task_count) return;
            try {
                work(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct RateRow {
    int run = 0;
    int user = 0;
    int bs = 0;
    int tau = 0;
    double rate = 0.0;
};

void exp_rate_cdf(const SimConfig& cfg, const std::vector<std::string>& labels, const fs::path& dir,
                  std::vector<std::string>& files)
{
    const int seeds = cfg.experiment.seeds;
    const int num_dbs = cfg.experiment.num_dbs.front();
    const double theta_b = cfg.algo.theta_b_deg;
    const std::size_t tasks = labels.size() * static_cast<std::size_t>(seeds);
    std::vector<std::vector<RateRow>> rows(tasks);
    std::vector<std::string> traces(cfg.experiment.verbose ? tasks : 0);
    run_pool(tasks, [&](std::size_t idx) {
        const std::size_t li = idx / static_cast<std::size_t>(seeds);
        const int r = static_cast<int>(idx % static_cast<std::size_t>(seeds));
        const RunOutcome out = solve_run(cfg, labels[li], r, num_dbs, theta_b);
        const std::vector<int> assign = out.solution.association.assignment();
        auto& slot = rows[idx];
        slot.reserve(out.users.size());
        for (std::size_t i = 0; i < out.users.size(); ++i)
            slot.push_back({r, out.users[i].id, assign[i], out.users[i].tau,
                            out.solution.report.per_user_rate[i]});
        if (cfg.experiment.verbose)
            traces[idx] = trace_json_lines(out.solution, labels[li], r, num_dbs, theta_b);
    });
    for (const auto& t : traces) std::cout << t;

    std::string csv = "# schema: dbsim.rates.v1\nrun,user_id,bs_id,tau,rate,cov_label,cdf\n";
    for (std::size_t li = 0; li < labels.size(); ++li) {
        std::vector<RateRow> pool;
        for (int r = 0; r < seeds; ++r) {
            const auto& part = rows[li * static_cast<std::size_t>(seeds) + r];
            pool.insert(pool.end(), part.begin(), part.end());
        }
        std::sort(pool.begin(), pool.end(), [](const RateRow& a, const RateRow& b) {
            if (a.rate != b.rate) return a.rate < b.rate;
            if (a.run != b.run) return a.run < b.run;
            return a.user < b.user;
        });
        for (std::size_t k = 0; k < pool.size(); ++k) {
            const RateRow& row = pool[k];
            csv += std::to_string(row.run) + "," + std::to_string(row.user) + "," +
                   std::to_string(row.bs) + "," + std::to_string(row.tau) + "," + fmt_g(row.rate) +
                   "," + labels[li] + "," +
                   fmt_g(static_cast<double>(k + 1) / static_cast<double>(pool.size())) + "\n";
        }
    }
    write_file(dir / "rates.csv", csv, files);
}

void exp_association_count(const SimConfig& cfg, const std::vector<std::string>& labels,
                           const fs::path& dir, std::vector<std::string>& files)
{
    const int seeds = cfg.experiment.seeds;
    const int num_dbs = cfg.experiment.num_dbs.front();
    const double theta_b = cfg.algo.theta_b_deg;
    const std::size_t tasks = labels.size() * static_cast<std::size_t>(seeds);
    std::vector<std::pair<int, int>> counts(tasks); // users on (macro, drones)
    std::vector<std::string> traces(cfg.experiment.verbose ? tasks : 0);
    run_pool(tasks, [&](std::size_t idx) {
        const std::size_t li = idx / static_cast<std::size_t>(seeds);
        const int r = static_cast<int>(idx % static_cast<std::size_t>(seeds));
        const RunOutcome out = solve_run(cfg, labels[li], r, num_dbs, theta_b);
        int on_macro = 0;
        for (int bs : out.solution.association.assignment())
            if (bs == 0) ++on_macro;
        counts[idx] = {on_macro, static_cast<int>(out.users.size()) - on_macro};
        if (cfg.experiment.verbose)
            traces[idx] = trace_json_lines(out.solution, labels[li], r, num_dbs, theta_b);
    });
    for (const auto& t : traces) std::cout << t;

    std::string csv = "# schema: dbsim.counts.v1\ncov,mbs_users_mean,dbs_users_mean,std\n";
    for (std::size_t li = 0; li < labels.size(); ++li) {
        std::vector<double> mbs_counts, dbs_counts;
        for (int r = 0; r < seeds; ++r) {
            const auto& c = counts[li * static_cast<std::size_t>(seeds) + r];
            mbs_counts.push_back(static_cast<double>(c.first));
            dbs_counts.push_back(static_cast<double>(c.second));
        }
        const double mbs_mean = mean_std(mbs_counts).first;
        const auto [dbs_mean, dbs_std] = mean_std(dbs_counts);
        csv += labels[li] + "," + fmt_g(mbs_mean) + "," + fmt_g(dbs_mean) + "," + fmt_g(dbs_std) +
               "\n";
    }
    write_file(dir / "counts.csv", csv, files);
}

void exp_beamwidth_sweep(const SimConfig& cfg, const std::vector<std::string>& labels,
                         const fs::path& dir, std::vector<std::string>& files)
{
    const int seeds = cfg.experiment.seeds;
    const std::string label = labels.front();
    const std::vector<double>& thetas = cfg.experiment.theta_b_deg;
    const std::vector<int>& ms = cfg.experiment.num_dbs;
    const std::size_t cells = thetas.size() * ms.size();
    const std::size_t tasks = static_cast<std::size_t>(seeds) * cells;
    std::vector<double> totals(tasks, 0.0);
    std::vector<std::string> traces(cfg.experiment.verbose ? tasks : 0);
    run_pool(tasks, [&](std::size_t idx) {
        const int r = static_cast<int>(idx / cells);
        const std::size_t c = idx % cells;
        const double theta_b = thetas[c / ms.size()];
        const int num_dbs = ms[c % ms.size()];
        const RunOutcome out = solve_run(cfg, label, r, num_dbs, theta_b, static_cast<int>(c));
        const std::vector<int> assign = out.solution.association.assignment();
        double total = 0.0;
        for (std::size_t i = 0; i < assign.size(); ++i)
            if (assign[i] > 0) total += out.solution.report.per_user_rate[i];
        totals[idx] = total;
        if (cfg.experiment.verbose)
            traces[idx] = trace_json_lines(out.solution, label, r, num_dbs, theta_b);
    });
    for (const auto& t : traces) std::cout << t;

    std::string csv = "# schema: dbsim.sweep.v1\ntheta_b,num_dbs,total_dbs_rate_mean,std\n";
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<double> xs;
        for (int r = 0; r < seeds; ++r) xs.push_back(totals[static_cast<std::size_t>(r) * cells + c]);
        const auto [mean, stddev] = mean_std(xs);
        csv += fmt_g(thetas[c / ms.size()]) + "," + std::to_string(ms[c % ms.size()]) + "," +
               fmt_g(mean) + "," + fmt_g(stddev) + "\n";
    }
    write_file(dir / "sweep.csv", csv, files);
}

void exp_single_run(const SimConfig& cfg, const std::vector<std::string>& labels,
                    const fs::path& dir, std::vector<std::string>& files)
{
    const std::string label = labels.front();
    const int num_dbs = cfg.experiment.num_dbs.front();
    const double theta_b = cfg.algo.theta_b_deg;
    const RunOutcome out = solve_run(cfg, label, 0, num_dbs, theta_b);
    if (cfg.experiment.verbose)
        std::cout << trace_json_lines(out.solution, label, 0, num_dbs, theta_b);

    const Solution& sol = out.solution;
    const std::vector<int> assign = sol.association.assignment();
    std::vector<int> load(sol.association.num_bs(), 0);
    for (int bs : assign) ++load[static_cast<std::size_t>(bs)];

    write_file(dir / "solution.json", solution_json(cfg, label, num_dbs, theta_b, out), files);

    std::string csv = "# schema: dbsim.association.v1\nuser_id,bs_id,y_share,rate\n";
    for (std::size_t i = 0; i < out.users.size(); ++i) {
        const int bs = assign[i];
        const double share = (1.0 - sol.alpha) / static_cast<double>(load[bs]);
        csv += std::to_string(out.users[i].id) + "," + std::to_string(bs) + "," + fmt_g(share) +
               "," + fmt_g(sol.report.per_user_rate[i]) + "\n";
    }
    csv += "# alpha = " + std::string(fmt_g(sol.alpha)) + "\n";
    csv += "# utility = " + std::string(fmt_g(sol.report.utility)) + "\n";
    write_file(dir / "association.csv", csv, files);
}

} // namespace

std::string solution_json(const SimConfig& cfg, const std::string& cov_label, int num_dbs,
                          double theta_b_deg, const RunOutcome& outcome)
{
    const Solution& sol = outcome.solution;
    const std::vector<int> assign = sol.association.assignment();
    std::vector<int> load(sol.association.num_bs(), 0);
    for (int bs : assign) ++load[static_cast<std::size_t>(bs)];

    ordered_json j;
    j["schema"] = "dbsim.solution.v1";
    j["experiment"] = "single-run";
    j["cov_label"] = cov_label;
    j["master_seed"] = cfg.experiment.master_seed;
    j["num_users"] = static_cast<int>(outcome.users.size());
    j["num_dbs"] = num_dbs;
    j["theta_b_deg"] = theta_b_deg;
    j["alpha"] = sol.alpha;
    j["utility"] = sol.report.utility;
    j["measured_cov"] = compute_cov(outcome.users, cfg.region);
    j["macro"] = {{"x", cfg.region.center().x},
                  {"y", cfg.region.center().y},
                  {"mast_m", cfg.algo.mbs_mast_m}};
    ordered_json positions = ordered_json::array();
    for (const Vec3& p : sol.dbs_positions) positions.push_back({p.x, p.y, p.z});
    j["dbs_positions"] = positions;
    ordered_json users = ordered_json::array();
    for (std::size_t i = 0; i < outcome.users.size(); ++i) {
        const int bs = assign[i];
        const double share = (1.0 - sol.alpha) / static_cast<double>(load[bs]);
        users.push_back({{"id", outcome.users[i].id},
                         {"x", outcome.users[i].pos.x},
                         {"y", outcome.users[i].pos.y},
                         {"tau", outcome.users[i].tau},
                         {"bs", bs},
                         {"rate", sol.report.per_user_rate[i]},
                         {"share", share}});
    }
    j["users"] = users;
    ordered_json trace = ordered_json::array();
    for (const auto& e : sol.trace)
        trace.push_back({{"stage", e.stage},
                         {"t", e.inner_t},
                         {"t_prime", e.outer_t},
                         {"utility", e.utility},
                         {"alpha", e.alpha}});
    j["trace"] = trace;
    return j.dump(2) + "\n";
}

RunOutcome solve_run(const SimConfig& cfg, const std::string& cov_label, int run_index,
                     int num_dbs, double theta_b_deg, int cell_index)
{
    if (run_index < 0) throw std::invalid_argument("solve_run: run_index must be >= 0");
    if (cell_index < 0) throw std::invalid_argument("solve_run: cell_index must be >= 0");
    const Rng run_stream = Rng(cfg.experiment.master_seed)
                               .derive(fnv1a64(cov_label))
                               .derive(static_cast<std::uint64_t>(run_index));
    Rng scen_rng = run_stream.derive(0);
    Rng solver_rng = run_stream.derive(1 + static_cast<std::uint64_t>(cell_index));

    RunOutcome out;
    out.users = make_users(cfg, cov_label, scen_rng);
    AlgoConfig algo = cfg.algo;
    algo.theta_b_deg = theta_b_deg;
    out.solution = run(out.users, cfg.region, num_dbs, cfg.env, algo, cfg.swarm, solver_rng);

    const std::vector<BaseStation> stations =
        stations_for(cfg.region, algo, out.solution.dbs_positions);
    const LinkMatrix link = build_link_matrix(out.users, stations, cfg.env, ChannelMode::Expected);
    const ConstraintReport audit = check_constraints(
        out.solution.association, link, out.users, out.solution.dbs_positions, algo.theta_star_deg());
    if (!audit.all())
        throw std::runtime_error("experiment: solution failed the constraint audit: " +
                                 audit.first_failure());
    return out;
}

ExperimentResult run_experiment(const SimConfig& cfg)
{
    cfg.validate();
    const fs::path dir = cfg.experiment.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("experiment: cannot create output directory: " + dir.string() +
                                 ": " + ec.message());
    ExperimentResult result;
    write_file(dir / "resolved_config.json", describe_config(cfg), result.files);
    const std::vector<std::string> labels = resolved_cov_presets(cfg);
    const std::string& name = cfg.experiment.name;
    if (name == "rate-cdf")
        exp_rate_cdf(cfg, labels, dir, result.files);
    else if (name == "association-count")
        exp_association_count(cfg, labels, dir, result.files);
    else if (name == "beamwidth-sweep")
        exp_beamwidth_sweep(cfg, labels, dir, result.files);
    else
        exp_single_run(cfg, labels, dir, result.files);
    return result;
}

} // namespace dbsim
