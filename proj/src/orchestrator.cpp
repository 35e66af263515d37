#include "dbsim/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dbsim/constraints.hpp"

namespace dbsim {

double AlgoConfig::theta_star_deg() const { return footprint_threshold_deg(theta_b_deg); }

void AlgoConfig::validate() const
{
    if (epsilon <= 0.0 || nu <= 0.0)
        throw std::invalid_argument("AlgoConfig: thresholds must be positive");
    if (alpha_init < 0.0 || alpha_init >= 1.0)
        throw std::invalid_argument("AlgoConfig: alpha_init must lie in [0, 1)");
    if (max_inner < 1 || max_outer < 1)
        throw std::invalid_argument("AlgoConfig: iteration caps must be >= 1");
    if (rate_floor <= 0.0) throw std::invalid_argument("AlgoConfig: rate floor must be positive");
    if (theta_b_deg <= 0.0 || theta_b_deg >= 180.0)
        throw std::invalid_argument("AlgoConfig: beamwidth must lie in (0, 180) degrees");
    if (mbs_mast_m <= 0.0) throw std::invalid_argument("AlgoConfig: mast height must be positive");
    if (h_min <= 0.0 || h_max < h_min)
        throw std::invalid_argument("AlgoConfig: need 0 < h_min <= h_max");
}

void enforce_separation(std::vector<Vec3>& positions, const Region& region,
                        double theta_star_deg, double h_min, double h_max)
{
    const std::size_t m = positions.size();
    if (m < 2) return;
    const double tan_ts = std::tan(theta_star_deg * std::numbers::pi / 180.0);
    const double lo_x = region.origin.x, hi_x = region.origin.x + region.width;
    const double lo_y = region.origin.y, hi_y = region.origin.y + region.height;
    const auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };

    for (int pass = 0; pass < 100; ++pass) {
        std::size_t wj = 0, wk = 0;
        double worst = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
                const double v = (positions[j].z + positions[k].z) / tan_ts -
                                 planar_distance(positions[j].xy(), positions[k].xy());
                if (v > worst) {
                    worst = v;
                    wj = j;
                    wk = k;
                }
            }
        if (worst <= 0.0) return;

        const double dist = planar_distance(positions[wj].xy(), positions[wk].xy());
        if (dist > 0.0) {
            // shrink both altitudes toward the separating cone; this never
            // hurts any other pair
            const double scale = dist * tan_ts / (positions[wj].z + positions[wk].z);
            positions[wj].z = std::max(h_min, positions[wj].z * scale);
            positions[wk].z = std::max(h_min, positions[wk].z * scale);
            if (positions[wj].z + positions[wk].z <= dist * tan_ts) continue;
        }
        // altitudes are floored: push the pair apart along their axis
        const double need = (positions[wj].z + positions[wk].z) / tan_ts - dist;
        double ux = 1.0, uy = 0.0;
        if (dist > 0.0) {
            ux = (positions[wk].x - positions[wj].x) / dist;
            uy = (positions[wk].y - positions[wj].y) / dist;
        }
        const double shift = 0.5 * need + 1e-6;
        positions[wj].x = clamp(positions[wj].x - ux * shift, lo_x, hi_x);
        positions[wj].y = clamp(positions[wj].y - uy * shift, lo_y, hi_y);
        positions[wk].x = clamp(positions[wk].x + ux * shift, lo_x, hi_x);
        positions[wk].y = clamp(positions[wk].y + uy * shift, lo_y, hi_y);
    }

    // pass cap hit (possible only in cramped regions): regular grid at h_min
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
    const std::size_t rows = (m + cols - 1) / cols;
    for (std::size_t idx = 0; idx < m; ++idx) {
        const std::size_t c = idx % cols, r = idx / cols;
        positions[idx] = {lo_x + (static_cast<double>(c) + 0.5) * region.width /
                                     static_cast<double>(cols),
                          lo_y + (static_cast<double>(r) + 0.5) * region.height /
                                     static_cast<double>(rows),
                          h_min};
    }
}

namespace {

struct Candidate {
    std::vector<Vec3> positions;
    Association assoc;
    double utility = -std::numeric_limits<double>::infinity();
    UtilityReport report;
    bool valid = false;
};

} // namespace

Solution run(const std::vector<User>& users, const Region& region, int num_dbs,
             const Environment& env, const AlgoConfig& cfg, const SwarmConfig& swarm_cfg,
             Rng& rng)
{
    cfg.validate();
    swarm_cfg.validate();
    if (num_dbs < 0) throw std::invalid_argument("run: num_dbs must be >= 0");
    if (users.empty()) throw std::invalid_argument("run: users must be nonempty");

    PlacementContext ctx;
    ctx.users = users;
    ctx.env = env;
    ctx.region = region;
    ctx.h_min = cfg.h_min;
    ctx.h_max = cfg.h_max;
    ctx.rate_floor = cfg.rate_floor;
    ctx.penalty_form = cfg.penalty_form;
    ctx.stations.push_back(BaseStation::macro(region.center(), cfg.mbs_mast_m, cfg.mbs_power_dbm));
    for (int j = 1; j <= num_dbs; ++j)
        ctx.stations.push_back(
            BaseStation::drone(j, {region.center().x, region.center().y, cfg.h_min},
                               cfg.dbs_power_dbm, cfg.theta_b_deg));
    const double theta_star = cfg.theta_star_deg();

    Solution solution;

    // macro-only baseline: every user on the macro station, no backhaul
    if (num_dbs == 0) {
        const LinkMatrix link = ctx.link_at({});
        std::vector<int> all_macro(users.size(), 0);
        solution.association = make_binary(all_macro, 1, 0.0);
        solution.alpha = 0.0;
        solution.report = evaluate(solution.association, link, cfg.rate_floor);
        solution.trace.push_back({"inner", 1, 0, solution.report.utility, 0.0});
        solution.trace.push_back({"outer", 1, 0, solution.report.utility, 0.0});
        return solution;
    }

    std::vector<Vec3> positions = kmeans_init(users, num_dbs, theta_star, cfg.h_min, cfg.h_max, rng);
    enforce_separation(positions, region, theta_star, cfg.h_min, cfg.h_max);

    Candidate best;
    double alpha = cfg.alpha_init;
    Association x_bin;
    bool have_x = false;
    int inner_total = 0;
    int outer_t = 0;

    // Inner alternation at fixed positions: fractional subproblem at the
    // current alpha, rounding with backhaul repair, closed-form master.
    // Returns the utility of the last iterate and updates alpha/x_bin.
    const auto inner_loop = [&](const std::vector<Vec3>& pos) {
        const LinkMatrix link = ctx.link_at(pos);
        const FeasibleSets feasible = feasible_bs_sets(users, link, theta_star);
        double u_prev = -std::numeric_limits<double>::infinity();
        double u_last = u_prev;
        for (int t = 0; t < cfg.max_inner; ++t) {
            const RelaxedResult relaxed =
                solve_relaxed(link, feasible, alpha, {}, have_x ? &x_bin : nullptr);
            x_bin = round_association(relaxed.assoc, link, feasible);
            have_x = true;
            alpha = optimal_alpha(x_bin, link);
            x_bin.alpha = alpha;
            const UtilityReport rep = evaluate(x_bin, link, cfg.rate_floor);
            u_last = rep.utility;
            ++inner_total;
            solution.trace.push_back({"inner", inner_total, outer_t, u_last, alpha});

            if (u_last > best.utility &&
                check_constraints(x_bin, link, users, pos, theta_star).all()) {
                best.positions = pos;
                best.assoc = x_bin;
                best.utility = u_last;
                best.report = rep;
                best.valid = true;
            }

            const double gain = u_last - u_prev;
            u_prev = u_last;
            if (gain < cfg.epsilon * std::max(1.0, std::abs(u_last))) break;
        }
        return u_last;
    };

    double u_outer_prev = inner_loop(positions);
    solution.trace.push_back({"outer", inner_total, outer_t, best.utility, alpha});

    for (outer_t = 1; outer_t <= cfg.max_outer; ++outer_t) {
        const PsoResult pso =
            pso_optimize(positions, ctx, x_bin, theta_star, swarm_cfg, rng);
        for (const PsoTracePoint& pt : pso.trace)
            solution.trace.push_back({"pso", pt.iteration, outer_t, pt.score, alpha});
        positions = pso.positions;
        enforce_separation(positions, region, theta_star, cfg.h_min, cfg.h_max);

        const double u_now = inner_loop(positions);
        solution.trace.push_back({"outer", inner_total, outer_t, best.utility, alpha});

        const double gain = u_now - u_outer_prev;
        u_outer_prev = u_now;
        if (gain < cfg.nu * std::max(1.0, std::abs(u_now))) break;
    }

    if (!best.valid) {
        // cannot occur for a sane configuration (the all-macro association
        // is always feasible), but never return an unchecked iterate
        const LinkMatrix link = ctx.link_at(positions);
        std::vector<int> all_macro(users.size(), 0);
        best.positions = positions;
        best.assoc = make_binary(all_macro, static_cast<std::size_t>(num_dbs) + 1, 0.0);
        best.report = evaluate(best.assoc, link, cfg.rate_floor);
        best.utility = best.report.utility;
        if (!check_constraints(best.assoc, link, users, best.positions, theta_star).all())
            throw std::runtime_error(
                "run: no feasible drone layout exists for this region and beamwidth");
    }

    solution.dbs_positions = best.positions;
    solution.association = best.assoc;
    solution.alpha = best.assoc.alpha;
    solution.report = best.report;
    return solution;
}

} // namespace dbsim
