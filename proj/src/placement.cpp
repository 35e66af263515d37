#include "dbsim/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dbsim {

void PlacementContext::validate() const
{
    if (users.empty()) throw std::invalid_argument("PlacementContext: users must be nonempty");
    if (stations.empty() || stations[0].kind != BsKind::Mbs)
        throw std::invalid_argument("PlacementContext: stations[0] must be the macro station");
    for (std::size_t j = 1; j < stations.size(); ++j)
        if (stations[j].kind != BsKind::Dbs)
            throw std::invalid_argument("PlacementContext: stations 1..M must be drones");
    if (h_min <= 0.0 || h_max < h_min)
        throw std::invalid_argument("PlacementContext: need 0 < h_min <= h_max");
    if (rate_floor <= 0.0)
        throw std::invalid_argument("PlacementContext: rate floor must be positive");
    env.validate();
}

LinkMatrix PlacementContext::link_at(const std::vector<Vec3>& dbs_positions) const
{
    if (dbs_positions.size() != num_dbs())
        throw std::invalid_argument("link_at: position count must match the drone count");
    std::vector<BaseStation> placed = stations;
    for (std::size_t j = 0; j < dbs_positions.size(); ++j) placed[j + 1].pos = dbs_positions[j];
    return build_link_matrix(users, placed, env, ChannelMode::Expected);
}

double penalized_utility(const std::vector<Vec3>& positions, const PlacementContext& ctx,
                         const Association& assoc, double theta_star_deg, double weight)
{
    const std::size_t m = ctx.num_dbs();
    if (positions.size() != m)
        throw std::invalid_argument("penalized_utility: position count must match the drone count");
    if (assoc.x.rows() != ctx.users.size() || assoc.x.cols() != m + 1)
        throw std::invalid_argument("penalized_utility: association shape mismatch");
    if (weight <= 0.0) throw std::invalid_argument("penalized_utility: weight must be positive");
    if (theta_star_deg <= 0.0 || theta_star_deg >= 90.0)
        throw std::invalid_argument("penalized_utility: theta* must lie in (0, 90) degrees");

    const LinkMatrix link = ctx.link_at(positions);
    const double raw = evaluate(assoc, link, ctx.rate_floor).utility;
    const double tan_ts = std::tan(theta_star_deg * std::numbers::pi / 180.0);

    // per-drone aggregates of the frozen association
    std::vector<double> load(m, 0.0), through(m, 0.0), angle_slack(m, 0.0);
    for (std::size_t i = 0; i < ctx.users.size(); ++i)
        for (std::size_t j = 1; j <= m; ++j) {
            const double xv = assoc.x(i, j);
            if (xv == 0.0) continue;
            load[j - 1] += xv;
            through[j - 1] += xv * link.rate(i, j);
            angle_slack[j - 1] += xv * (link.elevation(i, j - 1) - theta_star_deg);
        }

    if (ctx.penalty_form == PenaltyForm::Verbatim) {
        // literal signed-slack form: subtract the separation slack over
        // ordered drone pairs and each drone's backhaul + footprint slack
        double slack = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                if (j == k) continue;
                slack += tan_ts * planar_distance(positions[j].xy(), positions[k].xy()) - positions[j].z -
                         positions[k].z;
            }
        for (std::size_t j = 0; j < m; ++j) {
            double term = assoc.alpha * link.backhaul_rate[j];
            if (load[j] > 0.0) term -= (1.0 - assoc.alpha) * through[j] / load[j];
            term -= angle_slack[j];
            slack += term;
        }
        return raw - slack;
    }

    // hinge form: quadratic exterior penalties on the violated amount only
    double penalty = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
            const double v = (positions[j].z + positions[k].z) / tan_ts -
                             planar_distance(positions[j].xy(), positions[k].xy());
            if (v > 0.0) penalty += v * v;
        }
    for (std::size_t i = 0; i < ctx.users.size(); ++i)
        for (std::size_t j = 1; j <= m; ++j) {
            const double xv = assoc.x(i, j);
            if (xv == 0.0) continue;
            const double v = xv * (theta_star_deg - link.elevation(i, j - 1));
            if (v > 0.0) penalty += v * v;
        }
    for (std::size_t j = 0; j < m; ++j) {
        if (load[j] == 0.0) continue;
        const double v =
            (1.0 - assoc.alpha) * through[j] / load[j] - assoc.alpha * link.backhaul_rate[j];
        if (v > 0.0) penalty += v * v;
    }
    return raw - weight * penalty;
}

void SwarmConfig::validate() const
{
    if (swarm_size < 2) throw std::invalid_argument("SwarmConfig: swarm_size must be >= 2");
    if (inertia <= 0.0 || inertia >= 1.0)
        throw std::invalid_argument("SwarmConfig: inertia must lie in (0, 1)");
    if (cognitive <= 0.0 || social <= 0.0)
        throw std::invalid_argument("SwarmConfig: cognitive and social gains must be positive");
    if (max_iters < 0) throw std::invalid_argument("SwarmConfig: max_iters must be >= 0");
    if (penalty_weight <= 0.0)
        throw std::invalid_argument("SwarmConfig: penalty weight must be positive");
    if (v_max < 0.0) throw std::invalid_argument("SwarmConfig: v_max must be >= 0");
}

PsoResult pso_optimize(const std::vector<Vec3>& initial_positions, const PlacementContext& ctx,
                       const Association& assoc, double theta_star_deg, const SwarmConfig& cfg,
                       Rng& rng)
{
    ctx.validate();
    cfg.validate();
    const std::size_t m = ctx.num_dbs();
    if (initial_positions.size() != m)
        throw std::invalid_argument("pso_optimize: initial position count must match drones");

    const double lo_x = ctx.region.origin.x, hi_x = ctx.region.origin.x + ctx.region.width;
    const double lo_y = ctx.region.origin.y, hi_y = ctx.region.origin.y + ctx.region.height;
    for (const Vec3& p : initial_positions)
        if (p.x < lo_x || p.x > hi_x || p.y < lo_y || p.y > hi_y || p.z < ctx.h_min ||
            p.z > ctx.h_max)
            throw std::invalid_argument("pso_optimize: initial positions outside the search bounds");

    const auto fitness = [&](const std::vector<Vec3>& pos) {
        return penalized_utility(pos, ctx, assoc, theta_star_deg, cfg.penalty_weight);
    };

    PsoResult result;
    result.positions = initial_positions;
    result.score = fitness(initial_positions);
    if (m == 0) return result; // nothing to place

    const double v_max = cfg.v_max > 0.0 ? cfg.v_max : 0.1 * ctx.region.diagonal();
    const std::size_t swarm = static_cast<std::size_t>(cfg.swarm_size);

    std::vector<std::vector<Vec3>> pos(swarm), vel(swarm), pbest(swarm);
    std::vector<double> pbest_score(swarm);

    // particle 0 sits exactly on the initial placement and seeds the best
    pos[0] = initial_positions;
    vel[0].assign(m, Vec3{0.0, 0.0, 0.0});
    for (std::size_t k = 1; k < swarm; ++k) {
        pos[k].resize(m);
        vel[k].resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            pos[k][j] = {rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y),
                         rng.uniform(ctx.h_min, ctx.h_max)};
            vel[k][j] = {rng.uniform(-v_max, v_max), rng.uniform(-v_max, v_max),
                         rng.uniform(-v_max, v_max)};
        }
    }
    for (std::size_t k = 0; k < swarm; ++k) {
        pbest[k] = pos[k];
        pbest_score[k] = k == 0 ? result.score : fitness(pos[k]);
    }

    const auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };
    const auto comp = [](Vec3& v, int c) -> double& { return c == 0 ? v.x : c == 1 ? v.y : v.z; };

    for (int t = 1; t <= cfg.max_iters; ++t) {
        for (std::size_t k = 0; k < swarm; ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                for (int c = 0; c < 3; ++c) {
                    const double u1 = rng.uniform();
                    const double u2 = rng.uniform();
                    double& v = comp(vel[k][j], c);
                    double& p = comp(pos[k][j], c);
                    v = cfg.inertia * v + cfg.cognitive * u1 * (comp(pbest[k][j], c) - p) +
                        cfg.social * u2 * (comp(result.positions[j], c) - p);
                    v = clamp(v, -v_max, v_max);
                    p += v;
                }
                pos[k][j].x = clamp(pos[k][j].x, lo_x, hi_x);
                pos[k][j].y = clamp(pos[k][j].y, lo_y, hi_y);
                pos[k][j].z = clamp(pos[k][j].z, ctx.h_min, ctx.h_max);
            }
            const double score = fitness(pos[k]);
            if (score > pbest_score[k]) {
                pbest_score[k] = score;
                pbest[k] = pos[k];
            }
        }
        for (std::size_t k = 0; k < swarm; ++k)
            if (pbest_score[k] > result.score) {
                result.score = pbest_score[k];
                result.positions = pbest[k];
            }
        result.trace.push_back({t, result.score});
    }
    return result;
}

} // namespace dbsim
