#include "dbsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dbsim {

void MaternConfig::validate() const
{
    if (parent_intensity <= 0.0)
        throw std::invalid_argument("matern: parent_intensity must be positive");
    if (cluster_radius <= 0.0) throw std::invalid_argument("matern: cluster_radius must be positive");
    if (daughters_per_cluster_mean <= 0.0)
        throw std::invalid_argument("matern: daughters_per_cluster_mean must be positive");
    if (total_users < 1) throw std::invalid_argument("matern: total_users must be at least 1");
}

namespace {

std::vector<Vec2> matern_realization(const MaternConfig& cfg, const Region& region, Rng& rng)
{
    std::vector<Vec2> points;
    const int num_parents = rng.poisson(cfg.parent_intensity * region.area());
    for (int p = 0; p < num_parents; ++p) {
        const Vec2 parent{rng.uniform(region.origin.x, region.origin.x + region.width),
                          rng.uniform(region.origin.y, region.origin.y + region.height)};
        const int daughters = rng.poisson(cfg.daughters_per_cluster_mean);
        for (int d = 0; d < daughters; ++d) {
            // Uniform in the disk around the parent.
            const double r = cfg.cluster_radius * std::sqrt(rng.uniform());
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const Vec2 pt{parent.x + r * std::cos(phi), parent.y + r * std::sin(phi)};
            if (region.contains(pt)) points.push_back(pt);
        }
    }
    return points;
}

} // namespace

std::vector<User> generate_users(const MaternConfig& cfg, const Region& region, double p_delay,
                                 Rng& rng)
{
    cfg.validate();
    if (p_delay < 0.0 || p_delay > 1.0)
        throw std::invalid_argument("generate_users: p_delay must lie in [0, 1]");

    constexpr int kMaxRetries = 100;
    std::vector<Vec2> points;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        points = matern_realization(cfg, region, rng);
        if (static_cast<int>(points.size()) >= cfg.total_users) break;
        points.clear();
    }
    if (points.empty())
        throw std::runtime_error(
            "generate_users: could not reach total_users within the retry budget; "
            "increase parent_intensity or daughters_per_cluster_mean");

    // Random thinning down to the target count keeps the cluster structure.
    const std::size_t target = static_cast<std::size_t>(cfg.total_users);
    for (std::size_t kept = points.size(); kept > target; --kept) {
        const std::size_t victim = rng.uniform_index(kept);
        points[victim] = points[kept - 1];
        points.pop_back();
    }

    std::vector<User> users(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        users[i].id = static_cast<int>(i);
        users[i].pos = points[i];
        users[i].tau = rng.uniform() < p_delay ? 1 : 0;
    }
    return users;
}

std::vector<User> uniform_users(int count, const Region& region, double p_delay, Rng& rng)
{
    if (count < 1) throw std::invalid_argument("uniform_users: count must be at least 1");
    if (p_delay < 0.0 || p_delay > 1.0)
        throw std::invalid_argument("uniform_users: p_delay must lie in [0, 1]");
    std::vector<User> users(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        users[i].id = i;
        users[i].pos = {rng.uniform(region.origin.x, region.origin.x + region.width),
                        rng.uniform(region.origin.y, region.origin.y + region.height)};
        users[i].tau = rng.uniform() < p_delay ? 1 : 0;
    }
    return users;
}

double compute_cov(const std::vector<User>& users, const Region& region,
                   std::size_t grid_resolution)
{
    if (users.size() < 2) throw std::invalid_argument("compute_cov: need at least 2 users");
    if (grid_resolution < 100)
        throw std::invalid_argument("compute_cov: grid resolution must be at least 100");

    const std::size_t n = users.size();
    const std::size_t res = grid_resolution;
    const double cell_w = region.width / static_cast<double>(res);
    const double cell_h = region.height / static_cast<double>(res);

    std::vector<std::size_t> cells_per_user(n, 0);
    for (std::size_t cy = 0; cy < res; ++cy) {
        const double py = region.origin.y + (static_cast<double>(cy) + 0.5) * cell_h;
        for (std::size_t cx = 0; cx < res; ++cx) {
            const double px = region.origin.x + (static_cast<double>(cx) + 0.5) * cell_w;
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_user = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = px - users[i].pos.x;
                const double dy = py - users[i].pos.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best) { // strict: ties keep the lowest user id
                    best = d2;
                    best_user = i;
                }
            }
            ++cells_per_user[best_user];
        }
    }

    const double cell_area = cell_w * cell_h;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += static_cast<double>(cells_per_user[i]) * cell_area;
    mean /= static_cast<double>(n);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(cells_per_user[i]) * cell_area;
        ss += (a - mean) * (a - mean);
    }
    const double stddev = std::sqrt(ss / static_cast<double>(n - 1));

    return (1.0 / 0.529) * (stddev / mean);
}

namespace {

std::size_t nearest_centroid(const Vec2& p, const std::vector<Vec2>& centroids)
{
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        const double dx = p.x - centroids[k].x;
        const double dy = p.y - centroids[k].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
            best = d2;
            best_k = k;
        }
    }
    return best_k;
}

std::vector<Vec2> kmeans_pp_seed(const std::vector<User>& users, std::size_t k, Rng& rng)
{
    std::vector<Vec2> centroids;
    centroids.reserve(k);
    centroids.push_back(users[rng.uniform_index(users.size())].pos);
    std::vector<double> d2(users.size());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < users.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& c : centroids) {
                const double dx = users[i].pos.x - c.x;
                const double dy = users[i].pos.y - c.y;
                best = std::min(best, dx * dx + dy * dy);
            }
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All remaining mass sits on existing centroids; any point works.
            centroids.push_back(users[rng.uniform_index(users.size())].pos);
            continue;
        }
        double pick = rng.uniform() * total;
        std::size_t chosen = users.size() - 1;
        for (std::size_t i = 0; i < users.size(); ++i) {
            pick -= d2[i];
            if (pick <= 0.0) {
                chosen = i;
                break;
            }
        }
        centroids.push_back(users[chosen].pos);
    }
    return centroids;
}

} // namespace

std::vector<Vec3> kmeans_init(const std::vector<User>& users, int num_dbs, double theta_star_deg,
                              double h_min, double h_max, Rng& rng)
{
    if (num_dbs < 1) throw std::invalid_argument("kmeans_init: num_dbs must be at least 1");
    if (users.empty()) throw std::invalid_argument("kmeans_init: users must be nonempty");
    if (num_dbs > static_cast<int>(users.size()))
        throw std::invalid_argument("kmeans_init: more clusters than users");

    const std::size_t k = static_cast<std::size_t>(num_dbs);
    std::vector<Vec2> centroids = kmeans_pp_seed(users, k, rng);
    std::vector<std::size_t> assign(users.size(), 0);

    constexpr int kMaxIters = 100;
    constexpr double kMoveTol = 1e-6;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        for (std::size_t i = 0; i < users.size(); ++i)
            assign[i] = nearest_centroid(users[i].pos, centroids);

        std::vector<Vec2> sums(k, Vec2{});
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < users.size(); ++i) {
            sums[assign[i]].x += users[i].pos.x;
            sums[assign[i]].y += users[i].pos.y;
            ++counts[assign[i]];
        }

        double max_move = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            Vec2 next = centroids[c];
            if (counts[c] > 0) {
                next = {sums[c].x / static_cast<double>(counts[c]),
                        sums[c].y / static_cast<double>(counts[c])};
            } else {
                // Re-seed an empty cluster at the point farthest from its centroid.
                double far = -1.0;
                for (std::size_t i = 0; i < users.size(); ++i) {
                    const double d = planar_distance(users[i].pos, centroids[assign[i]]);
                    if (d > far) {
                        far = d;
                        next = users[i].pos;
                    }
                }
            }
            max_move = std::max(max_move, planar_distance(next, centroids[c]));
            centroids[c] = next;
        }
        if (max_move < kMoveTol) break;
    }
    for (std::size_t i = 0; i < users.size(); ++i)
        assign[i] = nearest_centroid(users[i].pos, centroids);

    // Initial altitude: make the footprint radius cover 90% of the members.
    const double tan_star = std::tan(theta_star_deg * std::numbers::pi / 180.0);
    std::vector<Vec3> result(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> dists;
        for (std::size_t i = 0; i < users.size(); ++i)
            if (assign[i] == c) dists.push_back(planar_distance(users[i].pos, centroids[c]));
        double radius = 0.0;
        if (!dists.empty()) {
            std::sort(dists.begin(), dists.end());
            const std::size_t idx =
                static_cast<std::size_t>(
                    std::ceil(0.9 * static_cast<double>(dists.size()))) -
                1;
            radius = dists[idx];
        }
        const double altitude = std::clamp(radius * tan_star, h_min, h_max);
        result[c] = {centroids[c].x, centroids[c].y, altitude};
    }
    return result;
}

} // namespace dbsim
