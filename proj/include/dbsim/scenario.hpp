#ifndef DBSIM_SCENARIO_HPP
#define DBSIM_SCENARIO_HPP

#include <cstddef>
#include <vector>

#include "dbsim/common.hpp"

namespace dbsim {

/// A ground user. tau = 1 marks a delay-sensitive user, which is restricted
/// to macro-cell service; tau = 0 users may be served by any station.
struct User {
    int id = 0;
    Vec2 pos;
    int tau = 0;
};

/// Rectangular service area. The macro station sits at the center.
struct Region {
    double width = 500.0;
    double height = 500.0;
    Vec2 origin; // lower-left corner

    double area() const { return width * height; }
    Vec2 center() const { return {origin.x + 0.5 * width, origin.y + 0.5 * height}; }
    bool contains(const Vec2& p) const
    {
        return p.x >= origin.x && p.x <= origin.x + width && p.y >= origin.y &&
               p.y <= origin.y + height;
    }
    double diagonal() const { return std::hypot(width, height); }
};

/// Doubly Poisson cluster process parameters, conditioned on an exact
/// number of retained points.
struct MaternConfig {
    double parent_intensity = 4.0e-5; // parents per square meter
    double cluster_radius = 60.0;     // daughter disk radius, meters
    double daughters_per_cluster_mean = 6.0;
    int total_users = 60;

    void validate() const;
};

/// Draws cluster-process users inside the region, thinned to exactly
/// cfg.total_users points, and assigns each a Bernoulli(p_delay)
/// delay-sensitivity flag. Throws std::runtime_error if the target count
/// cannot be reached within a bounded retry budget.
std::vector<User> generate_users(const MaternConfig& cfg, const Region& region, double p_delay,
                                 Rng& rng);

/// Uniform (binomial point process) users; the homogeneous reference case.
std::vector<User> uniform_users(int count, const Region& region, double p_delay, Rng& rng);

/// Spatial-heterogeneity measure: normalized coefficient of variation of the
/// per-user cell areas of a discrete (grid) Voronoi partition of the region.
/// Grid cells tie-break toward the lowest user id. 1 corresponds to a
/// homogeneous Poisson layout; larger values mean more clustering.
double compute_cov(const std::vector<User>& users, const Region& region,
                   std::size_t grid_resolution = 500);

/// Lloyd's k-means (k-means++ seeding) over user positions. Returns one 3D
/// position per cluster: centroid (x, y) plus an initial altitude chosen so
/// the antenna footprint radius matches the cluster's 90th-percentile member
/// distance, clamped to [h_min, h_max].
std::vector<Vec3> kmeans_init(const std::vector<User>& users, int num_dbs, double theta_star_deg,
                              double h_min, double h_max, Rng& rng);

} // namespace dbsim

#endif
