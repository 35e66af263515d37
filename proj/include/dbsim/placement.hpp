#ifndef DBSIM_PLACEMENT_HPP
#define DBSIM_PLACEMENT_HPP

#include <cstddef>
#include <vector>

#include "dbsim/association.hpp"
#include "dbsim/channel.hpp"
#include "dbsim/scenario.hpp"

namespace dbsim {

/// How constraint violations enter the placement fitness.
/// Hinge: subtract weight * max(0, violation)^2 per violation (a true
/// exterior penalty; the default). Verbatim: subtract the raw signed slack
/// terms unweighted, which rewards slack and is kept only for comparison.
enum class PenaltyForm { Hinge, Verbatim };

/// Everything needed to rebuild the link matrix at candidate drone
/// positions: the ground users, the channel environment, and the station
/// list whose drone entries carry transmit power and beamwidth (their
/// positions are placeholders, overwritten per candidate).
struct PlacementContext {
    std::vector<User> users;
    Environment env;
    std::vector<BaseStation> stations; // [0] = macro, then one entry per drone
    Region region;                     // horizontal search bounds
    double h_min = 10.0;               // altitude search band, meters
    double h_max = 500.0;
    double rate_floor = 1e-12;
    PenaltyForm penalty_form = PenaltyForm::Hinge;

    std::size_t num_dbs() const { return stations.empty() ? 0 : stations.size() - 1; }
    void validate() const;
    /// Link matrix with drones moved to the candidate positions
    /// (deterministic expected-channel mode).
    LinkMatrix link_at(const std::vector<Vec3>& dbs_positions) const;
};

/// Fitness of a candidate placement for a frozen association and bandwidth
/// split: the proportional-fair utility at the rebuilt link matrix minus
/// penalties for three violation families (pairwise footprint separation,
/// members outside the serving drone's footprint, backhaul overload).
/// With no violations the value equals the raw utility.
double penalized_utility(const std::vector<Vec3>& positions, const PlacementContext& ctx,
                         const Association& assoc, double theta_star_deg, double weight);

/// Global-best particle swarm settings. v_max = 0 means 10% of the region
/// diagonal.
struct SwarmConfig {
    int swarm_size = 30;
    double inertia = 0.72;
    double cognitive = 1.49;
    double social = 1.49;
    int max_iters = 60;
    double penalty_weight = 1e3;
    double v_max = 0.0; // meters/iteration per component; 0 = auto

    void validate() const;
};

struct PsoTracePoint {
    int iteration = 0;
    double score = 0.0;
};

struct PsoResult {
    std::vector<Vec3> positions;
    double score = 0.0;
    std::vector<PsoTracePoint> trace; // best score after each iteration
};

/// Global-best PSO over drone positions with the association and bandwidth
/// split frozen. One particle starts exactly at initial_positions and seeds
/// the global best, so the returned score never falls below the initial
/// fitness and is non-decreasing across iterations.
PsoResult pso_optimize(const std::vector<Vec3>& initial_positions, const PlacementContext& ctx,
                       const Association& assoc, double theta_star_deg, const SwarmConfig& cfg,
                       Rng& rng);

} // namespace dbsim

#endif
