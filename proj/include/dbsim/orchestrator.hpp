#ifndef DBSIM_ORCHESTRATOR_HPP
#define DBSIM_ORCHESTRATOR_HPP

#include <string>
#include <vector>

#include "dbsim/association.hpp"
#include "dbsim/placement.hpp"
#include "dbsim/scenario.hpp"

namespace dbsim {

/// Tunables of the alternating solve: the two convergence thresholds are
/// relative (improvement >= threshold * max(1, |utility|) keeps looping),
/// plus the radio/geometry parameters every stage shares.
struct AlgoConfig {
    double epsilon = 1e-3;   // inner-loop relative improvement threshold
    double nu = 1e-3;        // outer-loop relative improvement threshold
    double alpha_init = 0.5; // starting backhaul share
    int max_inner = 20;
    int max_outer = 10;
    double rate_floor = 1e-12;

    double theta_b_deg = 60.0; // drone antenna half-power beamwidth
    double mbs_power_dbm = 46.0;
    double dbs_power_dbm = 36.0;
    double mbs_mast_m = 25.0;
    double h_min = 10.0;
    double h_max = 500.0;
    PenaltyForm penalty_form = PenaltyForm::Hinge;

    double theta_star_deg() const;
    void validate() const;
};

struct TraceEntry {
    std::string stage; // "inner" or "outer"
    int inner_t = 0;   // cumulative subproblem/master iterations
    int outer_t = 0;   // placement updates so far
    double utility = 0.0;
    double alpha = 0.0;
};

/// Final placement + association + bandwidth split, guaranteed feasible.
/// Outer-stage trace utilities are best-so-far checkpoints and therefore
/// non-decreasing.
struct Solution {
    std::vector<Vec3> dbs_positions;
    Association association; // binary, association.alpha == alpha
    double alpha = 0.0;
    UtilityReport report;
    std::vector<TraceEntry> trace;
};

/// Deterministically repairs pairwise footprint overlaps: shrinks altitudes
/// toward h_min (which only helps other pairs), then pushes the worst pair
/// apart horizontally; falls back to a regular grid at h_min if a pass cap
/// is hit. Positions stay inside region x [h_min, h_max].
void enforce_separation(std::vector<Vec3>& positions, const Region& region,
                        double theta_star_deg, double h_min, double h_max);

/// Full pipeline for one scenario: cluster-based initial placement, inner
/// alternation (fractional association -> rounding -> closed-form bandwidth
/// split), and outer swarm placement updates, returning the best feasible
/// iterate encountered. num_dbs = 0 yields the macro-only baseline.
Solution run(const std::vector<User>& users, const Region& region, int num_dbs,
             const Environment& env, const AlgoConfig& cfg, const SwarmConfig& swarm_cfg,
             Rng& rng);

} // namespace dbsim

#endif
