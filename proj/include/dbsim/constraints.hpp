#ifndef DBSIM_CONSTRAINTS_HPP
#define DBSIM_CONSTRAINTS_HPP

#include <string>
#include <vector>

#include "dbsim/association.hpp"
#include "dbsim/channel.hpp"

namespace dbsim {

/// Outcome of the full feasibility audit of an association + placement.
struct ConstraintReport {
    bool row_stochastic = false; // each user's shares sum to one
    bool bandwidth_ok = false;   // per-station access shares within 1 - alpha
    bool backhaul_ok = false;    // drone throughput within backhaul capacity
    bool delay_ok = false;       // delay-sensitive users on the macro station
    bool footprint_ok = false;   // drone members inside the antenna footprint
    bool separation_ok = false;  // drone footprints pairwise disjoint
    bool alpha_ok = false;       // bandwidth split within [0, 1]

    bool all() const
    {
        return row_stochastic && bandwidth_ok && backhaul_ok && delay_ok && footprint_ok &&
               separation_ok && alpha_ok;
    }
    /// Name of the first failing check, or "" when everything passes.
    std::string first_failure() const;
};

/// Audits every constraint family against an association (binary or
/// fractional), the link matrix it was computed from, and the drone
/// placement. Backhaul slack tolerance is 1e-9 in rate units; separation
/// tolerance is 1e-6 m.
ConstraintReport check_constraints(const Association& assoc, const LinkMatrix& link,
                                   const std::vector<User>& users,
                                   const std::vector<Vec3>& dbs_positions,
                                   double theta_star_deg, double tol = 1e-9);

} // namespace dbsim

#endif
