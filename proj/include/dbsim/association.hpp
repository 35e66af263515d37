#ifndef DBSIM_ASSOCIATION_HPP
#define DBSIM_ASSOCIATION_HPP

#include <vector>

#include "dbsim/channel.hpp"
#include "dbsim/common.hpp"

namespace dbsim {

/// Per-user candidate station sets: sorted ascending, always containing 0.
using FeasibleSets = std::vector<std::vector<int>>;

/// A user-station association together with the bandwidth split alpha
/// (fraction of the band reserved for the wireless backhaul).
struct Association {
    Matrix x;            // N x (M+1), rows sum to 1, zero outside feasible sets
    double alpha = 0.0;  // in [0, 1)
    bool binary = false; // true when every row is a unit vector

    std::size_t num_users() const { return x.rows(); }
    std::size_t num_bs() const { return x.cols(); }

    /// Assigned station per user; requires binary == true.
    std::vector<int> assignment() const;
};

/// Builds a binary association from per-user station indices.
Association make_binary(const std::vector<int>& assign, std::size_t num_bs, double alpha);

/// Candidate stations per user: the macro station always; drone j whenever
/// the user is delay-tolerant and sits inside j's footprint (elevation angle
/// at least theta_star, boundary inclusive).
FeasibleSets feasible_bs_sets(const std::vector<User>& users, const LinkMatrix& link,
                              double theta_star_deg);

struct RelaxedOptions {
    double tol = 1e-6;     // relative duality-gap stopping threshold
    int max_iters = 5000;  // Frank-Wolfe iteration cap
    double s_floor = 1e-12; // floor for station loads inside logarithms
};

struct RelaxedResult {
    Association assoc;  // fractional solution (binary == false)
    double objective = 0.0;
    double duality_gap = 0.0; // absolute gap at termination
    int iterations = 0;
    bool converged = false;
};

/// Maximizes the relaxed fairness objective
///     f(x) = sum_ij x_ij log(r_ij (1-alpha)) - sum_j S_j log S_j
/// (natural logs, S_j the station loads, 0 log 0 := 0) over the polytope:
/// row simplex restricted to the feasible sets, plus the linearized backhaul
/// constraint (1-alpha) sum_i x_ij r_ij <= alpha r_j0 sum_k x_kj per drone.
/// Frank-Wolfe with an exact line search; each linear subproblem is solved
/// by the in-repo revised simplex, warm-started across iterations from the
/// all-macro vertex. An optional warm-start association is used when it is
/// feasible for this alpha, otherwise ignored.
RelaxedResult solve_relaxed(const LinkMatrix& link, const FeasibleSets& feasible, double alpha,
                            const RelaxedOptions& opts = {},
                            const Association* warm_start = nullptr);

/// The relaxed objective f at an arbitrary association (diagnostic helper).
double relaxed_objective(const Association& assoc, const LinkMatrix& link,
                         double s_floor = 1e-12);

/// Rounds a fractional association: each user goes to the feasible station
/// with the largest x_ij (ties to the lowest index). Then, while any drone
/// violates the linearized backhaul constraint at assoc.alpha, its member
/// with the smallest fractional mass (ties to the lowest user id) moves to
/// the macro station. The result satisfies every binary constraint.
Association round_association(const Association& frac, const LinkMatrix& link,
                              const FeasibleSets& feasible);

/// Smallest feasible bandwidth split for a binary association, in closed
/// form: alpha* = max(0, max_j A_j / (A_j + r_j0)) with A_j the mean access
/// rate of drone j's members. Throws if a nonempty drone has no backhaul
/// capacity (r_j0 = 0).
double optimal_alpha(const Association& assoc, const LinkMatrix& link);

/// Per-user achieved rates under equal per-station bandwidth shares.
struct UtilityReport {
    std::vector<double> per_user_rate;   // R_i, unit-bandwidth normalized
    double utility = 0.0;                // sum_i log(max(R_i, rate_floor))
    std::vector<double> backhaul_slack;  // alpha r_j0 - sum_{i on j} R_i, per drone
};

/// Evaluates a binary association: each station splits the access band
/// (1-alpha) equally among its members, so R_i = (1-alpha) r_ij / S_j.
UtilityReport evaluate(const Association& assoc, const LinkMatrix& link,
                       double rate_floor = 1e-12);

} // namespace dbsim

#endif
