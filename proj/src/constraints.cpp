#include "dbsim/constraints.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dbsim {

std::string ConstraintReport::first_failure() const
{
    if (!alpha_ok) return "alpha";
    if (!row_stochastic) return "row_stochastic";
    if (!delay_ok) return "delay";
    if (!footprint_ok) return "footprint";
    if (!bandwidth_ok) return "bandwidth";
    if (!backhaul_ok) return "backhaul";
    if (!separation_ok) return "separation";
    return "";
}

ConstraintReport check_constraints(const Association& assoc, const LinkMatrix& link,
                                   const std::vector<User>& users,
                                   const std::vector<Vec3>& dbs_positions,
                                   double theta_star_deg, double tol)
{
    const std::size_t n = assoc.x.rows(), m1 = assoc.x.cols();
    if (n != link.num_users() || m1 != link.num_bs() || n != users.size() ||
        dbs_positions.size() != link.num_dbs())
        throw std::invalid_argument("check_constraints: shape mismatch");

    ConstraintReport rep;
    rep.alpha_ok = assoc.alpha >= 0.0 && assoc.alpha <= 1.0;

    rep.row_stochastic = true;
    for (std::size_t i = 0; i < n && rep.row_stochastic; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m1; ++j) {
            if (assoc.x(i, j) < -tol) rep.row_stochastic = false;
            sum += assoc.x(i, j);
        }
        if (std::abs(sum - 1.0) > tol) rep.row_stochastic = false;
    }

    rep.delay_ok = true;
    for (std::size_t i = 0; i < n && rep.delay_ok; ++i)
        if (users[i].tau != 0)
            for (std::size_t j = 1; j < m1; ++j)
                if (assoc.x(i, j) > tol) rep.delay_ok = false;

    rep.footprint_ok = true;
    for (std::size_t i = 0; i < n && rep.footprint_ok; ++i)
        for (std::size_t j = 1; j < m1; ++j)
            if (assoc.x(i, j) > tol && link.elevation(i, j - 1) < theta_star_deg - 1e-9)
                rep.footprint_ok = false;

    // station loads and equal-split shares
    std::vector<double> load(m1, 0.0);
    for (std::size_t j = 0; j < m1; ++j)
        for (std::size_t i = 0; i < n; ++i) load[j] += assoc.x(i, j);

    rep.bandwidth_ok = true;
    for (std::size_t j = 0; j < m1 && rep.bandwidth_ok; ++j) {
        if (load[j] <= tol) continue;
        double share_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            share_sum += assoc.x(i, j) * (1.0 - assoc.alpha) / load[j];
        if (share_sum > (1.0 - assoc.alpha) + tol) rep.bandwidth_ok = false;
    }

    rep.backhaul_ok = true;
    for (std::size_t j = 1; j < m1 && rep.backhaul_ok; ++j) {
        if (load[j] <= tol) continue; // empty drone: slack = alpha r_j0 >= 0
        double weighted = 0.0;
        for (std::size_t i = 0; i < n; ++i) weighted += assoc.x(i, j) * link.rate(i, j);
        const double slack =
            assoc.alpha * link.backhaul_rate[j - 1] - (1.0 - assoc.alpha) * weighted / load[j];
        if (slack < -1e-9) rep.backhaul_ok = false;
    }

    rep.separation_ok = true;
    const double tan_star = std::tan(theta_star_deg * std::numbers::pi / 180.0);
    for (std::size_t j = 0; j < dbs_positions.size() && rep.separation_ok; ++j)
        for (std::size_t k = j + 1; k < dbs_positions.size(); ++k) {
            const double required =
                (dbs_positions[j].z + dbs_positions[k].z) / tan_star;
            if (planar_distance(dbs_positions[j].xy(), dbs_positions[k].xy()) <
                required - 1e-6) {
                rep.separation_ok = false;
                break;
            }
        }
    return rep;
}

} // namespace dbsim
