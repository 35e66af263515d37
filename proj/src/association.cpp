#include "dbsim/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dbsim/simplex.hpp"

namespace dbsim {

std::vector<int> Association::assignment() const
{
    if (!binary) throw std::logic_error("assignment: association is fractional");
    std::vector<int> assign(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        int found = -1;
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (x(i, j) == 1.0) {
                found = static_cast<int>(j);
                break;
            }
        if (found < 0) throw std::logic_error("assignment: row without a unit entry");
        assign[i] = found;
    }
    return assign;
}

Association make_binary(const std::vector<int>& assign, std::size_t num_bs, double alpha)
{
    Association a;
    a.x = Matrix(assign.size(), num_bs);
    a.alpha = alpha;
    a.binary = true;
    for (std::size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] < 0 || assign[i] >= static_cast<int>(num_bs))
            throw std::invalid_argument("make_binary: station index out of range");
        a.x(i, static_cast<std::size_t>(assign[i])) = 1.0;
    }
    return a;
}

FeasibleSets feasible_bs_sets(const std::vector<User>& users, const LinkMatrix& link,
                              double theta_star_deg)
{
    if (users.size() != link.num_users())
        throw std::invalid_argument("feasible_bs_sets: user count mismatch with link matrix");
    FeasibleSets sets(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
        sets[i].push_back(0); // macro station is always reachable
        if (users[i].tau != 0) continue; // delay-sensitive: macro only
        for (std::size_t j = 1; j < link.num_bs(); ++j)
            if (link.elevation(i, j - 1) >= theta_star_deg)
                sets[i].push_back(static_cast<int>(j));
    }
    return sets;
}

namespace {

struct PairLayout {
    std::vector<std::pair<int, int>> pairs;  // column -> (user, station)
    std::vector<std::vector<int>> col_of;    // [user][station] -> column or -1
    int num_pairs = 0;
};

PairLayout build_layout(const FeasibleSets& feasible, std::size_t num_bs)
{
    PairLayout layout;
    layout.col_of.assign(feasible.size(), std::vector<int>(num_bs, -1));
    for (std::size_t i = 0; i < feasible.size(); ++i) {
        if (feasible[i].empty() || feasible[i][0] != 0)
            throw std::invalid_argument("solve_relaxed: every feasible set must start with 0");
        int prev = -1;
        for (int j : feasible[i]) {
            if (j <= prev || j >= static_cast<int>(num_bs))
                throw std::invalid_argument("solve_relaxed: feasible sets must be sorted and in range");
            prev = j;
            layout.col_of[i][static_cast<std::size_t>(j)] = layout.num_pairs;
            layout.pairs.emplace_back(static_cast<int>(i), j);
            ++layout.num_pairs;
        }
    }
    return layout;
}

// Station loads S_j for a pair-indexed point.
std::vector<double> station_loads(const PairLayout& layout, const std::vector<double>& x,
                                  std::size_t num_bs)
{
    std::vector<double> s(num_bs, 0.0);
    for (int p = 0; p < layout.num_pairs; ++p)
        s[static_cast<std::size_t>(layout.pairs[p].second)] += x[p];
    return s;
}

double floored_log(double v, double floor) { return std::log(std::max(v, floor)); }

} // namespace

double relaxed_objective(const Association& assoc, const LinkMatrix& link, double s_floor)
{
    const std::size_t n = assoc.x.rows(), m1 = assoc.x.cols();
    if (n != link.num_users() || m1 != link.num_bs())
        throw std::invalid_argument("relaxed_objective: association/link shape mismatch");
    double f = 0.0;
    for (std::size_t j = 0; j < m1; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xv = assoc.x(i, j);
            if (xv > 0.0) f += xv * std::log(link.rate(i, j) * (1.0 - assoc.alpha));
            s += xv;
        }
        if (s > 0.0) f -= s * floored_log(s, s_floor);
    }
    return f;
}

RelaxedResult solve_relaxed(const LinkMatrix& link, const FeasibleSets& feasible, double alpha,
                            const RelaxedOptions& opts, const Association* warm_start)
{
    const std::size_t n = link.num_users();
    const std::size_t m1 = link.num_bs();
    const int m = static_cast<int>(m1) - 1; // drone count
    if (feasible.size() != n)
        throw std::invalid_argument("solve_relaxed: feasible set count mismatch");
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::invalid_argument("solve_relaxed: alpha must lie in [0, 1)");
    if (opts.tol <= 0.0 || opts.max_iters < 1 || opts.s_floor <= 0.0)
        throw std::invalid_argument("solve_relaxed: invalid solver options");
    for (std::size_t i = 0; i < n; ++i)
        if (link.rate(i, 0) <= 0.0)
            throw std::invalid_argument("solve_relaxed: every user needs a live macro link");

    const PairLayout layout = build_layout(feasible, m1);
    const int num_pairs = layout.num_pairs;
    const int rows = static_cast<int>(n) + m;

    // LP columns: pair columns (1 in the user's simplex row; linearized
    // backhaul coefficient in the drone's coupling row), then drone slacks.
    std::vector<SparseCol> cols(static_cast<std::size_t>(num_pairs + m));
    for (int p = 0; p < num_pairs; ++p) {
        const auto [i, j] = layout.pairs[p];
        cols[p].entries.push_back({i, 1.0});
        if (j >= 1) {
            const double coeff = (1.0 - alpha) * link.rate(i, static_cast<std::size_t>(j)) -
                                 alpha * link.backhaul_rate[static_cast<std::size_t>(j - 1)];
            cols[p].entries.push_back({static_cast<int>(n) + j - 1, coeff});
        }
    }
    for (int j = 1; j <= m; ++j)
        cols[static_cast<std::size_t>(num_pairs + j - 1)].entries.push_back(
            {static_cast<int>(n) + j - 1, 1.0});

    std::vector<double> rhs(rows, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = 1.0;

    SimplexSolver lp(rows, std::move(cols), std::move(rhs));
    std::vector<int> start_basis(rows);
    for (std::size_t i = 0; i < n; ++i) start_basis[i] = layout.col_of[i][0];
    for (int j = 1; j <= m; ++j) start_basis[n + static_cast<std::size_t>(j - 1)] =
        num_pairs + j - 1;
    lp.set_basis(start_basis); // all-macro vertex: feasible for every alpha

    // initial point: warm start when provided and feasible, else all-macro
    std::vector<double> x(static_cast<std::size_t>(num_pairs), 0.0);
    bool warmed = false;
    if (warm_start != nullptr && warm_start->x.rows() == n && warm_start->x.cols() == m1) {
        warmed = true;
        for (int p = 0; p < num_pairs && warmed; ++p) {
            const auto [i, j] = layout.pairs[p];
            x[p] = warm_start->x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (x[p] < -1e-12 || x[p] > 1.0 + 1e-9) warmed = false;
        }
        if (warmed) {
            for (std::size_t i = 0; i < n && warmed; ++i) {
                double row_sum = 0.0;
                for (std::size_t j = 0; j < m1; ++j) {
                    const double v = warm_start->x(i, j);
                    if (layout.col_of[i][j] < 0 && std::abs(v) > 1e-12) warmed = false;
                    row_sum += v;
                }
                if (std::abs(row_sum - 1.0) > 1e-9) warmed = false;
            }
        }
        if (warmed) {
            const std::vector<double> s = station_loads(layout, x, m1);
            for (int j = 1; j <= m && warmed; ++j) {
                double lhs = 0.0;
                for (int p = 0; p < num_pairs; ++p)
                    if (layout.pairs[p].second == j)
                        lhs += x[p] * link.rate(static_cast<std::size_t>(layout.pairs[p].first),
                                                static_cast<std::size_t>(j));
                const double rhs_j = alpha * link.backhaul_rate[static_cast<std::size_t>(j - 1)] *
                                     s[static_cast<std::size_t>(j)];
                if ((1.0 - alpha) * lhs > rhs_j + 1e-9) warmed = false;
            }
        }
    }
    if (!warmed) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) x[static_cast<std::size_t>(layout.col_of[i][0])] = 1.0;
    }

    // log-rate coefficients c_ij = log(r_ij (1-alpha))
    std::vector<double> clog(static_cast<std::size_t>(num_pairs));
    for (int p = 0; p < num_pairs; ++p) {
        const auto [i, j] = layout.pairs[p];
        clog[p] = std::log(link.rate(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                           (1.0 - alpha));
    }

    const auto objective_at = [&](const std::vector<double>& pt) {
        const std::vector<double> s = station_loads(layout, pt, m1);
        double f = 0.0;
        for (int p = 0; p < num_pairs; ++p)
            if (pt[p] > 0.0) f += pt[p] * clog[p];
        for (double sj : s)
            if (sj > 0.0) f -= sj * floored_log(sj, opts.s_floor);
        return f;
    };

    std::vector<double> grad(static_cast<std::size_t>(num_pairs + m), 0.0);
    std::vector<double> vertex;
    std::vector<double> d(static_cast<std::size_t>(num_pairs));

    // Pairwise conditional-gradient state: x is kept as an explicit convex
    // combination of atoms (polytope points), so each step can move mass from
    // the worst active atom onto the new oracle vertex. Plain steps toward the
    // oracle vertex alone zigzag on optimal faces and stall at ~1e-5 gaps.
    std::vector<std::vector<double>> atoms{x};
    std::vector<double> weights{1.0};

    RelaxedResult result;
    double gap = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (iter = 0; iter < opts.max_iters; ++iter) {
        const std::vector<double> s = station_loads(layout, x, m1);
        for (int p = 0; p < num_pairs; ++p) {
            const int j = layout.pairs[p].second;
            grad[p] = clog[p] - floored_log(s[static_cast<std::size_t>(j)], opts.s_floor) - 1.0;
        }

        lp.maximize(grad, vertex);

        gap = 0.0;
        for (int p = 0; p < num_pairs; ++p) gap += grad[p] * (vertex[p] - x[p]);
        const double fx = objective_at(x);
        if (gap <= opts.tol * std::max(1.0, std::abs(fx))) {
            result.converged = true;
            break;
        }

        // away atom: the active atom the gradient likes least
        std::size_t away = 0;
        double away_score = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            double score = 0.0;
            for (int p = 0; p < num_pairs; ++p) score += grad[p] * atoms[k][static_cast<std::size_t>(p)];
            if (score < away_score) {
                away_score = score;
                away = k;
            }
        }
        const double gamma_max = weights[away];

        // exact line search on the concave 1D slice phi(g) = f(x + g d),
        // d = oracle vertex - away atom, g in [0, gamma_max]
        std::vector<double> dj(m1, 0.0);
        double lin = 0.0;
        for (int p = 0; p < num_pairs; ++p) {
            d[p] = vertex[p] - atoms[away][static_cast<std::size_t>(p)];
            lin += d[p] * clog[p];
            dj[static_cast<std::size_t>(layout.pairs[p].second)] += d[p];
        }
        const auto dphi = [&](double g) {
            double v = lin;
            for (std::size_t j = 0; j < m1; ++j) {
                if (dj[j] == 0.0) continue;
                v -= dj[j] * (floored_log(s[j] + g * dj[j], opts.s_floor) + 1.0);
            }
            return v;
        };
        double gamma = gamma_max;
        if (dphi(gamma_max) < 0.0) {
            double lo = 0.0, hi = gamma_max;
            for (int b = 0; b < 64; ++b) {
                const double mid = 0.5 * (lo + hi);
                if (dphi(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            gamma = 0.5 * (lo + hi);
        }
        if (gamma <= 0.0) break; // no usable ascent direction left

        // shift mass: away atom loses gamma, the oracle vertex gains it
        weights[away] -= gamma;
        std::size_t hit = atoms.size();
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if (atoms[k] == vertex) {
                hit = k;
                break;
            }
        if (hit == atoms.size()) {
            atoms.push_back(vertex);
            weights.push_back(gamma);
        } else {
            weights[hit] += gamma;
        }
        if (weights[away] <= 1e-15) { // drop step: the away atom is spent
            atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(away));
            weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(away));
        }

        for (int p = 0; p < num_pairs; ++p) {
            x[p] += gamma * d[p];
            if (x[p] < 0.0) x[p] = 0.0; // clip roundoff
        }
        if ((iter & 127) == 127) { // periodically resync x with its atoms
            std::fill(x.begin(), x.end(), 0.0);
            for (std::size_t k = 0; k < atoms.size(); ++k)
                for (int p = 0; p < num_pairs; ++p)
                    x[static_cast<std::size_t>(p)] += weights[k] * atoms[k][static_cast<std::size_t>(p)];
        }
    }

    result.assoc.x = Matrix(n, m1);
    for (int p = 0; p < num_pairs; ++p) {
        const auto [i, j] = layout.pairs[p];
        result.assoc.x(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = x[p];
    }
    result.assoc.alpha = alpha;
    result.assoc.binary = false;
    result.objective = objective_at(x);
    result.duality_gap = gap;
    result.iterations = iter;
    return result;
}

Association round_association(const Association& frac, const LinkMatrix& link,
                              const FeasibleSets& feasible)
{
    const std::size_t n = frac.x.rows(), m1 = frac.x.cols();
    if (n != link.num_users() || m1 != link.num_bs() || feasible.size() != n)
        throw std::invalid_argument("round_association: shape mismatch");
    const double alpha = frac.alpha;

    std::vector<int> assign(n);
    for (std::size_t i = 0; i < n; ++i) {
        int best_j = 0;
        double best_x = -1.0;
        for (int j : feasible[i]) {
            const double v = frac.x(i, static_cast<std::size_t>(j));
            if (v > best_x) { // strict: ties keep the lowest station index
                best_x = v;
                best_j = j;
            }
        }
        assign[i] = best_j;
    }

    // backhaul repair: drain the least-committed member back to the macro
    // station until the linearized constraint holds at this alpha
    for (std::size_t j = 1; j < m1; ++j) {
        const double rj0 = link.backhaul_rate[j - 1];
        while (true) {
            double lhs = 0.0, count = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == static_cast<int>(j)) {
                    lhs += link.rate(i, j);
                    count += 1.0;
                }
            if (count == 0.0 || (1.0 - alpha) * lhs <= alpha * rj0 * count + 1e-9) break;
            int victim = -1;
            double victim_x = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == static_cast<int>(j) && frac.x(i, j) < victim_x) {
                    victim_x = frac.x(i, j);
                    victim = static_cast<int>(i);
                }
            assign[static_cast<std::size_t>(victim)] = 0;
        }
    }

    Association out = make_binary(assign, m1, alpha);
    return out;
}

double optimal_alpha(const Association& assoc, const LinkMatrix& link)
{
    if (!assoc.binary) throw std::invalid_argument("optimal_alpha: association must be binary");
    const std::size_t n = assoc.x.rows(), m1 = assoc.x.cols();
    if (n != link.num_users() || m1 != link.num_bs())
        throw std::invalid_argument("optimal_alpha: association/link shape mismatch");

    double alpha = 0.0;
    for (std::size_t j = 1; j < m1; ++j) {
        double sum = 0.0, count = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (assoc.x(i, j) == 1.0) {
                sum += link.rate(i, j);
                count += 1.0;
            }
        if (count == 0.0) continue;
        const double rj0 = link.backhaul_rate[j - 1];
        if (rj0 <= 0.0)
            throw std::runtime_error("optimal_alpha: drone has members but no backhaul capacity");
        const double aj = sum / count; // mean member access rate
        alpha = std::max(alpha, aj / (aj + rj0));
    }
    return alpha;
}

UtilityReport evaluate(const Association& assoc, const LinkMatrix& link, double rate_floor)
{
    if (!assoc.binary) throw std::invalid_argument("evaluate: association must be binary");
    const std::size_t n = assoc.x.rows(), m1 = assoc.x.cols();
    if (n != link.num_users() || m1 != link.num_bs())
        throw std::invalid_argument("evaluate: association/link shape mismatch");
    if (assoc.alpha < 0.0 || assoc.alpha > 1.0)
        throw std::invalid_argument("evaluate: alpha must lie in [0, 1]");
    if (rate_floor <= 0.0) throw std::invalid_argument("evaluate: rate floor must be positive");

    const std::vector<int> assign = assoc.assignment();
    std::vector<double> load(m1, 0.0);
    for (int j : assign) load[static_cast<std::size_t>(j)] += 1.0;

    UtilityReport report;
    report.per_user_rate.resize(n);
    report.backhaul_slack.assign(m1 - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(assign[i]);
        report.per_user_rate[i] = (1.0 - assoc.alpha) * link.rate(i, j) / load[j];
        report.utility += std::log(std::max(report.per_user_rate[i], rate_floor));
    }
    for (std::size_t j = 1; j < m1; ++j) {
        double through = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (assign[i] == static_cast<int>(j)) through += report.per_user_rate[i];
        report.backhaul_slack[j - 1] = assoc.alpha * link.backhaul_rate[j - 1] - through;
    }
    return report;
}

} // namespace dbsim
