#ifndef DBSIM_SIMPLEX_HPP
#define DBSIM_SIMPLEX_HPP

#include <utility>
#include <vector>

namespace dbsim {

/// Sparse column of an equality-form LP: (row, coefficient) entries.
struct SparseCol {
    std::vector<std::pair<int, double>> entries;
};

/// Dense revised simplex for small equality-form programs
///     maximize c.x   subject to   A x = b,  x >= 0.
/// Built for repeated re-optimization under a changing objective: the basis
/// and its inverse persist across maximize() calls, so a solve after a small
/// objective tweak usually costs only a handful of pivots. The caller must
/// install a primal-feasible starting basis once via set_basis().
class SimplexSolver {
public:
    SimplexSolver(int num_rows, std::vector<SparseCol> columns, std::vector<double> rhs);

    /// Installs a starting basis: one column index per row. Throws
    /// std::invalid_argument if the basis matrix is singular or the implied
    /// basic solution is infeasible.
    void set_basis(const std::vector<int>& basic_columns);

    /// Re-optimizes for the objective c (one entry per column) from the
    /// current basis. Fills x with the optimal point and returns c.x.
    /// Degenerate stalls switch the pricing rule to Bland's to break cycles;
    /// throws std::logic_error on an unbounded ray (impossible for bounded
    /// polytopes) and std::runtime_error if the pivot budget is exhausted.
    double maximize(const std::vector<double>& c, std::vector<double>& x);

    const std::vector<int>& basis() const { return basis_; }
    int total_pivots() const { return pivots_; }

private:
    void refactorize();
    void solve_direction(int col, std::vector<double>& w) const;

    int m_;
    std::vector<SparseCol> cols_;
    std::vector<double> rhs_;
    std::vector<int> basis_;     // basic column index per row
    std::vector<int> col_row_;   // column -> basis row, or -1 if nonbasic
    std::vector<double> binv_;   // m x m inverse of the basis matrix, row-major
    std::vector<double> xb_;     // values of the basic variables
    int pivots_ = 0;
    bool has_basis_ = false;
};

} // namespace dbsim

#endif
