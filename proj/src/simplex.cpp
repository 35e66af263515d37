#include "dbsim/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dbsim {

namespace {
constexpr double kOptTol = 1e-9;     // reduced-cost optimality threshold
constexpr double kPivotTol = 1e-11;  // minimal usable pivot magnitude
constexpr double kFeasTol = 1e-9;    // basic-solution nonnegativity slack
constexpr int kMaxPivots = 50000;    // per maximize() call
constexpr int kRefactorEvery = 128;  // guard against B^-1 drift
constexpr int kBlandTrigger = 60;    // degenerate pivots before anti-cycling
} // namespace

SimplexSolver::SimplexSolver(int num_rows, std::vector<SparseCol> columns,
                             std::vector<double> rhs)
    : m_(num_rows), cols_(std::move(columns)), rhs_(std::move(rhs))
{
    if (m_ < 1) throw std::invalid_argument("simplex: need at least one row");
    if (rhs_.size() != static_cast<std::size_t>(m_))
        throw std::invalid_argument("simplex: rhs size must equal the row count");
    if (cols_.size() < static_cast<std::size_t>(m_))
        throw std::invalid_argument("simplex: need at least as many columns as rows");
    for (const SparseCol& col : cols_)
        for (const auto& [row, coeff] : col.entries) {
            (void)coeff;
            if (row < 0 || row >= m_)
                throw std::invalid_argument("simplex: column entry row out of range");
        }
    col_row_.assign(cols_.size(), -1);
}

void SimplexSolver::refactorize()
{
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r)
        for (const auto& [row, coeff] : cols_[basis_[r]].entries) b[row * m_ + r] = coeff;

    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;

    for (int col = 0; col < m_; ++col) {
        int pivot = col;
        double best = std::abs(b[col * m_ + col]);
        for (int r = col + 1; r < m_; ++r) {
            const double v = std::abs(b[r * m_ + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < kPivotTol) throw std::invalid_argument("simplex: singular basis matrix");
        if (pivot != col) {
            for (int k = 0; k < m_; ++k) {
                std::swap(b[pivot * m_ + k], b[col * m_ + k]);
                std::swap(inv[pivot * m_ + k], inv[col * m_ + k]);
            }
        }
        const double scale = 1.0 / b[col * m_ + col];
        for (int k = 0; k < m_; ++k) {
            b[col * m_ + k] *= scale;
            inv[col * m_ + k] *= scale;
        }
        for (int r = 0; r < m_; ++r) {
            if (r == col) continue;
            const double factor = b[r * m_ + col];
            if (factor == 0.0) continue;
            for (int k = 0; k < m_; ++k) {
                b[r * m_ + k] -= factor * b[col * m_ + k];
                inv[r * m_ + k] -= factor * inv[col * m_ + k];
            }
        }
    }
    binv_ = std::move(inv);

    xb_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
        double v = 0.0;
        for (int k = 0; k < m_; ++k) v += binv_[r * m_ + k] * rhs_[k];
        xb_[r] = v;
    }
}

void SimplexSolver::set_basis(const std::vector<int>& basic_columns)
{
    if (basic_columns.size() != static_cast<std::size_t>(m_))
        throw std::invalid_argument("simplex: basis size must equal the row count");
    for (int c : basic_columns)
        if (c < 0 || c >= static_cast<int>(cols_.size()))
            throw std::invalid_argument("simplex: basis column index out of range");

    basis_ = basic_columns;
    col_row_.assign(cols_.size(), -1);
    for (int r = 0; r < m_; ++r) {
        if (col_row_[basis_[r]] != -1)
            throw std::invalid_argument("simplex: duplicate column in basis");
        col_row_[basis_[r]] = r;
    }
    refactorize();
    for (double v : xb_)
        if (v < -kFeasTol) throw std::invalid_argument("simplex: starting basis is infeasible");
    for (double& v : xb_)
        if (v < 0.0) v = 0.0;
    has_basis_ = true;
}

void SimplexSolver::solve_direction(int col, std::vector<double>& w) const
{
    // w = B^-1 a_col, exploiting the column's sparsity
    w.assign(m_, 0.0);
    for (const auto& [row, coeff] : cols_[col].entries)
        for (int r = 0; r < m_; ++r) w[r] += binv_[r * m_ + row] * coeff;
}

double SimplexSolver::maximize(const std::vector<double>& c, std::vector<double>& x)
{
    if (!has_basis_) throw std::logic_error("simplex: set_basis must be called first");
    if (c.size() != cols_.size())
        throw std::invalid_argument("simplex: objective size must equal the column count");

    std::vector<double> y(m_);
    std::vector<double> w;
    bool bland = false;
    int degenerate_streak = 0;

    for (int pivot_count = 0; pivot_count <= kMaxPivots; ++pivot_count) {
        // dual prices y = c_B^T B^-1
        for (int k = 0; k < m_; ++k) {
            double v = 0.0;
            for (int r = 0; r < m_; ++r) v += c[basis_[r]] * binv_[r * m_ + k];
            y[k] = v;
        }

        // price the nonbasic columns
        int entering = -1;
        double best_rc = kOptTol;
        for (std::size_t q = 0; q < cols_.size(); ++q) {
            if (col_row_[q] != -1) continue;
            double rc = c[q];
            for (const auto& [row, coeff] : cols_[q].entries) rc -= y[row] * coeff;
            if (rc > best_rc) {
                best_rc = rc;
                entering = static_cast<int>(q);
                if (bland) break; // lowest eligible index
            }
        }

        if (entering == -1) {
            // optimal: expose the vertex
            x.assign(cols_.size(), 0.0);
            double obj = 0.0;
            for (int r = 0; r < m_; ++r) {
                const double v = xb_[r] < 0.0 ? 0.0 : xb_[r];
                x[basis_[r]] = v;
                obj += c[basis_[r]] * v;
            }
            return obj;
        }

        solve_direction(entering, w);

        // ratio test; ties go to the lowest basic column index for stability
        int leave = -1;
        double step = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m_; ++r) {
            if (w[r] <= kPivotTol) continue;
            const double ratio = xb_[r] / w[r];
            if (ratio < step - 1e-12 ||
                (ratio < step + 1e-12 && (leave == -1 || basis_[r] < basis_[leave]))) {
                step = ratio;
                leave = r;
            }
        }
        if (leave == -1) throw std::logic_error("simplex: unbounded direction");

        if (step < 1e-12) {
            if (++degenerate_streak >= kBlandTrigger) bland = true;
        } else {
            degenerate_streak = 0;
            bland = false;
        }

        for (int r = 0; r < m_; ++r) xb_[r] -= step * w[r];
        xb_[leave] = step;
        col_row_[basis_[leave]] = -1;
        col_row_[entering] = leave;
        basis_[leave] = entering;

        // eta update of B^-1
        const double pivot = w[leave];
        double* lrow = &binv_[leave * m_];
        for (int k = 0; k < m_; ++k) lrow[k] /= pivot;
        for (int r = 0; r < m_; ++r) {
            if (r == leave || w[r] == 0.0) continue;
            const double factor = w[r];
            double* row = &binv_[r * m_];
            for (int k = 0; k < m_; ++k) row[k] -= factor * lrow[k];
        }

        ++pivots_;
        if (pivots_ % kRefactorEvery == 0) refactorize();
    }
    throw std::runtime_error("simplex: pivot budget exhausted");
}

} // namespace dbsim
