#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/network.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace nnbisim {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) noexcept
{
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

/// value and point are meaningful only when status == Optimal.
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Vector point;
};

struct LpTolerances {
    double pivot = 1e-11;       // tableau entries at or below this count as zero
    double feasibility = 1e-9;  // phase-one residual tolerated as feasible (relative to max|d|)
    double optimality = 1e-9;   // reduced costs at or below this count as non-improving
};

namespace detail {

// Dense two-phase tableau simplex with Bland's rule. Free variables are split
// as x = x+ - x-, each row gets a slack, and rows with negative right-hand
// side get an artificial variable.
class Tableau {
public:
    Tableau(const Vector& objective, const Matrix& A, const Vector& d, const LpTolerances& tol)
        : tol_(tol), vars_(A.cols()), rows_(A.rows())
    {
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (d[i] < 0.0)
                ++artificials_;
        first_slack_ = 2 * vars_;
        first_artificial_ = first_slack_ + rows_;
        cols_ = first_artificial_ + artificials_;
        rhs_ = cols_;

        t_ = Matrix::Zero(rows_, cols_ + 1);
        basis_.assign(static_cast<std::size_t>(rows_), 0);
        active_.assign(static_cast<std::size_t>(rows_), true);
        Eigen::Index art = first_artificial_;
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const double sign = d[i] < 0.0 ? -1.0 : 1.0;
            t_.row(i).segment(0, vars_) = sign * A.row(i);
            t_.row(i).segment(vars_, vars_) = -sign * A.row(i);
            t_(i, first_slack_ + i) = sign;
            t_(i, rhs_) = sign * d[i];
            if (d[i] < 0.0) {
                t_(i, art) = 1.0;
                basis_[static_cast<std::size_t>(i)] = art++;
            } else {
                basis_[static_cast<std::size_t>(i)] = first_slack_ + i;
            }
        }
        scale_ = 1.0;
        for (Eigen::Index i = 0; i < rows_; ++i)
            scale_ = std::max(scale_, std::abs(d[i]));
        cost_ = Vector::Zero(cols_);
        objective_ = objective;
    }

    LpResult solve()
    {
        if (!t_.allFinite() || !objective_.allFinite())
            throw DegenerateLpError("LP data contains non-finite values");

        if (artificials_ > 0) {
            cost_.setZero();
            cost_.segment(first_artificial_, artificials_).setConstant(-1.0);
            if (!run(/*allow_artificial=*/true))
                throw DegenerateLpError("phase one reported unbounded, which cannot happen for a bounded objective");
            if (current_value() < -tol_.feasibility * scale_)
                return {LpStatus::Infeasible, 0.0, Vector()};
            drive_out_artificials();
        }

        cost_.setZero();
        cost_.segment(0, vars_) = objective_;
        cost_.segment(vars_, vars_) = -objective_;
        if (!run(/*allow_artificial=*/false))
            return {LpStatus::Unbounded, 0.0, Vector()};

        Vector x = Vector::Zero(2 * vars_);
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const auto b = basis_[static_cast<std::size_t>(i)];
            if (active_[static_cast<std::size_t>(i)] && b < 2 * vars_)
                x[b] = t_(i, rhs_);
        }
        Vector point = x.head(vars_) - x.tail(vars_);
        return {LpStatus::Optimal, objective_.dot(point), std::move(point)};
    }

private:
    double current_value() const
    {
        double z = 0.0;
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (active_[static_cast<std::size_t>(i)])
                z += cost_[basis_[static_cast<std::size_t>(i)]] * t_(i, rhs_);
        return z;
    }

    double reduced_cost(Eigen::Index j) const
    {
        double r = cost_[j];
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (active_[static_cast<std::size_t>(i)])
                r -= cost_[basis_[static_cast<std::size_t>(i)]] * t_(i, j);
        return r;
    }

    void pivot(Eigen::Index row, Eigen::Index col)
    {
        const double p = t_(row, col);
        if (!(std::abs(p) > tol_.pivot))
            throw DegenerateLpError("pivot magnitude " + std::to_string(p) + " below tolerance");
        t_.row(row) /= p;
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (i == row)
                continue;
            const double f = t_(i, col);
            if (f != 0.0)
                t_.row(i) -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Returns false when the objective is unbounded.
    bool run(bool allow_artificial)
    {
        const Eigen::Index limit = allow_artificial ? cols_ : first_artificial_;
        const std::size_t max_iterations = 50 * static_cast<std::size_t>(rows_ + cols_ + 1) + 1000;
        for (std::size_t iter = 0; iter < max_iterations; ++iter) {
            Eigen::Index entering = -1;
            for (Eigen::Index j = 0; j < limit; ++j) {
                if (reduced_cost(j) > tol_.optimality) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0)
                return true;

            Eigen::Index leaving = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows_; ++i) {
                if (!active_[static_cast<std::size_t>(i)])
                    continue;
                const double a = t_(i, entering);
                if (a <= tol_.pivot)
                    continue;
                const double ratio = std::max(0.0, t_(i, rhs_)) / a;
                if (ratio < best || (ratio == best && basis_[static_cast<std::size_t>(i)] <
                                                          basis_[static_cast<std::size_t>(leaving)])) {
                    best = ratio;
                    leaving = i;
                }
            }
            if (leaving < 0)
                return false;
            pivot(leaving, entering);
        }
        throw DegenerateLpError("simplex did not terminate within the iteration limit");
    }

    void drive_out_artificials()
    {
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (!active_[static_cast<std::size_t>(i)] || basis_[static_cast<std::size_t>(i)] < first_artificial_)
                continue;
            Eigen::Index col = -1;
            for (Eigen::Index j = 0; j < first_artificial_; ++j) {
                if (std::abs(t_(i, j)) > tol_.pivot) {
                    col = j;
                    break;
                }
            }
            if (col >= 0)
                pivot(i, col);
            else
                active_[static_cast<std::size_t>(i)] = false; // redundant row
        }
    }

    LpTolerances tol_;
    Eigen::Index vars_;
    Eigen::Index rows_;
    Eigen::Index artificials_ = 0;
    Eigen::Index first_slack_ = 0;
    Eigen::Index first_artificial_ = 0;
    Eigen::Index cols_ = 0;
    Eigen::Index rhs_ = 0;
    double scale_ = 1.0;
    Matrix t_;
    Vector cost_;
    Vector objective_;
    std::vector<Eigen::Index> basis_;
    std::vector<bool> active_;
};

} // namespace detail

/// Maximizes objective . x subject to A x <= d with x free.
inline LpResult lp_max(const Vector& objective, const Matrix& A, const Vector& d, const LpTolerances& tol = {})
{
    if (objective.size() != A.cols())
        throw ShapeError("lp_max: objective has length " + std::to_string(objective.size()) + ", constraint matrix has " +
                         std::to_string(A.cols()) + " columns");
    if (d.size() != A.rows())
        throw ShapeError("lp_max: right-hand side has length " + std::to_string(d.size()) + ", constraint matrix has " +
                         std::to_string(A.rows()) + " rows");
    return detail::Tableau(objective, A, d, tol).solve();
}

/// True when {x : A x <= d} is non-empty (within the feasibility tolerance).
inline bool lp_feasible(const Matrix& A, const Vector& d, const LpTolerances& tol = {})
{
    return lp_max(Vector::Zero(A.cols()), A, d, tol).status != LpStatus::Infeasible;
}

} // namespace nnbisim
