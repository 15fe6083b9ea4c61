#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/lp.hpp"
#include "nnbisim/network.hpp"
#include "nnbisim/norm.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace nnbisim {

/// Star set {center + basis * a : constraints * a <= offsets}.
///
/// `pred_lower`/`pred_upper` are box bounds on the predicate variable a that
/// the constraints already imply (the unit box for stars built from input
/// boxes). They let neurons with a fixed sign skip the LP.
class Star {
public:
    /// Builds a star and checks that its constraint set is feasible.
    Star(Vector center, Matrix basis, Matrix constraints, Vector offsets)
        : Star(std::move(center), std::move(basis), std::move(constraints), std::move(offsets), Unchecked{})
    {
        pred_lower_ = Vector::Constant(basis_.cols(), -std::numeric_limits<double>::infinity());
        pred_upper_ = Vector::Constant(basis_.cols(), std::numeric_limits<double>::infinity());
        if (!lp_feasible(constraints_, offsets_))
            throw ArgumentError("star constraint set is empty");
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(center_.size()); }
    std::size_t predicate_dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }

    const Vector& center() const noexcept { return center_; }
    const Matrix& basis() const noexcept { return basis_; }
    const Matrix& constraints() const noexcept { return constraints_; }
    const Vector& offsets() const noexcept { return offsets_; }
    const Vector& pred_lower() const noexcept { return pred_lower_; }
    const Vector& pred_upper() const noexcept { return pred_upper_; }

    Vector point(const Vector& alpha) const { return center_ + basis_ * alpha; }

    /// Image under x -> W x + b.
    Star affine_map(const Matrix& weights, const Vector& bias) const
    {
        if (static_cast<std::size_t>(weights.cols()) != dim() || bias.size() != weights.rows())
            throw ShapeError("star affine map has mismatched dimensions");
        Star s = *this;
        s.center_ = weights * center_ + bias;
        s.basis_ = weights * basis_;
        return s;
    }

    /// Range of coordinate i over the predicate box (not the constraints);
    /// sound but possibly loose.
    std::pair<double, double> quick_range(std::size_t i) const
    {
        const auto r = static_cast<Eigen::Index>(i);
        double lo = center_[r];
        double hi = center_[r];
        for (Eigen::Index j = 0; j < basis_.cols(); ++j) {
            const double v = basis_(r, j);
            if (v > 0.0) {
                lo += v * pred_lower_[j];
                hi += v * pred_upper_[j];
            } else if (v < 0.0) {
                lo += v * pred_upper_[j];
                hi += v * pred_lower_[j];
            }
        }
        return {lo, hi};
    }

    /// LP maximum of direction . y over the star.
    LpResult maximize(const Vector& direction) const
    {
        LpResult r = lp_max(basis_.transpose() * direction, constraints_, offsets_);
        if (r.status == LpStatus::Optimal)
            r.value += direction.dot(center_);
        return r;
    }

    /// Adds the constraint direction . y <= bound (in output coordinates).
    Star with_halfspace(const Vector& direction, double bound) const
    {
        Star s = *this;
        const auto q = constraints_.rows();
        s.constraints_.conservativeResize(q + 1, Eigen::NoChange);
        s.constraints_.row(q) = (basis_.transpose() * direction).transpose();
        s.offsets_.conservativeResize(q + 1);
        s.offsets_[q] = bound - direction.dot(center_);
        return s;
    }

    /// Sets coordinate i to zero.
    Star with_zeroed(std::size_t i) const
    {
        Star s = *this;
        s.center_[static_cast<Eigen::Index>(i)] = 0.0;
        s.basis_.row(static_cast<Eigen::Index>(i)).setZero();
        return s;
    }

    /// Whether y = center + basis * a for some feasible a (equality relaxed to `tol`).
    bool contains(const Vector& y, double tol = 1e-9) const
    {
        if (static_cast<std::size_t>(y.size()) != dim())
            throw ShapeError("star membership query has wrong dimension");
        const auto n = basis_.rows();
        const auto q = constraints_.rows();
        Matrix A(q + 2 * n, basis_.cols());
        Vector d(q + 2 * n);
        A << constraints_, basis_, -basis_;
        d << offsets_, (y - center_).array() + tol, (center_ - y).array() + tol;
        return lp_feasible(A, d);
    }

    friend Star box_to_star(const Box& in);

private:
    struct Unchecked {};

    Star(Vector center, Matrix basis, Matrix constraints, Vector offsets, Unchecked)
        : center_(std::move(center)), basis_(std::move(basis)), constraints_(std::move(constraints)),
          offsets_(std::move(offsets))
    {
        if (basis_.rows() != center_.size())
            throw ShapeError("star basis rows do not match center length");
        if (constraints_.cols() != basis_.cols())
            throw ShapeError("star constraint columns do not match basis columns");
        if (offsets_.size() != constraints_.rows())
            throw ShapeError("star offsets do not match constraint rows");
    }

    Vector center_;
    Matrix basis_;
    Matrix constraints_;
    Vector offsets_;
    Vector pred_lower_;
    Vector pred_upper_;
};

/// Center = midpoint, basis = diag(half-widths), predicate |a_i| <= 1.
inline Star box_to_star(const Box& in)
{
    const auto n = static_cast<Eigen::Index>(in.dim());
    Matrix A(2 * n, n);
    A << Matrix::Identity(n, n), -Matrix::Identity(n, n);
    Star s(in.center(), Matrix((0.5 * (in.upper() - in.lower())).asDiagonal()), std::move(A), Vector::Ones(2 * n),
           Star::Unchecked{});
    s.pred_lower_ = Vector::Constant(n, -1.0);
    s.pred_upper_ = Vector::Constant(n, 1.0);
    return s;
}

namespace detail {

// Exact ReLU on neuron i for one star; appends the surviving pieces.
inline void relu_split(const Star& star, std::size_t i, std::vector<Star>& out)
{
    auto [lo, hi] = star.quick_range(i);
    if (lo < 0.0 && hi > 0.0) {
        Vector e = Vector::Zero(static_cast<Eigen::Index>(star.dim()));
        e[static_cast<Eigen::Index>(i)] = 1.0;
        const LpResult up = star.maximize(e);
        const LpResult down = star.maximize(-e);
        if (up.status != LpStatus::Optimal || down.status != LpStatus::Optimal)
            throw DegenerateLpError("star neuron range LP did not reach an optimum");
        hi = up.value;
        lo = -down.value;
    }
    if (lo >= 0.0) {
        out.push_back(star);
        return;
    }
    if (hi <= 0.0) {
        out.push_back(star.with_zeroed(i));
        return;
    }
    Vector e = Vector::Zero(static_cast<Eigen::Index>(star.dim()));
    e[static_cast<Eigen::Index>(i)] = 1.0;
    out.push_back(star.with_halfspace(-e, 0.0));              // y_i >= 0, kept
    out.push_back(star.with_halfspace(e, 0.0).with_zeroed(i)); // y_i <= 0, zeroed
}

} // namespace detail

/// Exact image of `in` under the network as a union of stars. Neurons are
/// split layer by layer in ascending index order.
inline std::vector<Star> reach_stars(const Network& net, const Star& in, std::size_t star_cap = 100'000)
{
    if (in.dim() != net.input_dim)
        throw ShapeError("reach_stars: star dimension " + std::to_string(in.dim()) + " does not match network input " +
                         std::to_string(net.input_dim));
    if (star_cap == 0)
        throw ArgumentError("star_cap must be at least 1");
    std::vector<Star> current{in};
    for (const auto& layer : net.layers) {
        for (auto& s : current)
            s = s.affine_map(layer.weights, layer.bias);
        for (std::size_t i = 0; i < layer.activations.size(); ++i) {
            if (layer.activations[i] != Activation::ReLU)
                continue;
            std::vector<Star> next;
            next.reserve(current.size());
            for (const auto& s : current)
                detail::relu_split(s, i, next);
            if (next.size() > star_cap)
                throw ResourceError("star count " + std::to_string(next.size()) + " exceeds the cap of " +
                                    std::to_string(star_cap));
            current = std::move(next);
        }
    }
    return current;
}

/// Per-coordinate [min, max] of one star via two LPs per coordinate.
inline Box star_bounds(const Star& star)
{
    const auto n = static_cast<Eigen::Index>(star.dim());
    Vector lo(n), hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (star.basis().row(i).isZero(0.0)) {
            lo[i] = hi[i] = star.center()[i];
            continue;
        }
        Vector e = Vector::Zero(n);
        e[i] = 1.0;
        const LpResult up = star.maximize(e);
        const LpResult down = star.maximize(-e);
        if (up.status != LpStatus::Optimal || down.status != LpStatus::Optimal)
            throw DegenerateLpError("star bound LP did not reach an optimum");
        hi[i] = up.value;
        lo[i] = std::min(-down.value, up.value);
    }
    return Box(std::move(lo), std::move(hi));
}

/// Supremum of the norm over the union of stars. Linf is exact; L2 returns
/// sqrt(sum_i max(lo_i^2, hi_i^2)) per star, an upper bound on the true sup.
inline double star_sup_norm(const std::vector<Star>& stars, NormKind norm)
{
    if (stars.empty())
        throw ArgumentError("star_sup_norm of an empty star list");
    double best = 0.0;
    for (const auto& s : stars) {
        if (s.dim() != stars.front().dim())
            throw ShapeError("star_sup_norm: stars have different dimensions");
        best = std::max(best, box_sup_norm(star_bounds(s), norm));
    }
    return best;
}

/// Whether y lies in the union of stars.
inline bool stars_contain(const std::vector<Star>& stars, const Vector& y, double tol = 1e-9)
{
    for (const auto& s : stars)
        if (s.contains(y, tol))
            return true;
    return false;
}

} // namespace nnbisim
