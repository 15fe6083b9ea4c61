#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/interval.hpp"
#include "nnbisim/lp.hpp"
#include "nnbisim/metric.hpp"
#include "nnbisim/network.hpp"
#include "nnbisim/norm.hpp"
#include "nnbisim/star.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nnbisim {

/// {y : A y <= d}
struct Polytope {
    Matrix A;
    Vector d;

    bool contains(const Vector& y) const
    {
        const Vector lhs = A * y;
        for (Eigen::Index i = 0; i < lhs.size(); ++i)
            if (!(lhs[i] <= d[i]))
                return false;
        return true;
    }
};

/// Unsafe output region: the union of its polytopes.
struct LinearSpec {
    std::vector<Polytope> unsafe;

    bool contains(const Vector& y) const
    {
        for (const auto& p : unsafe)
            if (p.contains(y))
                return true;
        return false;
    }

    void check_dims(std::size_t output_dim) const
    {
        for (std::size_t j = 0; j < unsafe.size(); ++j) {
            const auto& p = unsafe[j];
            if (p.A.rows() == 0)
                throw ShapeError("unsafe polytope " + std::to_string(j) + " has no constraints");
            if (static_cast<std::size_t>(p.A.cols()) != output_dim)
                throw ShapeError("unsafe polytope " + std::to_string(j) + " has constraints over " +
                                 std::to_string(p.A.cols()) + " outputs, network has " + std::to_string(output_dim));
            if (p.d.size() != p.A.rows())
                throw ShapeError("unsafe polytope " + std::to_string(j) + " offsets do not match its rows");
        }
    }
};

enum class VerdictKind { Safe, Unsafe, Uncertain };

inline const char* to_string(VerdictKind v) noexcept
{
    switch (v) {
    case VerdictKind::Safe: return "Safe";
    case VerdictKind::Unsafe: return "Unsafe";
    case VerdictKind::Uncertain: return "Uncertain";
    }
    return "?";
}

struct Verdict {
    VerdictKind kind = VerdictKind::Uncertain;
    std::optional<Vector> witness; // present iff kind == Unsafe

    static Verdict safe() { return {VerdictKind::Safe, std::nullopt}; }
    static Verdict uncertain() { return {VerdictKind::Uncertain, std::nullopt}; }
    static Verdict unsafe(Vector x) { return {VerdictKind::Unsafe, std::move(x)}; }
};

struct VerifyOptions {
    ReachLimits limits;
    std::size_t samples = 10'000;
    std::uint64_t seed = 42;
};

/// Whether the box can meet the polytope (LP feasibility, with a cheap
/// single-constraint rejection first).
inline bool box_meets(const Box& box, const Polytope& p)
{
    for (Eigen::Index r = 0; r < p.A.rows(); ++r) {
        double lowest = 0.0;
        for (Eigen::Index j = 0; j < p.A.cols(); ++j) {
            const double a = p.A(r, j);
            lowest += a * (a >= 0.0 ? box.lower()[j] : box.upper()[j]);
        }
        if (lowest > p.d[r])
            return false;
    }
    const auto n = static_cast<Eigen::Index>(box.dim());
    Matrix A(p.A.rows() + 2 * n, n);
    Vector d(p.A.rows() + 2 * n);
    A << p.A, Matrix::Identity(n, n), -Matrix::Identity(n, n);
    d << p.d, box.upper(), -box.lower();
    return lp_feasible(A, d);
}

/// LP point of the star/polytope intersection in predicate coordinates, or
/// nullopt when they are disjoint.
inline std::optional<Vector> star_meets(const Star& star, const Polytope& p)
{
    const Matrix AV = p.A * star.basis();
    const Vector shifted = p.d - p.A * star.center();
    for (Eigen::Index r = 0; r < AV.rows(); ++r) {
        double lowest = 0.0;
        bool finite = true;
        for (Eigen::Index j = 0; j < AV.cols() && finite; ++j) {
            const double a = AV(r, j);
            const double bound = a >= 0.0 ? star.pred_lower()[j] : star.pred_upper()[j];
            if (a != 0.0 && !std::isfinite(bound))
                finite = false;
            else if (a != 0.0)
                lowest += a * bound;
        }
        if (finite && lowest > shifted[r])
            return std::nullopt;
    }
    Matrix A(star.constraints().rows() + AV.rows(), AV.cols());
    Vector d(A.rows());
    A << star.constraints(), AV;
    d << star.offsets(), shifted;
    LpResult r = lp_max(Vector::Zero(AV.cols()), A, d);
    if (r.status == LpStatus::Infeasible)
        return std::nullopt;
    return r.point;
}

namespace detail {

inline std::optional<Vector> first_violation(const Network& net, const LinearSpec& spec,
                                             const std::vector<Vector>& candidates)
{
    for (const auto& x : candidates)
        if (spec.contains(eval(net, x)))
            return x;
    return std::nullopt;
}

} // namespace detail

/// Reachability-based safety check against the unsafe region.
///
/// Safe when the output over-approximation misses every unsafe polytope.
/// Otherwise a deterministic search (split-grid cell centers, LP points from
/// the exact back-end, then seeded random inputs) looks for a concrete
/// violation: Unsafe with the witness if found, Uncertain if not.
inline Verdict verify(const Network& net, const Box& in, const LinearSpec& spec, const Method& method,
                      const VerifyOptions& opts = {})
{
    require_valid(net);
    if (in.dim() != net.input_dim)
        throw ShapeError("input box has dimension " + std::to_string(in.dim()) + ", network expects " +
                         std::to_string(net.input_dim));
    spec.check_dims(net.output_dim());

    std::vector<Vector> candidates;
    bool meets = false;
    if (method.kind == MethodKind::ExactStar) {
        const Star input = box_to_star(in);
        const auto stars = reach_stars(net, input, opts.limits.star_cap);
        for (const auto& s : stars) {
            for (const auto& p : spec.unsafe) {
                if (auto alpha = star_meets(s, p)) {
                    meets = true;
                    Vector x = input.point(*alpha).cwiseMax(in.lower()).cwiseMin(in.upper());
                    candidates.push_back(std::move(x));
                }
            }
        }
        if (meets)
            candidates.push_back(in.center());
    } else {
        const std::size_t k = method.kind == MethodKind::IntervalSplit ? method.splits : 1;
        const SplitConfig cfg{k, opts.limits.max_cells};
        const auto boxes = reach_box_split(net, in, cfg, opts.limits.jobs);
        for (std::size_t c = 0; c < boxes.size() && !meets; ++c)
            for (const auto& p : spec.unsafe)
                if (box_meets(boxes[c], p)) {
                    meets = true;
                    break;
                }
        if (meets)
            for (std::size_t c = 0; c < boxes.size(); ++c)
                candidates.push_back(grid_cell(in, k, c).center());
    }
    if (!meets)
        return Verdict::safe();

    if (auto x = detail::first_violation(net, spec, candidates))
        return Verdict::unsafe(std::move(*x));
    for (std::size_t i = 0; i < opts.samples; ++i) {
        Vector x = sample_box(in, opts.seed, i);
        if (spec.contains(eval(net, x)))
            return Verdict::unsafe(std::move(x));
    }
    return Verdict::uncertain();
}

/// Shifts every halfspace a.y <= b of the unsafe region to
/// a.y <= b + eps * |a|_dual, which covers all points within eps of it.
inline LinearSpec inflate_spec(const LinearSpec& spec, double eps, NormKind norm)
{
    if (!(eps >= 0.0))
        throw ArgumentError("inflation radius must be non-negative");
    LinearSpec out = spec;
    if (eps == 0.0)
        return out;
    for (auto& p : out.unsafe)
        for (Eigen::Index r = 0; r < p.A.rows(); ++r)
            p.d[r] += eps * dual_norm(p.A.row(r).transpose(), norm);
    return out;
}

/// One row of a compressed-verification table.
struct BisimReport {
    std::string network_id;
    double epsilon = 0.0;
    std::optional<double> time_large_seconds;
    double time_small_seconds = 0.0;
    std::optional<Verdict> verdict_large;
    Verdict verdict_small;
};

struct CompressedVerifyOptions {
    Method method = Method::split(2);        // for the error bound and the small-network check
    Method large_method = Method::exact();   // only used when also_large is set
    NormKind norm = NormKind::Linf;
    VerifyOptions verify;
    bool also_large = false;
};

/// Verifies `large` through its compressed version: bounds the error eps on
/// the merged network, then checks `small` against the unsafe region
/// inflated by eps. A Safe result carries over to `large`; anything else is
/// reported as Uncertain, never Unsafe. time_small covers both the error
/// bound and the small-network check.
inline BisimReport verify_via_compressed(const Network& large, const Network& small, const Box& in,
                                         const LinearSpec& spec, const CompressedVerifyOptions& opts = {},
                                         std::string id = {})
{
    spec.check_dims(large.output_dim());
    BisimReport report;
    report.network_id = std::move(id);

    const auto start = std::chrono::steady_clock::now();
    const ErrorBound bound = bisim_error_upper(large, small, in, opts.method, opts.norm, opts.verify.limits);
    report.epsilon = bound.epsilon_upper;
    const Verdict v = verify(small, in, inflate_spec(spec, bound.epsilon_upper, opts.norm), opts.method, opts.verify);
    report.verdict_small = v.kind == VerdictKind::Safe ? Verdict::safe() : Verdict::uncertain();
    report.time_small_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (opts.also_large) {
        const auto t0 = std::chrono::steady_clock::now();
        report.verdict_large = verify(large, in, spec, opts.large_method, opts.verify);
        report.time_large_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return report;
}

} // namespace nnbisim
