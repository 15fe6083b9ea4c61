#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/interval.hpp"
#include "nnbisim/merge.hpp"
#include "nnbisim/network.hpp"
#include "nnbisim/norm.hpp"
#include "nnbisim/parallel.hpp"
#include "nnbisim/rng.hpp"
#include "nnbisim/star.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace nnbisim {

enum class MethodKind { Interval, IntervalSplit, ExactStar };

/// Reachability back-end choice. `splits` (cells per input dimension) is
/// only read for IntervalSplit.
struct Method {
    MethodKind kind = MethodKind::Interval;
    std::size_t splits = 1;

    static Method interval() { return {MethodKind::Interval, 1}; }
    static Method split(std::size_t k) { return {MethodKind::IntervalSplit, k}; }
    static Method exact() { return {MethodKind::ExactStar, 1}; }

    std::string name() const
    {
        switch (kind) {
        case MethodKind::Interval: return "interval";
        case MethodKind::IntervalSplit: return "split(" + std::to_string(splits) + ")";
        case MethodKind::ExactStar: return "exact";
        }
        return "?";
    }

    friend bool operator==(const Method&, const Method&) = default;
};

/// Parses "interval", "split" or "exact"; `splits` fills in the split count.
inline Method parse_method(const std::string& s, std::size_t splits = 2)
{
    if (s == "interval")
        return Method::interval();
    if (s == "split")
        return Method::split(splits);
    if (s == "exact")
        return Method::exact();
    throw ArgumentError("unknown method '" + s + "' (expected interval, split or exact)");
}

/// Budgets and parallelism shared by all back-ends.
struct ReachLimits {
    std::size_t max_cells = 1'000'000;
    std::size_t star_cap = 100'000;
    unsigned jobs = 1;
};

struct ErrorBound {
    double epsilon_upper = 0.0;
    double epsilon_lower = 0.0;
    Method method;
    NormKind norm = NormKind::Linf;
    double wall_time_seconds = 0.0;
};

/// sup of the norm over an over-approximation of net's image of `in`.
inline double output_sup_norm(const Network& net, const Box& in, const Method& method, NormKind norm,
                              const ReachLimits& limits = {})
{
    switch (method.kind) {
    case MethodKind::Interval:
        return box_sup_norm(reach_box(net, in), norm);
    case MethodKind::IntervalSplit: {
        const SplitConfig cfg{method.splits, limits.max_cells};
        const std::size_t n = grid_cell_count(cfg.cells_per_dim, in.dim(), cfg.max_cells);
        std::vector<double> per_cell(n, 0.0);
        parallel_for(n, limits.jobs, [&](std::size_t i) {
            per_cell[i] = box_sup_norm(reach_box(net, grid_cell(in, cfg.cells_per_dim, i)), norm);
        });
        return *std::max_element(per_cell.begin(), per_cell.end());
    }
    case MethodKind::ExactStar: {
        const auto stars = reach_stars(net, box_to_star(in), limits.star_cap);
        std::vector<double> per_star(stars.size(), 0.0);
        parallel_for(stars.size(), limits.jobs,
                     [&](std::size_t i) { per_star[i] = box_sup_norm(star_bounds(stars[i]), norm); });
        return *std::max_element(per_star.begin(), per_star.end());
    }
    }
    throw ArgumentError("unknown method");
}

/// Certified upper bound on sup_{x in in} |large(x) - small(x)|, computed on
/// the merged difference network. Exact (up to LP tolerance) for ExactStar
/// with the Linf norm.
inline ErrorBound bisim_error_upper(const Network& large, const Network& small, const Box& in, const Method& method,
                                    NormKind norm = NormKind::Linf, const ReachLimits& limits = {})
{
    const auto start = std::chrono::steady_clock::now();
    const Network merged = merge(large, small);
    if (in.dim() != merged.input_dim)
        throw ShapeError("input box has dimension " + std::to_string(in.dim()) + ", networks expect " +
                         std::to_string(merged.input_dim));
    ErrorBound bound;
    bound.method = method;
    bound.norm = norm;
    bound.epsilon_upper = output_sup_norm(merged, in, method, norm, limits);
    bound.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return bound;
}

/// Sample `index` of the uniform sampler over `in` for a given seed.
inline Vector sample_box(const Box& in, std::uint64_t seed, std::uint64_t index)
{
    Vector x(static_cast<Eigen::Index>(in.dim()));
    for (Eigen::Index j = 0; j < x.size(); ++j)
        x[j] = in.lower()[j] +
               (in.upper()[j] - in.lower()[j]) * counter_uniform(seed, index, static_cast<std::uint64_t>(j));
    return x;
}

/// Max of the output discrepancy over `samples` seeded uniform inputs; a
/// lower bound on the true error.
inline double bisim_error_lower_mc(const Network& large, const Network& small, const Box& in, std::size_t samples,
                                   std::uint64_t seed, NormKind norm = NormKind::Linf, unsigned jobs = 1)
{
    if (samples == 0)
        throw ArgumentError("bisim_error_lower_mc needs at least one sample");
    if (in.dim() != large.input_dim || in.dim() != small.input_dim)
        throw ShapeError("input box dimension does not match the networks");
    std::vector<double> values(samples, 0.0);
    parallel_for(samples, jobs, [&](std::size_t i) {
        values[i] = vector_norm(difference_eval(large, small, sample_box(in, seed, i)), norm);
    });
    return *std::max_element(values.begin(), values.end());
}

/// True iff the certified bound is within eps. A false result from a
/// non-exact method does not show that the true error exceeds eps.
inline bool check_assured(const Network& large, const Network& small, const Box& in, double eps, const Method& method,
                          NormKind norm = NormKind::Linf, const ReachLimits& limits = {})
{
    if (!(eps >= 0.0))
        throw ArgumentError("eps must be non-negative");
    return bisim_error_upper(large, small, in, method, norm, limits).epsilon_upper <= eps;
}

} // namespace nnbisim
