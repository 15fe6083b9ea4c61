#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/network.hpp"
#include "nnbisim/parallel.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace nnbisim {

/// Interval image of {W x + b : x in in}.
inline Box affine_bounds(const Matrix& weights, const Vector& bias, const Box& in)
{
    if (static_cast<std::size_t>(weights.cols()) != in.dim())
        throw ShapeError("affine_bounds: matrix has " + std::to_string(weights.cols()) + " columns, box has dimension " +
                         std::to_string(in.dim()));
    if (bias.size() != weights.rows())
        throw ShapeError("affine_bounds: bias length does not match matrix rows");
    Vector lo = bias;
    Vector hi = bias;
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            const double w = weights(i, j);
            if (w >= 0.0) {
                lo[i] += w * in.lower()[j];
                hi[i] += w * in.upper()[j];
            } else {
                lo[i] += w * in.upper()[j];
                hi[i] += w * in.lower()[j];
            }
        }
    }
    return Box(std::move(lo), std::move(hi));
}

inline Box act_bounds(const std::vector<Activation>& acts, const Box& in)
{
    if (acts.size() != in.dim())
        throw ShapeError("act_bounds: activation list and box have different lengths");
    Vector lo = in.lower();
    Vector hi = in.upper();
    for (std::size_t i = 0; i < acts.size(); ++i) {
        if (acts[i] == Activation::ReLU) {
            const auto k = static_cast<Eigen::Index>(i);
            lo[k] = lo[k] > 0.0 ? lo[k] : 0.0;
            hi[k] = hi[k] > 0.0 ? hi[k] : 0.0;
        }
    }
    return Box(std::move(lo), std::move(hi));
}

/// Interval over-approximation of the network's image of `in`.
inline Box reach_box(const Network& net, const Box& in)
{
    if (in.dim() != net.input_dim)
        throw ShapeError("reach_box: box dimension " + std::to_string(in.dim()) + " does not match network input " +
                         std::to_string(net.input_dim));
    Box current = in;
    for (const auto& layer : net.layers)
        current = act_bounds(layer.activations, affine_bounds(layer.weights, layer.bias, current));
    return current;
}

struct SplitConfig {
    std::size_t cells_per_dim = 1;
    std::size_t max_cells = 1'000'000;
};

/// k^d, or throws ResourceError once the product passes `cap`.
inline std::size_t grid_cell_count(std::size_t k, std::size_t dims, std::size_t cap)
{
    if (k == 0)
        throw ArgumentError("cells_per_dim must be at least 1");
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) {
        if (total > cap / k)
            throw ResourceError("split grid with " + std::to_string(k) + " cells per dimension over " +
                                std::to_string(dims) + " dimensions exceeds the cap of " + std::to_string(cap) +
                                " cells");
        total *= k;
    }
    if (total > cap)
        throw ResourceError("split grid exceeds the cap of " + std::to_string(cap) + " cells");
    return total;
}

/// Cell `index` (row-major over dimensions, first dimension slowest) of the
/// uniform k^d grid over `in`. Grid coordinates are lower + width * (i / k),
/// so a grid refining another (k1 divides k2) has bit-identical nested cells.
inline Box grid_cell(const Box& in, std::size_t k, std::size_t index)
{
    const auto d = static_cast<Eigen::Index>(in.dim());
    Vector lo(d), hi(d);
    for (Eigen::Index j = d - 1; j >= 0; --j) {
        const std::size_t i = index % k;
        index /= k;
        const double a = in.lower()[j];
        const double w = in.upper()[j] - a;
        lo[j] = i == 0 ? a : a + w * (static_cast<double>(i) / static_cast<double>(k));
        hi[j] = i + 1 == k ? in.upper()[j] : a + w * (static_cast<double>(i + 1) / static_cast<double>(k));
    }
    return Box(std::move(lo), std::move(hi));
}

inline std::vector<Box> grid_cells(const Box& in, const SplitConfig& cfg)
{
    const std::size_t n = grid_cell_count(cfg.cells_per_dim, in.dim(), cfg.max_cells);
    std::vector<Box> cells;
    cells.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cells.push_back(grid_cell(in, cfg.cells_per_dim, i));
    return cells;
}

/// reach_box on every cell of the uniform split of `in`, in grid order.
inline std::vector<Box> reach_box_split(const Network& net, const Box& in, const SplitConfig& cfg,
                                        unsigned jobs = 1)
{
    if (in.dim() != net.input_dim)
        throw ShapeError("reach_box_split: box dimension does not match network input");
    const std::size_t n = grid_cell_count(cfg.cells_per_dim, in.dim(), cfg.max_cells);
    std::vector<Box> out(n);
    parallel_for(n, jobs, [&](std::size_t i) { out[i] = reach_box(net, grid_cell(in, cfg.cells_per_dim, i)); });
    return out;
}

/// Smallest box containing every box in the list (non-empty).
inline Box hull(const std::vector<Box>& boxes)
{
    if (boxes.empty())
        throw ArgumentError("hull of an empty box list");
    Vector lo = boxes.front().lower();
    Vector hi = boxes.front().upper();
    for (const auto& b : boxes) {
        lo = lo.cwiseMin(b.lower());
        hi = hi.cwiseMax(b.upper());
    }
    return Box(std::move(lo), std::move(hi));
}

} // namespace nnbisim
