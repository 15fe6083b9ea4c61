#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/network.hpp"

#include <string>

namespace nnbisim {

namespace detail {

inline Matrix block_diagonal(const Matrix& top_left, const Matrix& bottom_right)
{
    Matrix m = Matrix::Zero(top_left.rows() + bottom_right.rows(), top_left.cols() + bottom_right.cols());
    m.topLeftCorner(top_left.rows(), top_left.cols()) = top_left;
    m.bottomRightCorner(bottom_right.rows(), bottom_right.cols()) = bottom_right;
    return m;
}

inline Vector stack(const Vector& top, const Vector& bottom)
{
    Vector v(top.size() + bottom.size());
    v << top, bottom;
    return v;
}

inline std::vector<Activation> stack(const std::vector<Activation>& top, const std::vector<Activation>& bottom)
{
    std::vector<Activation> v(top);
    v.insert(v.end(), bottom.begin(), bottom.end());
    return v;
}

} // namespace detail

/// Throws if (large, small) cannot be merged: equal input and output
/// widths, large at least as deep as small, small at least two layers deep.
inline void check_merge_preconditions(const Network& large, const Network& small)
{
    require_valid(large, "large network");
    require_valid(small, "small network");
    if (large.input_dim != small.input_dim)
        throw MergePreconditionError("input-dim", "large network has " + std::to_string(large.input_dim) +
                                                      " inputs, small network has " +
                                                      std::to_string(small.input_dim));
    if (large.output_dim() != small.output_dim())
        throw MergePreconditionError("output-dim", "large network has " + std::to_string(large.output_dim()) +
                                                       " outputs, small network has " +
                                                       std::to_string(small.output_dim()));
    if (large.depth() < small.depth())
        throw MergePreconditionError("depth-order", "large network has " + std::to_string(large.depth()) +
                                                        " layers, fewer than the small network's " +
                                                        std::to_string(small.depth()));
    if (small.depth() < 2)
        throw UnsupportedShapeError("small network must have at least 2 layers to be merged, it has " +
                                    std::to_string(small.depth()));
}

/// Builds the merged difference network of (large, small): L + 1 layers
/// whose output is eval(large, x) - eval(small, x) for every x.
///
/// Layer m (1-based) of the result is
///   m = 1           both first layers stacked on the shared input
///   1 < m <= S-1    diag(W_L^m, W_S^m)
///   S-1 < m <= L-1  diag(W_L^m, I), the small branch passes through unchanged
///   m = L           diag(W_L^L, W_S^S), both output layers
///   m = L+1         [I, -I] comparison layer
inline Network merge(const Network& large, const Network& small)
{
    check_merge_preconditions(large, small);
    const std::size_t L = large.depth();
    const std::size_t S = small.depth();
    const auto carried = static_cast<Eigen::Index>(small.layers[S - 2].outputs());

    Network merged;
    merged.input_dim = large.input_dim;
    merged.layers.reserve(L + 1);

    for (std::size_t m = 1; m <= L; ++m) {
        const Layer& l = large.layers[m - 1];
        Layer out;
        if (m == 1) {
            const Layer& s = small.layers[0];
            out.weights.resize(l.weights.rows() + s.weights.rows(), l.weights.cols());
            out.weights << l.weights, s.weights;
            out.bias = detail::stack(l.bias, s.bias);
            out.activations = detail::stack(l.activations, s.activations);
        } else if (m <= S - 1) {
            const Layer& s = small.layers[m - 1];
            out.weights = detail::block_diagonal(l.weights, s.weights);
            out.bias = detail::stack(l.bias, s.bias);
            out.activations = detail::stack(l.activations, s.activations);
        } else if (m <= L - 1) {
            out.weights = detail::block_diagonal(l.weights, Matrix::Identity(carried, carried));
            out.bias = detail::stack(l.bias, Vector::Zero(carried));
            out.activations =
                detail::stack(l.activations, std::vector<Activation>(static_cast<std::size_t>(carried), Activation::Identity));
        } else {
            const Layer& s = small.layers[S - 1];
            out.weights = detail::block_diagonal(l.weights, s.weights);
            out.bias = detail::stack(l.bias, s.bias);
            out.activations = detail::stack(l.activations, s.activations);
        }
        merged.layers.push_back(std::move(out));
    }

    const auto n_out = static_cast<Eigen::Index>(large.output_dim());
    Layer comparison;
    comparison.weights.resize(n_out, 2 * n_out);
    comparison.weights << Matrix::Identity(n_out, n_out), -Matrix::Identity(n_out, n_out);
    comparison.bias = Vector::Zero(n_out);
    comparison.activations.assign(static_cast<std::size_t>(n_out), Activation::Identity);
    merged.layers.push_back(std::move(comparison));
    return merged;
}

/// eval(large, x) - eval(small, x), computed on the two networks directly.
inline Vector difference_eval(const Network& large, const Network& small, const Vector& x)
{
    if (large.input_dim != small.input_dim)
        throw ShapeError("networks have different input dimensions");
    if (large.output_dim() != small.output_dim())
        throw ShapeError("networks have different output dimensions");
    return eval(large, x) - eval(small, x);
}

} // namespace nnbisim
