#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nnbisim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { ReLU, Identity };

inline const char* to_string(Activation a) noexcept
{
    return a == Activation::ReLU ? "relu" : "identity";
}

inline double activate(Activation a, double x) noexcept
{
    return a == Activation::ReLU ? (x > 0.0 ? x : 0.0) : x;
}

/// One affine layer followed by a per-neuron activation.
struct Layer {
    Matrix weights;                      // rows = outputs, cols = inputs
    Vector bias;                         // length = rows
    std::vector<Activation> activations; // length = rows

    std::size_t inputs() const noexcept { return static_cast<std::size_t>(weights.cols()); }
    std::size_t outputs() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

/// Feedforward network: layers[0] reads the input, the last layer is the
/// output layer.
struct Network {
    std::size_t input_dim = 0;
    std::vector<Layer> layers;

    std::size_t depth() const noexcept { return layers.size(); }
    std::size_t output_dim() const noexcept { return layers.empty() ? 0 : layers.back().outputs(); }

    std::size_t relu_count() const noexcept
    {
        std::size_t n = 0;
        for (const auto& layer : layers)
            for (auto a : layer.activations)
                n += a == Activation::ReLU;
        return n;
    }

    std::size_t parameter_count() const noexcept
    {
        std::size_t n = 0;
        for (const auto& layer : layers)
            n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
        return n;
    }
};

/// Axis-aligned box [lower, upper].
class Box {
public:
    Box() = default;

    Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper))
    {
        if (lower_.size() != upper_.size())
            throw ShapeError("box bounds have different lengths");
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
            if (!(lower_[i] <= upper_[i]))
                throw ArgumentError("box lower bound exceeds upper bound at index " + std::to_string(i));
    }

    static Box point(const Vector& x) { return Box(x, x); }

    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.size()); }

    Vector center() const { return 0.5 * (lower_ + upper_); }

    bool contains(const Vector& x, double tol = 0.0) const
    {
        if (x.size() != lower_.size())
            return false;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol)
                return false;
        return true;
    }

    /// Componentwise inclusion: this ⊆ other.
    bool subset_of(const Box& other, double tol = 0.0) const
    {
        if (other.dim() != dim())
            return false;
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
            if (lower_[i] < other.lower_[i] - tol || upper_[i] > other.upper_[i] + tol)
                return false;
        return true;
    }

    /// Uniform sample; `u` supplies numbers in [0, 1).
    template <typename Uniform>
    Vector sample(Uniform&& u) const
    {
        Vector x(lower_.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = lower_[i] + (upper_[i] - lower_[i]) * u();
        return x;
    }

private:
    Vector lower_;
    Vector upper_;
};

/// Applies one layer to x. Throws ShapeError on a width mismatch.
inline Vector eval_layer(const Layer& layer, const Vector& x)
{
    if (static_cast<std::size_t>(x.size()) != layer.inputs())
        throw ShapeError("layer expects " + std::to_string(layer.inputs()) + " inputs, got " +
                         std::to_string(x.size()));
    Vector y = layer.weights * x + layer.bias;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        y[i] = activate(layer.activations[static_cast<std::size_t>(i)], y[i]);
    return y;
}

inline Vector eval(const Network& net, const Vector& x)
{
    if (static_cast<std::size_t>(x.size()) != net.input_dim)
        throw ShapeError("input has length " + std::to_string(x.size()) + ", network expects " +
                         std::to_string(net.input_dim));
    Vector y = x;
    for (const auto& layer : net.layers)
        y = eval_layer(layer, y);
    return y;
}

struct Violation {
    std::size_t layer;
    std::string message;
};

/// Lists every broken structural invariant; empty means well-formed.
inline std::vector<Violation> validate(const Network& net)
{
    std::vector<Violation> out;
    if (net.input_dim == 0)
        out.push_back({0, "input dimension is zero"});
    if (net.layers.empty())
        out.push_back({0, "network has no layers"});
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto& layer = net.layers[k];
        const std::size_t expected_cols = k == 0 ? net.input_dim : net.layers[k - 1].outputs();
        if (layer.inputs() != expected_cols)
            out.push_back({k, "weight matrix has " + std::to_string(layer.inputs()) + " columns, expected " +
                                  std::to_string(expected_cols)});
        if (static_cast<std::size_t>(layer.bias.size()) != layer.outputs())
            out.push_back({k, "bias has length " + std::to_string(layer.bias.size()) + ", expected " +
                                  std::to_string(layer.outputs())});
        if (layer.activations.size() != layer.outputs())
            out.push_back({k, "activation list has length " + std::to_string(layer.activations.size()) +
                                  ", expected " + std::to_string(layer.outputs())});
    }
    return out;
}

inline void require_valid(const Network& net, const std::string& what = "network")
{
    auto violations = validate(net);
    if (!violations.empty())
        throw ShapeError(what + " layer " + std::to_string(violations.front().layer) + ": " +
                         violations.front().message);
}

/// Random network with sizes [n0, n1, ..., nL]. Weights and biases are
/// uniform in [-weight_range, weight_range]; hidden layers are ReLU and the
/// output layer is Identity.
inline Network random_network(const std::vector<std::size_t>& layer_sizes, double weight_range, std::uint64_t seed)
{
    if (layer_sizes.size() < 2)
        throw ArgumentError("random_network needs at least an input and an output size");
    if (!(weight_range > 0.0))
        throw ArgumentError("weight_range must be positive");
    for (auto s : layer_sizes)
        if (s == 0)
            throw ArgumentError("layer sizes must be positive");

    CounterRng rng(seed, 0x6e6574);
    Network net;
    net.input_dim = layer_sizes.front();
    for (std::size_t k = 1; k < layer_sizes.size(); ++k) {
        const auto rows = static_cast<Eigen::Index>(layer_sizes[k]);
        const auto cols = static_cast<Eigen::Index>(layer_sizes[k - 1]);
        Layer layer;
        layer.weights.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                layer.weights(i, j) = rng.uniform(-weight_range, weight_range);
        layer.bias.resize(rows);
        for (Eigen::Index i = 0; i < rows; ++i)
            layer.bias[i] = rng.uniform(-weight_range, weight_range);
        const bool output = k + 1 == layer_sizes.size();
        layer.activations.assign(layer_sizes[k], output ? Activation::Identity : Activation::ReLU);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

/// Network that ignores its input and always returns `value`, built with
/// `depth` layers of zero weights (hidden widths 1).
inline Network constant_network(std::size_t input_dim, const Vector& value, std::size_t depth = 2)
{
    if (depth == 0 || input_dim == 0)
        throw ArgumentError("constant_network needs positive depth and input dimension");
    Network net;
    net.input_dim = input_dim;
    std::size_t prev = input_dim;
    for (std::size_t k = 0; k < depth; ++k) {
        const bool output = k + 1 == depth;
        const auto rows = output ? static_cast<std::size_t>(value.size()) : std::size_t{1};
        Layer layer;
        layer.weights = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(prev));
        layer.bias = output ? value : Vector::Zero(1);
        layer.activations.assign(rows, output ? Activation::Identity : Activation::ReLU);
        net.layers.push_back(std::move(layer));
        prev = rows;
    }
    return net;
}

} // namespace nnbisim
