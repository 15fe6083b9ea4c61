#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/network.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nnbisim {

/// Normalization data carried by NNet files. means/ranges have one extra
/// trailing entry that applies to every output.
struct NNetMeta {
    Vector input_mins;
    Vector input_maxes;
    Vector means;
    Vector ranges;

    /// Unbounded inputs, zero means, unit ranges.
    static NNetMeta identity(std::size_t input_dim)
    {
        const auto n = static_cast<Eigen::Index>(input_dim);
        return {Vector::Constant(n, std::numeric_limits<double>::lowest()),
                Vector::Constant(n, std::numeric_limits<double>::max()), Vector::Zero(n + 1), Vector::Ones(n + 1)};
    }

    void check(std::size_t input_dim) const
    {
        const auto n = static_cast<Eigen::Index>(input_dim);
        if (input_mins.size() != n || input_maxes.size() != n || means.size() != n + 1 || ranges.size() != n + 1)
            throw ShapeError("NNet normalization vectors do not match input size " + std::to_string(input_dim));
        for (Eigen::Index i = 0; i < ranges.size(); ++i)
            if (ranges[i] == 0.0)
                throw ArgumentError("NNet range entry " + std::to_string(i) + " is zero");
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(input_mins[i] <= input_maxes[i]))
                throw ArgumentError("NNet input min exceeds max at index " + std::to_string(i));
    }
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct NumberedLine {
    std::size_t number;
    std::string_view text;
};

class NNetReader {
public:
    explicit NNetReader(std::string_view text)
    {
        std::size_t number = 0;
        std::size_t pos = 0;
        bool header = true;
        while (pos <= text.size()) {
            const std::size_t end = std::min(text.find('\n', pos), text.size());
            std::string_view line = trim(text.substr(pos, end - pos));
            ++number;
            pos = end + 1;
            const bool last = end == text.size();
            if (!line.empty() && !(header && line.substr(0, 2) == "//")) {
                header = false;
                lines_.push_back({number, line});
            }
            if (last)
                break;
        }
    }

    std::vector<double> next(const char* what, std::size_t expected)
    {
        if (cursor_ >= lines_.size())
            throw ParseError("line " + std::to_string(last_line() + 1),
                             std::string("unexpected end of file, expected ") + what);
        const auto [number, text] = lines_[cursor_++];
        const std::string where = "line " + std::to_string(number) + " (" + what + ")";
        std::vector<double> values;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t end = std::min(text.find(',', pos), text.size());
            const std::string_view token = trim(text.substr(pos, end - pos));
            pos = end + 1;
            if (!token.empty()) {
                double v = 0.0;
                const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
                if (ec != std::errc() || ptr != token.data() + token.size())
                    throw ParseError(where, "'" + std::string(token) + "' is not a number");
                values.push_back(v);
            }
            if (end == text.size())
                break;
        }
        if (expected != 0 && values.size() != expected)
            throw ParseError(where, "expected " + std::to_string(expected) + " values, found " +
                                        std::to_string(values.size()));
        return values;
    }

    bool done() const noexcept { return cursor_ >= lines_.size(); }
    std::size_t current_line() const noexcept { return cursor_ < lines_.size() ? lines_[cursor_].number : last_line() + 1; }

private:
    std::size_t last_line() const noexcept { return lines_.empty() ? 0 : lines_.back().number; }

    std::vector<NumberedLine> lines_;
    std::size_t cursor_ = 0;
};

inline std::size_t as_count(double v, const std::string& where, const char* what)
{
    if (!(v >= 1.0 && v <= 1e9) || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ParseError(where, std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

inline void append_number(std::string& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

inline void append_row(std::string& out, const double* values, std::size_t n, std::ptrdiff_t stride = 1)
{
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            out += ',';
        append_number(out, values[static_cast<std::ptrdiff_t>(i) * stride]);
    }
    out += '\n';
}

} // namespace detail

/// Parses an NNet file. Hidden layers get ReLU, the output layer Identity.
inline std::pair<Network, NNetMeta> parse_nnet(std::string_view text)
{
    detail::NNetReader in(text);
    const std::string header_line = "line " + std::to_string(in.current_line());
    const auto header = in.next("header", 4);
    const std::size_t num_layers = detail::as_count(header[0], header_line, "numLayers");
    const std::size_t input_size = detail::as_count(header[1], header_line, "inputSize");
    const std::size_t output_size = detail::as_count(header[2], header_line, "outputSize");
    const std::size_t max_layer = detail::as_count(header[3], header_line, "maxLayerSize");

    const std::string sizes_line = "line " + std::to_string(in.current_line()) + " (layer sizes)";
    const auto raw_sizes = in.next("layer sizes", num_layers + 1);
    std::vector<std::size_t> sizes;
    for (double v : raw_sizes)
        sizes.push_back(detail::as_count(v, sizes_line, "layer size"));
    if (sizes.front() != input_size)
        throw ParseError(sizes_line, "first layer size does not match inputSize");
    if (sizes.back() != output_size)
        throw ParseError(sizes_line, "last layer size does not match outputSize");
    if (*std::max_element(sizes.begin(), sizes.end()) != max_layer)
        throw ParseError(sizes_line, "largest layer size does not match maxLayerSize");

    in.next("legacy flag", 0);

    auto as_vector = [](const std::vector<double>& v) {
        return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
    };
    NNetMeta meta;
    const std::string meta_line = "line " + std::to_string(in.current_line());
    meta.input_mins = as_vector(in.next("input minimums", input_size));
    meta.input_maxes = as_vector(in.next("input maximums", input_size));
    meta.means = as_vector(in.next("means", input_size + 1));
    meta.ranges = as_vector(in.next("ranges", input_size + 1));
    try {
        meta.check(input_size);
    } catch (const Error& e) {
        throw ParseError(meta_line, e.what());
    }

    Network net;
    net.input_dim = input_size;
    for (std::size_t k = 0; k < num_layers; ++k) {
        const auto rows = static_cast<Eigen::Index>(sizes[k + 1]);
        const auto cols = static_cast<Eigen::Index>(sizes[k]);
        Layer layer;
        layer.weights.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto row = in.next("weight row", sizes[k]);
            for (Eigen::Index j = 0; j < cols; ++j)
                layer.weights(i, j) = row[static_cast<std::size_t>(j)];
        }
        layer.bias.resize(rows);
        for (Eigen::Index i = 0; i < rows; ++i)
            layer.bias[i] = in.next("bias", 1)[0];
        layer.activations.assign(sizes[k + 1], k + 1 == num_layers ? Activation::Identity : Activation::ReLU);
        net.layers.push_back(std::move(layer));
    }
    if (!in.done())
        throw ParseError("line " + std::to_string(in.current_line()), "unexpected trailing data");
    return {std::move(net), std::move(meta)};
}

/// Serializes to NNet with 17 significant digits, no trailing commas.
inline std::string write_nnet(const Network& net, const NNetMeta& meta)
{
    require_valid(net);
    meta.check(net.input_dim);
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Activation expected = k + 1 == net.layers.size() ? Activation::Identity : Activation::ReLU;
        for (auto a : net.layers[k].activations)
            if (a != expected)
                throw ArgumentError("NNet needs ReLU hidden layers and an Identity output layer; layer " +
                                    std::to_string(k) + " differs");
    }

    std::vector<std::size_t> sizes{net.input_dim};
    for (const auto& layer : net.layers)
        sizes.push_back(layer.outputs());

    std::string out = "// written by nnbisim\n";
    out += std::to_string(net.layers.size()) + "," + std::to_string(net.input_dim) + "," +
           std::to_string(net.output_dim()) + "," + std::to_string(*std::max_element(sizes.begin(), sizes.end())) + "\n";
    for (std::size_t i = 0; i < sizes.size(); ++i)
        out += (i ? "," : "") + std::to_string(sizes[i]);
    out += "\n0\n";
    detail::append_row(out, meta.input_mins.data(), static_cast<std::size_t>(meta.input_mins.size()));
    detail::append_row(out, meta.input_maxes.data(), static_cast<std::size_t>(meta.input_maxes.size()));
    detail::append_row(out, meta.means.data(), static_cast<std::size_t>(meta.means.size()));
    detail::append_row(out, meta.ranges.data(), static_cast<std::size_t>(meta.ranges.size()));
    for (const auto& layer : net.layers) {
        // Eigen matrices are column-major: walk each row with stride = rows.
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
            detail::append_row(out, layer.weights.data() + i, layer.inputs(), layer.weights.rows());
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
            detail::append_row(out, layer.bias.data() + i, 1);
    }
    return out;
}

/// Evaluation in the file's physical units: clamp to [mins, maxes],
/// normalize with means/ranges, evaluate, then de-normalize the outputs.
inline Vector eval_normalized(const Network& net, const NNetMeta& meta, const Vector& x)
{
    meta.check(net.input_dim);
    if (static_cast<std::size_t>(x.size()) != net.input_dim)
        throw ShapeError("input has length " + std::to_string(x.size()) + ", network expects " +
                         std::to_string(net.input_dim));
    const auto n = x.size();
    Vector z = x.cwiseMax(meta.input_mins).cwiseMin(meta.input_maxes);
    z = (z - meta.means.head(n)).cwiseQuotient(meta.ranges.head(n));
    Vector y = eval(net, z);
    return (y.array() * meta.ranges[n] + meta.means[n]).matrix();
}

} // namespace nnbisim
