#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/network.hpp"
#include "nnbisim/norm.hpp"
#include "nnbisim/verify.hpp"

#include "json.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nnbisim {

using Json = nlohmann::json;

namespace detail {

inline Json parse_json_text(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
}

inline void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<std::string_view> known)
{
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (auto k : known)
            ok = ok || item.key() == k;
        if (!ok)
            throw ParseError(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
    }
}

inline const Json& field(const Json& obj, const std::string& path, const char* key)
{
    const std::string where = path.empty() ? key : path + "." + key;
    if (!obj.is_object())
        throw ParseError(path.empty() ? "<root>" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where, "missing field");
    return *it;
}

inline double number(const Json& v, const std::string& path)
{
    if (!v.is_number())
        throw ParseError(path, "expected a number");
    return v.get<double>();
}

inline Vector number_array(const Json& v, const std::string& path)
{
    if (!v.is_array())
        throw ParseError(path, "expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = number(v[i], path + "[" + std::to_string(i) + "]");
    return out;
}

inline Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

} // namespace detail

// ---- networks ---------------------------------------------------------------
//
// {
//   "format": "nnbisim-network", "version": 1, "input_dim": 2,
//   "layers": [ {"weights": [[...], ...], "bias": [...], "activations": ["relu", "identity", ...]} ]
// }

inline Json network_to_json(const Network& net)
{
    require_valid(net);
    Json layers = Json::array();
    for (const auto& layer : net.layers) {
        Json rows = Json::array();
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
            rows.push_back(detail::to_json(layer.weights.row(i).transpose()));
        Json acts = Json::array();
        for (auto a : layer.activations)
            acts.push_back(to_string(a));
        layers.push_back({{"weights", std::move(rows)}, {"bias", detail::to_json(layer.bias)}, {"activations", std::move(acts)}});
    }
    return {{"format", "nnbisim-network"}, {"version", 1}, {"input_dim", net.input_dim}, {"layers", std::move(layers)}};
}

/// Shortest round-trip decimal representation, so the value survives exactly.
inline std::string write_json_net(const Network& net) { return network_to_json(net).dump(1) + "\n"; }

inline Network network_from_json(const Json& doc)
{
    if (!doc.is_object())
        throw ParseError("<root>", "expected an object");
    detail::reject_unknown(doc, "", {"format", "version", "input_dim", "layers"});
    if (auto it = doc.find("format"); it != doc.end() && *it != "nnbisim-network")
        throw ParseError("format", "expected \"nnbisim-network\"");

    const Json& dim = detail::field(doc, "", "input_dim");
    if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0)
        throw ParseError("input_dim", "expected a positive integer");

    Network net;
    net.input_dim = dim.get<std::size_t>();
    const Json& layers = detail::field(doc, "", "layers");
    if (!layers.is_array() || layers.empty())
        throw ParseError("layers", "expected a non-empty array");

    std::size_t prev = net.input_dim;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const std::string path = "layers[" + std::to_string(k) + "]";
        const Json& obj = layers[k];
        if (!obj.is_object())
            throw ParseError(path, "expected an object");
        detail::reject_unknown(obj, path, {"weights", "bias", "activations"});

        const Json& rows = detail::field(obj, path, "weights");
        if (!rows.is_array() || rows.empty())
            throw ParseError(path + ".weights", "expected a non-empty array of rows");
        Layer layer;
        layer.weights.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(prev));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string row_path = path + ".weights[" + std::to_string(i) + "]";
            const Vector row = detail::number_array(rows[i], row_path);
            if (static_cast<std::size_t>(row.size()) != prev)
                throw ParseError(row_path, "expected " + std::to_string(prev) + " entries, found " +
                                               std::to_string(row.size()));
            layer.weights.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }

        layer.bias = detail::number_array(detail::field(obj, path, "bias"), path + ".bias");
        if (static_cast<std::size_t>(layer.bias.size()) != rows.size())
            throw ParseError(path + ".bias", "expected " + std::to_string(rows.size()) + " entries, found " +
                                                 std::to_string(layer.bias.size()));

        const Json& acts = detail::field(obj, path, "activations");
        if (!acts.is_array())
            throw ParseError(path + ".activations", "expected an array of activation names");
        if (acts.size() != rows.size())
            throw ParseError(path + ".activations", "expected " + std::to_string(rows.size()) + " entries, found " +
                                                        std::to_string(acts.size()));
        for (std::size_t i = 0; i < acts.size(); ++i) {
            const std::string apath = path + ".activations[" + std::to_string(i) + "]";
            if (acts[i] == "relu")
                layer.activations.push_back(Activation::ReLU);
            else if (acts[i] == "identity")
                layer.activations.push_back(Activation::Identity);
            else
                throw ParseError(apath, "expected \"relu\" or \"identity\"");
        }
        prev = rows.size();
        net.layers.push_back(std::move(layer));
    }
    return net;
}

inline Network parse_json_net(std::string_view text) { return network_from_json(detail::parse_json_text(text)); }

// ---- verification problems --------------------------------------------------
//
// {
//   "input": {"lower": [...], "upper": [...]},
//   "unsafe": [ [ {"a": [...], "b": 0.0}, ... ], ... ],    // union of conjunctions
//   "norm": "inf" | "l2", "method": "interval" | "split" | "exact", "splits": 4
// }

struct ProblemOptions {
    std::optional<NormKind> norm;
    std::optional<std::string> method;
    std::optional<std::size_t> splits;
};

struct Problem {
    Box input;
    LinearSpec spec;
    ProblemOptions options;
};

inline Problem problem_from_json(const Json& doc)
{
    if (!doc.is_object())
        throw ParseError("<root>", "expected an object");
    detail::reject_unknown(doc, "", {"input", "unsafe", "norm", "method", "splits"});

    Problem p;
    const Json& input = detail::field(doc, "", "input");
    if (!input.is_object())
        throw ParseError("input", "expected an object");
    detail::reject_unknown(input, "input", {"lower", "upper"});
    const Vector lo = detail::number_array(detail::field(input, "input", "lower"), "input.lower");
    const Vector hi = detail::number_array(detail::field(input, "input", "upper"), "input.upper");
    if (lo.size() == 0)
        throw ParseError("input.lower", "input box must have at least one dimension");
    if (lo.size() != hi.size())
        throw ParseError("input.upper", "length differs from input.lower");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i]))
            throw ParseError("input.upper[" + std::to_string(i) + "]", "upper bound is below the lower bound");
    p.input = Box(lo, hi);

    const Json& unsafe = detail::field(doc, "", "unsafe");
    if (!unsafe.is_array())
        throw ParseError("unsafe", "expected an array of polytopes");
    Eigen::Index out_dim = -1;
    for (std::size_t j = 0; j < unsafe.size(); ++j) {
        const std::string ppath = "unsafe[" + std::to_string(j) + "]";
        const Json& poly = unsafe[j];
        if (!poly.is_array() || poly.empty())
            throw ParseError(ppath, "expected a non-empty array of constraints");
        std::vector<Vector> rows;
        Vector d(static_cast<Eigen::Index>(poly.size()));
        for (std::size_t r = 0; r < poly.size(); ++r) {
            const std::string cpath = ppath + "[" + std::to_string(r) + "]";
            if (!poly[r].is_object())
                throw ParseError(cpath, "expected an object {a, b}");
            detail::reject_unknown(poly[r], cpath, {"a", "b"});
            Vector a = detail::number_array(detail::field(poly[r], cpath, "a"), cpath + ".a");
            if (a.size() == 0)
                throw ParseError(cpath + ".a", "constraint normal is empty");
            if (out_dim >= 0 && a.size() != out_dim)
                throw ParseError(cpath + ".a", "length " + std::to_string(a.size()) +
                                                   " differs from earlier constraints (" + std::to_string(out_dim) + ")");
            out_dim = a.size();
            d[static_cast<Eigen::Index>(r)] = detail::number(detail::field(poly[r], cpath, "b"), cpath + ".b");
            rows.push_back(std::move(a));
        }
        Polytope polytope;
        polytope.A.resize(static_cast<Eigen::Index>(rows.size()), out_dim);
        for (std::size_t r = 0; r < rows.size(); ++r)
            polytope.A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
        polytope.d = std::move(d);
        p.spec.unsafe.push_back(std::move(polytope));
    }

    if (auto it = doc.find("norm"); it != doc.end()) {
        if (!it->is_string())
            throw ParseError("norm", "expected a string");
        try {
            p.options.norm = parse_norm(it->get<std::string>());
        } catch (const ArgumentError& e) {
            throw ParseError("norm", e.what());
        }
    }
    if (auto it = doc.find("method"); it != doc.end()) {
        if (!it->is_string() || (*it != "interval" && *it != "split" && *it != "exact"))
            throw ParseError("method", "expected \"interval\", \"split\" or \"exact\"");
        p.options.method = it->get<std::string>();
    }
    if (auto it = doc.find("splits"); it != doc.end()) {
        if (!it->is_number_unsigned() || it->get<std::size_t>() == 0)
            throw ParseError("splits", "expected a positive integer");
        p.options.splits = it->get<std::size_t>();
    }
    return p;
}

inline Problem parse_problem(std::string_view text) { return problem_from_json(detail::parse_json_text(text)); }

inline std::string write_problem(const Problem& p)
{
    Json unsafe = Json::array();
    for (const auto& poly : p.spec.unsafe) {
        Json cons = Json::array();
        for (Eigen::Index r = 0; r < poly.A.rows(); ++r)
            cons.push_back({{"a", detail::to_json(poly.A.row(r).transpose())}, {"b", poly.d[r]}});
        unsafe.push_back(std::move(cons));
    }
    Json doc = {{"input", {{"lower", detail::to_json(p.input.lower())}, {"upper", detail::to_json(p.input.upper())}}},
                {"unsafe", std::move(unsafe)}};
    if (p.options.norm)
        doc["norm"] = to_string(*p.options.norm);
    if (p.options.method)
        doc["method"] = *p.options.method;
    if (p.options.splits)
        doc["splits"] = *p.options.splits;
    return doc.dump(1) + "\n";
}

} // namespace nnbisim
