#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/json_io.hpp"
#include "nnbisim/nnet.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace nnbisim {

class FileError : public Error {
public:
    using Error::Error;
};

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << contents))
        throw FileError("cannot write '" + path + "'");
}

enum class NetFormat { NNet, Json };

struct LoadedNetwork {
    Network net;
    NetFormat format = NetFormat::NNet;
    std::optional<NNetMeta> meta;
};

/// JSON when the first non-blank character is '{', NNet otherwise.
inline LoadedNetwork parse_network(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return {parse_json_net(text), NetFormat::Json, std::nullopt};
    auto [net, meta] = parse_nnet(text);
    return {std::move(net), NetFormat::NNet, std::move(meta)};
}

inline LoadedNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

inline Problem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

} // namespace nnbisim
