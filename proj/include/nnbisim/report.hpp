#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace nnbisim {

inline constexpr std::string_view kReportCsvHeader =
    "id,epsilon,time_large_s,time_small_s,verdict_large,verdict_small";

namespace detail {

inline std::string format_double(const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

/// CSV with a header row; absent optional columns are left empty. Times use
/// 5 decimals, epsilon 10 significant digits.
inline std::string reports_to_csv(const std::vector<BisimReport>& rows)
{
    std::string out(kReportCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += detail::csv_field(r.network_id) + ',';
        out += detail::format_double("%.10g", r.epsilon) + ',';
        if (r.time_large_seconds)
            out += detail::format_double("%.5f", *r.time_large_seconds);
        out += ',' + detail::format_double("%.5f", r.time_small_seconds) + ',';
        if (r.verdict_large)
            out += to_string(r.verdict_large->kind);
        out += ',';
        out += to_string(r.verdict_small.kind);
        out += '\n';
    }
    return out;
}

/// Fixed-width table with the same columns as the CSV.
inline std::string reports_to_table(const std::vector<BisimReport>& rows)
{
    std::size_t id_width = 2;
    for (const auto& r : rows)
        id_width = std::max(id_width, r.network_id.size());
    char line[256];
    std::string out;
    auto rule = std::string(id_width + 70, '-') + '\n';
    std::snprintf(line, sizeof line, "%-*s  %10s  %14s  %14s  %-10s  %-10s\n", static_cast<int>(id_width), "ID",
                  "epsilon", "T_L (s)", "T_S (s)", "V_L", "V_S");
    out += rule + line + rule;
    for (const auto& r : rows) {
        const std::string tl = r.time_large_seconds ? detail::format_double("%.5f", *r.time_large_seconds) : "-";
        std::snprintf(line, sizeof line, "%-*s  %10.4f  %14s  %14.5f  %-10s  %-10s\n", static_cast<int>(id_width),
                      r.network_id.c_str(), r.epsilon, tl.c_str(), r.time_small_seconds,
                      r.verdict_large ? to_string(r.verdict_large->kind) : "-", to_string(r.verdict_small.kind));
        out += line;
    }
    return out + rule;
}

/// One (id, large network, small network) entry of a report manifest.
struct ManifestEntry {
    std::string id;
    std::string large_path;
    std::string small_path;
};

/// Manifest lines are `id large_path small_path`, whitespace separated.
/// Blank lines and lines starting with '#' are skipped.
inline std::vector<ManifestEntry> parse_manifest(std::string_view text)
{
    std::vector<ManifestEntry> out;
    std::size_t pos = 0;
    std::size_t number = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++number;
        std::vector<std::string> fields;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                ++i;
            const std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
                ++i;
            if (i > start)
                fields.emplace_back(line.substr(start, i - start));
        }
        if (!fields.empty() && fields.front().front() != '#') {
            if (fields.size() != 3)
                throw ParseError("line " + std::to_string(number),
                                 "expected `id large_path small_path`, found " + std::to_string(fields.size()) +
                                     " fields");
            out.push_back({fields[0], fields[1], fields[2]});
        }
        if (end == text.size())
            break;
    }
    return out;
}

} // namespace nnbisim
