// nnbisim command-line tool: inspect, merge, bound and verify ReLU networks.
//
// Exit codes: 0 success / Safe, 1 usage or runtime error, 2 unreadable or
// malformed input file, 3 networks cannot be merged, 4 Unsafe, 5 Uncertain.

#include "nnbisim.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace nnbisim;

namespace {

constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitMerge = 3;
constexpr int kExitUnsafe = 4;
constexpr int kExitUncertain = 5;

std::string format_vector(const Vector& v)
{
    std::string out = "[";
    char buf[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        out += (i ? ", " : "") + std::string(buf);
    }
    return out + "]";
}

std::string format_sizes(const Network& net)
{
    std::string out = "[" + std::to_string(net.input_dim);
    for (const auto& layer : net.layers)
        out += "," + std::to_string(layer.outputs());
    return out + "]";
}

struct BackendFlags {
    std::string method;
    std::size_t splits = 0;
    std::string norm;
    std::uint64_t seed = 42;
    std::size_t samples = 10'000;
    std::size_t star_cap = 100'000;
    std::size_t max_cells = 1'000'000;
    unsigned jobs = default_jobs();

    void add_to(CLI::App& cmd, bool with_norm)
    {
        cmd.add_option("--method", method, "Reachability back-end")->check(CLI::IsMember({"interval", "split", "exact"}));
        cmd.add_option("--splits", splits, "Cells per input dimension for --method split (default 2)")
            ->check(CLI::PositiveNumber);
        if (with_norm)
            cmd.add_option("--norm", norm, "Output norm")->check(CLI::IsMember({"inf", "l2"}));
        cmd.add_option("--seed", seed, "Seed for sampling")->capture_default_str();
        cmd.add_option("--samples", samples, "Random counterexample candidates")->capture_default_str();
        cmd.add_option("--star-cap", star_cap, "Maximum number of stars for --method exact")->capture_default_str();
        cmd.add_option("--max-cells", max_cells, "Maximum split-grid cells")->capture_default_str();
        cmd.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    }

    Method resolve_method(const ProblemOptions& opts) const
    {
        const std::size_t k = splits ? splits : opts.splits.value_or(2);
        const std::string name = !method.empty() ? method : opts.method.value_or("split");
        return parse_method(name, k);
    }

    NormKind resolve_norm(const ProblemOptions& opts) const
    {
        return !norm.empty() ? parse_norm(norm) : opts.norm.value_or(NormKind::Linf);
    }

    VerifyOptions verify_options() const
    {
        VerifyOptions v;
        v.limits = {max_cells, star_cap, jobs};
        v.samples = samples;
        v.seed = seed;
        return v;
    }
};

int cmd_info(const std::string& path)
{
    const LoadedNetwork loaded = load_network(path);
    const Network& net = loaded.net;
    std::cout << "format: " << (loaded.format == NetFormat::NNet ? "nnet" : "json") << "\n";
    std::cout << "layers: " << net.depth() << ", widths: " << format_sizes(net) << "\n";
    std::cout << "inputs: " << net.input_dim << ", outputs: " << net.output_dim() << "\n";
    std::cout << "parameters: " << net.parameter_count() << "\n";
    std::cout << "activations:";
    std::vector<std::size_t> mixed;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        std::size_t relu = 0;
        for (auto a : net.layers[k].activations)
            relu += a == Activation::ReLU;
        const std::size_t width = net.layers[k].outputs();
        if (relu == width)
            std::cout << " relu";
        else if (relu == 0)
            std::cout << " identity";
        else {
            std::cout << " mixed(" << relu << " relu/" << width - relu << " identity)";
            mixed.push_back(k + 1);
        }
    }
    std::cout << "\n";
    if (!mixed.empty()) {
        std::cout << "note: mixed activations in layer";
        std::cout << (mixed.size() > 1 ? "s" : "");
        for (std::size_t i = 0; i < mixed.size(); ++i)
            std::cout << (i ? ", " : " ") << mixed[i];
        std::cout << " (merged network; JSON format only)\n";
    }
    return 0;
}

int cmd_merge(const std::string& large_path, const std::string& small_path, const std::string& out_path)
{
    const Network large = load_network(large_path).net;
    const Network small = load_network(small_path).net;
    const Network merged = merge(large, small);
    write_file(out_path, write_json_net(merged));
    std::cout << "merged network: layers " << merged.depth() << ", widths " << format_sizes(merged) << "\n";
    std::cout << "written to " << out_path << "\n";
    return 0;
}

int cmd_bisim(const std::string& large_path, const std::string& small_path, const std::string& problem_path,
              const BackendFlags& flags, std::size_t mc_samples)
{
    const Network large = load_network(large_path).net;
    const Network small = load_network(small_path).net;
    const Problem problem = load_problem(problem_path);
    const Method method = flags.resolve_method(problem.options);
    const NormKind norm = flags.resolve_norm(problem.options);
    const ReachLimits limits{flags.max_cells, flags.star_cap, flags.jobs};

    const ErrorBound bound = bisim_error_upper(large, small, problem.input, method, norm, limits);
    std::printf("epsilon_upper=%.6f\n", bound.epsilon_upper);
    if (mc_samples > 0) {
        const double lower =
            bisim_error_lower_mc(large, small, problem.input, mc_samples, flags.seed, norm, flags.jobs);
        std::printf("epsilon_lower=%.6f\n", lower);
    }
    std::printf("method=%s norm=%s\n", method.name().c_str(), to_string(norm));
    std::fprintf(stderr, "time_s=%.5f\n", bound.wall_time_seconds);
    return 0;
}

int cmd_verify(const std::string& net_path, const std::string& problem_path, const BackendFlags& flags)
{
    const Network net = load_network(net_path).net;
    const Problem problem = load_problem(problem_path);
    const Method method = flags.resolve_method(problem.options);
    const Verdict v = verify(net, problem.input, problem.spec, method, flags.verify_options());
    std::cout << "verdict: " << to_string(v.kind) << "\n";
    std::cout << "method: " << method.name() << "\n";
    if (v.witness) {
        std::cout << "witness: " << format_vector(*v.witness) << "\n";
        std::cout << "output: " << format_vector(eval(net, *v.witness)) << "\n";
    }
    switch (v.kind) {
    case VerdictKind::Safe: return 0;
    case VerdictKind::Unsafe: return kExitUnsafe;
    case VerdictKind::Uncertain: return kExitUncertain;
    }
    return kExitError;
}

int cmd_report(const std::string& manifest_path, const std::string& problem_path, const BackendFlags& flags,
               const std::string& csv_path, bool also_large, const std::string& large_method)
{
    const auto entries = parse_manifest(read_file(manifest_path));
    const Problem problem = load_problem(problem_path);
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return (path.is_absolute() ? path : base / path).string();
    };

    CompressedVerifyOptions opts;
    opts.method = flags.resolve_method(problem.options);
    opts.large_method = parse_method(large_method, opts.method.splits);
    opts.norm = flags.resolve_norm(problem.options);
    opts.verify = flags.verify_options();
    opts.also_large = also_large;

    std::vector<BisimReport> rows;
    for (const auto& e : entries) {
        const Network large = load_network(resolve(e.large_path)).net;
        const Network small = load_network(resolve(e.small_path)).net;
        rows.push_back(verify_via_compressed(large, small, problem.input, problem.spec, opts, e.id));
    }
    const std::string csv = reports_to_csv(rows);
    if (csv_path.empty()) {
        std::cout << csv;
    } else {
        write_file(csv_path, csv);
        std::cout << reports_to_table(rows);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Certified output-discrepancy bounds between ReLU networks and compressed verification"};
    app.require_subcommand(1);

    std::string path_a, path_b, path_c, csv_path, large_method = "exact";
    std::size_t mc_samples = 0;
    bool also_large = false;
    BackendFlags flags;

    auto* info = app.add_subcommand("info", "Summarize a network file (NNet or JSON)");
    info->add_option("net", path_a, "Network file")->required();

    auto* merge_cmd = app.add_subcommand("merge", "Write the merged difference network as JSON");
    merge_cmd->add_option("large", path_a, "Deeper network")->required();
    merge_cmd->add_option("small", path_b, "Compressed network")->required();
    merge_cmd->add_option("out", path_c, "Output JSON path")->required();

    auto* bisim = app.add_subcommand("bisim", "Bound the output discrepancy between two networks");
    bisim->add_option("large", path_a, "Deeper network")->required();
    bisim->add_option("small", path_b, "Compressed network")->required();
    bisim->add_option("problem", path_c, "Problem file with the input box")->required();
    bisim->add_option("--mc", mc_samples, "Also report a sampled lower bound with this many samples");
    flags.add_to(*bisim, true);

    auto* verify_cmd = app.add_subcommand("verify", "Check a network against the unsafe region of a problem");
    verify_cmd->add_option("net", path_a, "Network file")->required();
    verify_cmd->add_option("problem", path_b, "Problem file")->required();
    flags.add_to(*verify_cmd, false);

    auto* report = app.add_subcommand("report", "Verify network pairs through their compressed versions");
    report->add_option("manifest", path_a, "Lines of `id large_path small_path`")->required();
    report->add_option("problem", path_b, "Problem file")->required();
    report->add_option("--csv", csv_path, "Write CSV here and print a table instead");
    report->add_flag("--also-large", also_large, "Also verify the large network directly");
    report->add_option("--large-method", large_method, "Back-end for --also-large")
        ->check(CLI::IsMember({"interval", "split", "exact"}))
        ->capture_default_str();
    flags.add_to(*report, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (info->parsed())
            return cmd_info(path_a);
        if (merge_cmd->parsed())
            return cmd_merge(path_a, path_b, path_c);
        if (bisim->parsed())
            return cmd_bisim(path_a, path_b, path_c, flags, mc_samples);
        if (verify_cmd->parsed())
            return cmd_verify(path_a, path_b, flags);
        if (report->parsed())
            return cmd_report(path_a, path_b, flags, csv_path, also_large, large_method);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const FileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const MergePreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMerge;
    } catch (const UnsupportedShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMerge;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
