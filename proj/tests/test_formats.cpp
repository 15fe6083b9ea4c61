#include "nnbisim/io.hpp"
#include "nnbisim/merge.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstdint>

using namespace nnbisim;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

const char* const kMinimalNNet = "// one neuron\n"
                                 "1,1,1,1,\n"
                                 "1,1,\n"
                                 "0,\n"
                                 "-10,\n"
                                 "10,\n"
                                 "0,0,\n"
                                 "1,1,\n"
                                 "2.0,\n"
                                 "0.5,\n";

std::string location_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ParseError& e) {
        return e.location();
    }
    return "<no error>";
}

void expect_bitwise_equal(const Network& a, const Network& b)
{
    ASSERT_EQ(a.input_dim, b.input_dim);
    ASSERT_EQ(a.depth(), b.depth());
    for (std::size_t i = 0; i < a.depth(); ++i) {
        EXPECT_EQ(a.layers[i].weights, b.layers[i].weights);
        EXPECT_EQ(a.layers[i].bias, b.layers[i].bias);
        EXPECT_EQ(a.layers[i].activations, b.layers[i].activations);
    }
}

void expect_same_outputs(const Network& a, const Network& b, std::uint64_t seed)
{
    const Box in(Vector::Constant(static_cast<Eigen::Index>(a.input_dim), -2),
                 Vector::Constant(static_cast<Eigen::Index>(a.input_dim), 2));
    CounterRng rng(seed);
    for (int t = 0; t < 100; ++t) {
        const Vector x = oracle::random_point(in, rng);
        const Vector ya = eval(a, x), yb = eval(b, x);
        for (Eigen::Index i = 0; i < ya.size(); ++i)
            ASSERT_EQ(std::bit_cast<std::uint64_t>(ya[i]), std::bit_cast<std::uint64_t>(yb[i]));
    }
}

} // namespace

TEST(NNet, MinimalFile)
{
    const auto [net, meta] = parse_nnet(kMinimalNNet);
    EXPECT_EQ(net.depth(), 1u);
    EXPECT_EQ(net.layers[0].activations[0], Activation::Identity);
    EXPECT_DOUBLE_EQ(eval(net, vec({1}))[0], 2.5);
    EXPECT_EQ(meta.input_mins, vec({-10}));
    EXPECT_EQ(meta.ranges, vec({1, 1}));
}

TEST(NNet, CrlfAndNoTrailingCommas)
{
    const auto [net, meta] =
        parse_nnet("1,1,1,1\r\n1,1\r\n0\r\n-10\r\n10\r\n0,0\r\n1,1\r\n2.0\r\n0.5\r\n");
    EXPECT_DOUBLE_EQ(eval(net, vec({1}))[0], 2.5);
}

TEST(NNet, HiddenLayersAreRelu)
{
    const std::string text = "2,1,1,2,\n1,2,1,\n0,\n0,\n1,\n0,0,\n1,1,\n"
                             "1,\n-1,\n0,\n0,\n"
                             "1,1,\n0,\n";
    const auto [net, meta] = parse_nnet(text);
    ASSERT_EQ(net.depth(), 2u);
    EXPECT_EQ(net.layers[0].activations, (std::vector{Activation::ReLU, Activation::ReLU}));
    EXPECT_EQ(net.layers[1].activations, std::vector{Activation::Identity});
    EXPECT_DOUBLE_EQ(eval(net, vec({-3}))[0], 3.0); // |x|
}

TEST(NNet, ErrorsNameTheLine)
{
    // Sizes line has 3 entries for 1 layer.
    EXPECT_EQ(location_of([] { parse_nnet("1,1,1,1,\n1,1,1,\n0,\n"); }), "line 2 (layer sizes)");
    EXPECT_EQ(location_of([] { parse_nnet("// c\n// c\n1,1,1,1,\n1,x,\n"); }), "line 4 (layer sizes)");
    EXPECT_EQ(location_of([] { parse_nnet("1,1,1,1,\n1,1,\n0,\n-1,\n1,\n0,0,\n1,1,\n2.0,\n"); }),
              "line 9");
    EXPECT_EQ(location_of([] { parse_nnet("1,1,1,3,\n1,1,\n"); }), "line 2 (layer sizes)");
    EXPECT_EQ(location_of([] { parse_nnet("1,1,1,1,\n1,1,\n0,\n-1,\n1,\n0,0,\n1,0,\n2.0,\n0.5,\n"); }), "line 4");
    EXPECT_EQ(location_of([] { parse_nnet(std::string(kMinimalNNet) + "7,\n"); }), "line 11");
    EXPECT_EQ(location_of([] { parse_nnet("0,1,1,1,\n"); }), "line 1");
    EXPECT_EQ(location_of([] { parse_nnet(""); }), "line 1");
}

TEST(NNet, RoundTripIsExact)
{
    const auto net = random_network({3, 7, 5, 2}, 1.0, 11);
    NNetMeta meta = NNetMeta::identity(3);
    meta.input_mins = vec({-1, -0.1, 1e-300});
    meta.means[3] = 0.1;
    const std::string text = write_nnet(net, meta);
    EXPECT_EQ(text.rfind("// ", 0), 0u);
    const auto [back, meta2] = parse_nnet(text);
    expect_bitwise_equal(net, back);
    EXPECT_EQ(meta.input_mins, meta2.input_mins);
    EXPECT_EQ(meta.means, meta2.means);
    EXPECT_EQ(write_nnet(back, meta2), text);
}

TEST(NNet, WriterRejectsNonStandardActivations)
{
    const auto a = random_network({2, 3, 1}, 1.0, 1);
    const auto b = random_network({2, 2, 1}, 1.0, 2);
    EXPECT_THROW(write_nnet(merge(a, b), NNetMeta::identity(2)), ArgumentError);
}

TEST(NNet, EvalNormalized)
{
    const auto [net, meta0] = parse_nnet(kMinimalNNet);
    NNetMeta meta = meta0;
    meta.input_mins = vec({0});
    meta.input_maxes = vec({4});
    meta.means = vec({1, 10});
    meta.ranges = vec({2, 3});
    // x=5 clamps to 4, normalizes to 1.5, y=3.5, output 3.5*3+10.
    EXPECT_DOUBLE_EQ(eval_normalized(net, meta, vec({5}))[0], 20.5);
    EXPECT_DOUBLE_EQ(eval_normalized(net, meta, vec({1}))[0], 0.5 * 3 + 10);
}

TEST(JsonNet, RoundTripIncludingMergedNetwork)
{
    const auto large = random_network({3, 8, 8, 6, 2}, 1.0, 21);
    const auto small = random_network({3, 4, 2}, 1.0, 22);
    const auto merged = merge(large, small);
    for (const Network* n : {&large, &small, &merged}) {
        const Network back = parse_json_net(write_json_net(*n));
        expect_bitwise_equal(*n, back);
        expect_same_outputs(*n, back, 5);
    }
}

TEST(JsonNet, MatchesNNetSource)
{
    const auto net = random_network({2, 6, 3}, 1.0, 4);
    const auto [from_nnet, meta] = parse_nnet(write_nnet(net, NNetMeta::identity(2)));
    expect_same_outputs(from_nnet, parse_json_net(write_json_net(from_nnet)), 9);
}

TEST(JsonNet, ErrorsCarryFieldPath)
{
    Json doc = network_to_json(random_network({2, 3, 1}, 1.0, 1));
    auto path_for = [](Json d) { return location_of([&] { network_from_json(d); }); };

    Json a = doc;
    a["layers"][1]["activations"] = Json::array({"relu", "identity"});
    EXPECT_EQ(path_for(a), "layers[1].activations");
    Json b = doc;
    b["layers"][0]["weights"][2] = Json::array({1.0});
    EXPECT_EQ(path_for(b), "layers[0].weights[2]");
    Json c = doc;
    c["layers"][0]["activations"][1] = "tanh";
    EXPECT_EQ(path_for(c), "layers[0].activations[1]");
    Json d = doc;
    d["extra"] = 1;
    EXPECT_EQ(path_for(d), "extra");
    Json e = doc;
    e["format"] = "onnx";
    EXPECT_EQ(path_for(e), "format");
    Json f = doc;
    f["layers"][0]["bias"][0] = "x";
    EXPECT_EQ(path_for(f), "layers[0].bias[0]");
    EXPECT_THROW(parse_json_net("{ not json"), ParseError);
}

TEST(Problem, ParseExample)
{
    const Problem p = parse_problem(R"({
        "input": {"lower": [-1, 0], "upper": [1, 2]},
        "unsafe": [[{"a": [1, 0], "b": 0}], [{"a": [-1, 1], "b": -3}, {"a": [0, 1], "b": 5}]],
        "norm": "l2", "method": "split", "splits": 5
    })");
    EXPECT_EQ(p.input.lower(), vec({-1, 0}));
    ASSERT_EQ(p.spec.unsafe.size(), 2u);
    EXPECT_EQ(p.spec.unsafe[1].A, (Matrix(2, 2) << -1, 1, 0, 1).finished());
    EXPECT_EQ(p.spec.unsafe[1].d, vec({-3, 5}));
    EXPECT_EQ(*p.options.norm, NormKind::L2);
    EXPECT_EQ(*p.options.method, "split");
    EXPECT_EQ(*p.options.splits, 5u);

    const Problem back = parse_problem(write_problem(p));
    EXPECT_EQ(back.spec.unsafe[0].A, p.spec.unsafe[0].A);
    EXPECT_EQ(back.input.upper(), p.input.upper());
    EXPECT_EQ(*back.options.splits, 5u);
}

TEST(Problem, Errors)
{
    auto loc = [](const char* text) { return location_of([&] { parse_problem(text); }); };
    EXPECT_EQ(loc(R"({"input": {"lower": [0, 0], "upper": [1, -1]}, "unsafe": []})"), "input.upper[1]");
    EXPECT_EQ(loc(R"({"input": {"lower": [0], "upper": [1]}, "unsafe": [], "color": 1})"), "color");
    EXPECT_EQ(loc(R"({"input": {"lower": [0], "upper": [1]}, "unsafe": [[{"a": [1], "b": 0}, {"a": [1, 2], "b": 0}]]})"),
              "unsafe[0][1].a");
    EXPECT_EQ(loc(R"({"input": {"lower": [0], "upper": [1]}, "unsafe": [], "norm": "l1"})"), "norm");
    EXPECT_EQ(loc(R"({"input": {"lower": [0], "upper": [1]}, "unsafe": [], "splits": 0})"), "splits");
    EXPECT_EQ(loc(R"({"unsafe": []})"), "input");
}

TEST(Io, FormatDetectionAndMissingFile)
{
    EXPECT_EQ(parse_network(kMinimalNNet).format, NetFormat::NNet);
    EXPECT_TRUE(parse_network(kMinimalNNet).meta.has_value());
    const auto json = parse_network("  \n" + write_json_net(constant_network(2, vec({1}))));
    EXPECT_EQ(json.format, NetFormat::Json);
    EXPECT_FALSE(json.meta.has_value());
    EXPECT_THROW(load_network("/nonexistent/net.nnet"), FileError);
}
