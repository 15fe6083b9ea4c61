#include "nnbisim/interval.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

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

Network two_layer_example()
{
    Network net;
    net.input_dim = 1;
    Layer a;
    a.weights = (Matrix(2, 1) << 1, -1).finished();
    a.bias = Vector::Zero(2);
    a.activations.assign(2, Activation::ReLU);
    Layer b;
    b.weights = (Matrix(1, 2) << 1, 1).finished();
    b.bias = Vector::Zero(1);
    b.activations.assign(1, Activation::Identity);
    net.layers = {a, b};
    return net;
}

} // namespace

TEST(AffineBounds, HandExample)
{
    const Box out = affine_bounds((Matrix(2, 1) << 1, -1).finished(), Vector::Zero(2), Box(vec({-1}), vec({1})));
    EXPECT_EQ(out.lower(), vec({-1, -1}));
    EXPECT_EQ(out.upper(), vec({1, 1}));
}

TEST(AffineBounds, ZeroMatrixAndIdentity)
{
    const Box in(vec({-2, 1}), vec({3, 4}));
    const Box c = affine_bounds(Matrix::Zero(1, 2), vec({5}), in);
    EXPECT_EQ(c.lower(), vec({5}));
    EXPECT_EQ(c.upper(), vec({5}));
    const Box same = affine_bounds(Matrix::Identity(2, 2), Vector::Zero(2), in);
    EXPECT_EQ(same.lower(), in.lower());
    EXPECT_EQ(same.upper(), in.upper());
    EXPECT_THROW(affine_bounds(Matrix::Zero(1, 3), vec({0}), in), ShapeError);
}

TEST(ActBounds, ReluAndIdentity)
{
    const Box in(vec({-1, 2, -1}), vec({1, 3, 1}));
    const Box out = act_bounds({Activation::ReLU, Activation::ReLU, Activation::Identity}, in);
    EXPECT_EQ(out.lower(), vec({0, 2, -1}));
    EXPECT_EQ(out.upper(), vec({1, 3, 1}));
    EXPECT_THROW(act_bounds({Activation::ReLU}, in), ShapeError);
}

TEST(ReachBox, PointBoxMatchesEval)
{
    const auto net = two_layer_example();
    const Box out = reach_box(net, Box::point(vec({-3})));
    EXPECT_EQ(out.lower(), vec({3}));
    EXPECT_EQ(out.upper(), vec({3}));

    const auto big = random_network({3, 8, 8, 2}, 1.0, 4);
    CounterRng rng(9);
    for (int t = 0; t < 100; ++t) {
        const Vector x = oracle::random_point(Box(Vector::Constant(3, -1), Vector::Constant(3, 1)), rng);
        const Box b = reach_box(big, Box::point(x));
        EXPECT_LE((b.lower() - eval(big, x)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((b.upper() - eval(big, x)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ReachBox, HandIntervalExample)
{
    const Box out = reach_box(two_layer_example(), Box(vec({-3}), vec({3})));
    EXPECT_EQ(out.lower(), vec({0}));
    EXPECT_EQ(out.upper(), vec({6}));
}

TEST(ReachBox, MonteCarloContainment)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto net = random_network({3, 10, 10, 3}, 1.0, seed);
        const Box in(vec({-1, -0.5, 0}), vec({1, 0.5, 2}));
        const Box out = reach_box(net, in);
        CounterRng rng(100 + seed);
        for (int t = 0; t < 10'000; ++t)
            ASSERT_TRUE(out.contains(eval(net, oracle::random_point(in, rng))));
    }
}

TEST(ReachBox, InclusionMonotone)
{
    const auto net = random_network({2, 6, 6, 2}, 1.0, 12);
    const Box outer(vec({-1, -1}), vec({1, 1}));
    const Box inner(vec({-0.3, 0.1}), vec({0.2, 0.9}));
    EXPECT_TRUE(reach_box(net, inner).subset_of(reach_box(net, outer)));
}

TEST(ReachBoxSplit, SingleCellEqualsUnsplit)
{
    const auto net = random_network({2, 5, 1}, 1.0, 3);
    const Box in(vec({-1, -1}), vec({1, 1}));
    const auto cells = reach_box_split(net, in, {1});
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].lower(), reach_box(net, in).lower());
    EXPECT_EQ(cells[0].upper(), reach_box(net, in).upper());
}

TEST(ReachBoxSplit, HandExampleFourCells)
{
    // Cells [-3,-1.5], [-1.5,0], [0,1.5], [1.5,3] give [1.5,3], [0,1.5], [0,1.5], [1.5,3].
    const auto out = reach_box_split(two_layer_example(), Box(vec({-3}), vec({3})), {4});
    ASSERT_EQ(out.size(), 4u);
    const double lo[] = {1.5, 0, 0, 1.5};
    const double hi[] = {3, 1.5, 1.5, 3};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(out[i].lower()[0], lo[i]);
        EXPECT_DOUBLE_EQ(out[i].upper()[0], hi[i]);
    }
    EXPECT_LE(hull(out).upper()[0], 6.0);
}

TEST(ReachBoxSplit, CellsInsideUnsplitBound)
{
    const auto net = random_network({2, 8, 8, 2}, 1.0, 77);
    const Box in(vec({-1, -2}), vec({1, 0}));
    const Box whole = reach_box(net, in);
    for (std::size_t k : {2u, 3u, 5u}) {
        const auto cells = reach_box_split(net, in, {k});
        EXPECT_EQ(cells.size(), k * k);
        for (const auto& c : cells)
            EXPECT_TRUE(c.subset_of(whole));
    }
}

TEST(ReachBoxSplit, UnionContainsSamples)
{
    const auto net = random_network({2, 8, 1}, 1.0, 31);
    const Box in(vec({-1, -1}), vec({1, 1}));
    const Box u = hull(reach_box_split(net, in, {4}));
    CounterRng rng(2);
    for (int t = 0; t < 10'000; ++t)
        ASSERT_TRUE(u.contains(eval(net, oracle::random_point(in, rng))));
}

TEST(ReachBoxSplit, NestedGridsAreBitIdentical)
{
    const Box in(vec({-0.7, 0.1}), vec({1.3, 0.4}));
    // Each cell of the 6-grid sits inside a cell of the 3-grid.
    for (std::size_t i = 0; i < 36; ++i) {
        const Box fine = grid_cell(in, 6, i);
        const std::size_t r = (i / 6) / 2, c = (i % 6) / 2;
        EXPECT_TRUE(fine.subset_of(grid_cell(in, 3, r * 3 + c)));
    }
}

TEST(ReachBoxSplit, CellCap)
{
    const auto net = random_network({4, 2, 1}, 1.0, 1);
    const Box in(Vector::Zero(4), Vector::Ones(4));
    EXPECT_THROW(reach_box_split(net, in, {100, 1000}), ResourceError);
    EXPECT_THROW(reach_box_split(net, in, {1000}), ResourceError); // 10^12 > default cap
    EXPECT_THROW(reach_box_split(net, in, {0}), ArgumentError);
}

TEST(ReachBoxSplit, ParallelMatchesSerial)
{
    const auto net = random_network({2, 8, 2}, 1.0, 5);
    const Box in(vec({-1, -1}), vec({1, 1}));
    const auto a = reach_box_split(net, in, {6}, 1);
    const auto b = reach_box_split(net, in, {6}, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].lower(), b[i].lower());
        EXPECT_EQ(a[i].upper(), b[i].upper());
    }
}
