#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_support.hpp"

using namespace rangemove;

TEST(Dimacs, ParsesStandardFile) {
    std::istringstream in(R"(c tiny
p max 4 5
n 1 s
n 4 t
a 1 2 3
a 1 3 2
a 2 3 1
a 2 4 2
a 3 4 3
)");
    const FlowNetwork net = read_dimacs(in);
    EXPECT_EQ(net.node_count(), 4);
    EXPECT_EQ(net.source(), 0);
    EXPECT_EQ(net.sink(), 3);
    EXPECT_EQ(net.arcs().size(), 5u);
    EXPECT_NEAR(max_flow(net).flow_value, 5.0, 1e-12);
}

TEST(Dimacs, RoundTrip) {
    std::mt19937 rng(8);
    const FlowNetwork net = testsupport::random_network(rng, 8, 0.4);
    std::stringstream ss;
    write_dimacs(ss, net);
    const FlowNetwork back = read_dimacs(ss);
    ASSERT_EQ(back.arcs().size(), net.arcs().size());
    for (std::size_t k = 0; k < net.arcs().size(); ++k) {
        EXPECT_EQ(back.arcs()[k].from, net.arcs()[k].from);
        EXPECT_EQ(back.arcs()[k].to, net.arcs()[k].to);
        EXPECT_EQ(back.arcs()[k].capacity, net.arcs()[k].capacity);
    }
    EXPECT_NEAR(max_flow(back).flow_value, max_flow(net).flow_value, 1e-12);
}

TEST(Dimacs, LayeredGraphDump) {
    std::mt19937 rng(9);
    const auto m = testsupport::random_grid(rng, 2, 2, 4, PriorKind::TruncatedQuadratic, 2);
    const auto sub = build_subproblem(m, Labeling(4, 0), std::vector<char>(4, 1),
                                      std::vector<LabelInterval>(4, LabelInterval{0, 3}));
    const LayeredGraph g = build_layered_graph(sub);
    std::stringstream ss;
    write_dimacs(ss, g.network);
    EXPECT_NEAR(max_flow(read_dimacs(ss)).flow_value + g.constant, solve_exact(sub).energy, 1e-9);
}

TEST(Dimacs, RejectsMalformedInput) {
    const char* bad[] = {
        "a 1 2 3\n",
        "p min 2 0\nn 1 s\nn 2 t\n",
        "p max 2 1\nn 1 s\nn 2 t\na 1 3 4\n",
        "p max 2 1\nn 1 s\na 1 2 4\n",
        "p max 2 2\nn 1 s\nn 2 t\na 1 2 4\n",
        "p max 2 1\nn 1 s\nn 2 t\na 1 2 -4\n",
        "p max 2 0\nn 1 s\nn 2 x\n",
        "x\n",
    };
    for (const char* text : bad) {
        std::istringstream in(text);
        EXPECT_THROW(read_dimacs(in), ParseError) << text;
    }
}
