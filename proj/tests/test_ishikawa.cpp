#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace rangemove;
using testsupport::uniform_int;

namespace {

SubProblem full_problem(const EnergyModel& m, PriorMode mode = PriorMode::H) {
    const auto n = static_cast<std::size_t>(m.node_count());
    return build_subproblem(m, Labeling(n, 0), std::vector<char>(n, 1),
                            std::vector<LabelInterval>(n, LabelInterval{0, m.label_count() - 1}), mode);
}

SubProblem random_restricted_problem(std::mt19937& rng, const EnergyModel& m, Labeling& x) {
    const auto n = static_cast<std::size_t>(m.node_count());
    x = testsupport::random_labeling(rng, m.node_count(), m.label_count());
    std::vector<char> active(n);
    std::vector<LabelInterval> iv(n);
    for (std::size_t i = 0; i < n; ++i) {
        active[i] = uniform_int(rng, 0, 3) > 0;
        const int lo = uniform_int(rng, 0, x[i]);
        const int hi = uniform_int(rng, x[i], m.label_count() - 1);
        iv[i] = {lo, hi};
    }
    return build_subproblem(m, x, active, iv, PriorMode::H);
}

} // namespace

TEST(Ishikawa, ExactOnFullProblemsAgainstOracle) {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const int w = uniform_int(rng, 1, 3), h = uniform_int(rng, 1, 2);
        const int l = uniform_int(rng, 2, 6);
        const auto m = testsupport::random_grid(rng, w, h, l, testsupport::pick_prior(trial), uniform_int(rng, 1, 3));
        const ExactSolution sol = solve_exact(full_problem(m));
        const OracleResult oracle = exact_minimum(m, PriorMode::H);
        EXPECT_NEAR(sol.energy, oracle.energy, 1e-6) << "trial " << trial;
        EXPECT_NEAR(evaluate_energy(m, sol.labels, PriorMode::H), sol.energy, 1e-9);
    }
}

TEST(Ishikawa, ExactOnRestrictedIntervalsAgainstOracle) {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const auto m = testsupport::random_grid(rng, 3, 2, 6, testsupport::pick_prior(trial), uniform_int(rng, 1, 4));
        Labeling x;
        const SubProblem sub = random_restricted_problem(rng, m, x);
        const ExactSolution sol = solve_exact(sub);
        const OracleResult oracle = exact_move_minimum(sub);
        EXPECT_NEAR(sol.energy, oracle.energy, 1e-6) << "trial " << trial;
        // E' of the current labeling equals the hybrid energy of x
        std::vector<char> active(static_cast<std::size_t>(m.node_count()), 0);
        for (NodeId i : sub.active_nodes) active[static_cast<std::size_t>(i)] = 1;
        EXPECT_NEAR(sub.evaluate(sub.restrict(x)), evaluate_hybrid_energy(m, x, active), 1e-9);
        EXPECT_LE(sol.energy, sub.evaluate(sub.restrict(x)) + 1e-9);
    }
}

TEST(Ishikawa, CutCapacityEqualsReducedEnergy) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = testsupport::random_grid(rng, 3, 3, 7, testsupport::pick_prior(trial), uniform_int(rng, 1, 4));
        Labeling x;
        const SubProblem sub = random_restricted_problem(rng, m, x);
        const LayeredGraph g = build_layered_graph(sub);
        for (int sample = 0; sample < 20; ++sample) {
            std::vector<Label> u(sub.size());
            for (std::size_t a = 0; a < u.size(); ++a) u[a] = uniform_int(rng, sub.intervals[a].lo, sub.intervals[a].hi);
            const auto side = encode_labeling(g, sub, u);
            EXPECT_NEAR(cut_capacity(g.network, side) + g.constant, sub.evaluate(u), 1e-8);
            EXPECT_EQ(decode_cut(g, sub, side), u);
        }
    }
}

TEST(Ishikawa, BothFlowAlgorithmsGiveTheSameEnergy) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = testsupport::random_grid(rng, 8, 8, 10, testsupport::pick_prior(trial), 3);
        const SubProblem sub = full_problem(m);
        EXPECT_NEAR(solve_exact(sub, MaxFlowAlgorithm::BoykovKolmogorov).energy,
                    solve_exact(sub, MaxFlowAlgorithm::ShortestAugmentingPath).energy, 1e-6);
    }
}

TEST(Ishikawa, HuberGraphIsSparse) {
    const int l = 32, t = 3;
    GraphTopology topo(2, {{0, 1}});
    const UnaryTable unary(2, l, std::vector<double>(2 * l, 0.0));
    const EnergyModel huber(topo, unary, make_prior(PriorKind::TruncatedQuadratic, t, l), {1.0});
    std::vector<double> sq;
    for (int d = -(l - 1); d <= l - 1; ++d) sq.push_back(double(d) * d);
    const EnergyModel quad(topo, unary, make_tabulated_prior(sq, l - 1, l), {1.0});

    const auto huber_arcs = build_layered_graph(full_problem(huber)).arcs_per_pair.at(0);
    const auto quad_arcs = build_layered_graph(full_problem(quad)).arcs_per_pair.at(0);
    EXPECT_LE(huber_arcs, static_cast<std::size_t>(2 * l * (2 * t + 1)));
    EXPECT_GE(quad_arcs, static_cast<std::size_t>((l - 1) * (l - 1) / 2));
    EXPECT_EQ(quad_arcs, static_cast<std::size_t>((l - 1) * (l - 1)));
}

TEST(Ishikawa, RejectsNonConvexPairTable) {
    std::mt19937 rng(1);
    const auto m = testsupport::random_grid(rng, 2, 1, 8, PriorKind::TruncatedQuadratic, 2);
    EXPECT_THROW(solve_exact(full_problem(m, PriorMode::G)), NonConvexPrior);
    // within [0, 2] every difference is inside [-T, T], so g itself is convex
    const auto n = static_cast<std::size_t>(m.node_count());
    const SubProblem narrow = build_subproblem(m, Labeling(n, 0), std::vector<char>(n, 1),
                                               std::vector<LabelInterval>(n, LabelInterval{0, 2}), PriorMode::G);
    EXPECT_NO_THROW(solve_exact(narrow));
}

TEST(Ishikawa, EmptyActiveSetReturnsConstant) {
    std::mt19937 rng(2);
    const auto m = testsupport::random_grid(rng, 3, 3, 5, PriorKind::TruncatedLinear, 2);
    const auto x = testsupport::random_labeling(rng, 9, 5);
    const SubProblem sub = build_subproblem(m, x, std::vector<char>(9, 0), std::vector<LabelInterval>(9));
    const ExactSolution sol = solve_exact(sub);
    EXPECT_TRUE(sol.labels.empty());
    EXPECT_NEAR(sol.energy, evaluate_energy(m, x), 1e-9);
}

TEST(Ishikawa, SingleNodeTakesUnaryMinimum) {
    GraphTopology topo(1, {});
    const EnergyModel m(topo, UnaryTable(1, 5, {4, -2, 3, -7, 1}), make_prior(PriorKind::Cauchy, 2, 5), {});
    const ExactSolution sol = solve_exact(full_problem(m));
    ASSERT_EQ(sol.labels.size(), 1u);
    EXPECT_EQ(sol.labels[0], 3);
    EXPECT_DOUBLE_EQ(sol.energy, -7);
}

TEST(Ishikawa, IntervalMustContainCurrentLabel) {
    std::mt19937 rng(3);
    const auto m = testsupport::random_grid(rng, 2, 1, 5, PriorKind::TruncatedLinear, 2);
    EXPECT_THROW(build_subproblem(m, {4, 0}, {1, 1}, {LabelInterval{0, 2}, LabelInterval{0, 2}}), ContractViolation);
    EXPECT_THROW(build_subproblem(m, {0, 0}, {1, 1}, {LabelInterval{0, 5}, LabelInterval{0, 2}}), ContractViolation);
}

TEST(Ishikawa, DroppedEdgesBecomeConstants) {
    std::mt19937 rng(8);
    const auto m = testsupport::random_grid(rng, 3, 1, 6, PriorKind::TruncatedQuadratic, 2);
    const Labeling x{0, 5, 1};
    std::vector<EdgeRole> roles{EdgeRole::Dropped, EdgeRole::ActiveActive};
    const SubProblem sub = build_subproblem(m, x, {1, 1, 1}, std::vector<LabelInterval>(3, {0, 5}), roles);
    EXPECT_EQ(sub.pairs.size(), 1u);
    EXPECT_NEAR(sub.constant_term, m.weight(0) * m.prior().g(-5), 1e-12);
}
