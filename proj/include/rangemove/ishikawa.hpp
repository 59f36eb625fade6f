#ifndef RANGEMOVE_ISHIKAWA_HPP
#define RANGEMOVE_ISHIKAWA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/maxflow.hpp"
#include "rangemove/prior.hpp"

namespace rangemove {

/// Contiguous label range [lo, hi].
struct LabelInterval {
    Label lo = 0;
    Label hi = 0;

    int size() const { return hi - lo + 1; }
    bool contains(Label l) const { return l >= lo && l <= hi; }
    bool operator==(const LabelInterval&) const = default;
};

/// How an edge of the model enters a move's subproblem.
enum class EdgeRole : std::uint8_t {
    ActiveActive,  ///< pairwise term over the active labels (prior h, or g if requested)
    ActiveFrozen,  ///< folded into the active endpoint's unary, always with g
    FrozenFrozen,  ///< constant
    Dropped,       ///< both ends active but the term is frozen as a constant
};

/// Default roles from an activity mask: no edge dropped.
inline std::vector<EdgeRole> classify_edges(const GraphTopology& topology,
                                            const std::vector<char>& active) {
    std::vector<EdgeRole> roles(topology.edge_count());
    for (std::size_t e = 0; e < roles.size(); ++e) {
        const Edge& edge = topology.edge(e);
        const bool a = active[static_cast<std::size_t>(edge.u)] != 0;
        const bool b = active[static_cast<std::size_t>(edge.v)] != 0;
        roles[e] = a && b ? EdgeRole::ActiveActive
                          : (a || b ? EdgeRole::ActiveFrozen : EdgeRole::FrozenFrozen);
    }
    return roles;
}

struct PairTerm {
    int a = 0;            ///< local index of the edge's u endpoint
    int b = 0;            ///< local index of the edge's v endpoint
    double weight = 0.0;  ///< the term is weight * pair_table(u_a - u_b)
};

/// Reduced multi-label problem over the active nodes of one move:
///   E'(u) = constant_term + sum_a unary[a][u_a - lo_a]
///         + sum_pairs weight * pair_table(u_a - u_b).
struct SubProblem {
    int label_count = 2;
    std::vector<NodeId> active_nodes;
    std::vector<LabelInterval> intervals;
    std::vector<std::vector<double>> unary;
    std::vector<PairTerm> pairs;
    DifferenceTable pair_table;
    double constant_term = 0.0;

    std::size_t size() const { return active_nodes.size(); }

    double evaluate(const std::vector<Label>& u) const {
        detail::require(u.size() == active_nodes.size(), "SubProblem::evaluate: size mismatch");
        double total = constant_term;
        for (std::size_t a = 0; a < u.size(); ++a) {
            detail::require(intervals[a].contains(u[a]), "SubProblem::evaluate: label outside interval");
            total += unary[a][static_cast<std::size_t>(u[a] - intervals[a].lo)];
        }
        for (const PairTerm& p : pairs)
            total += p.weight * pair_table(u[static_cast<std::size_t>(p.a)] - u[static_cast<std::size_t>(p.b)]);
        return total;
    }

    /// Writes the active labels back into a full labeling.
    Labeling expand(const Labeling& frozen, const std::vector<Label>& u) const {
        Labeling x = frozen;
        for (std::size_t a = 0; a < u.size(); ++a) x[static_cast<std::size_t>(active_nodes[a])] = u[a];
        return x;
    }

    /// Current labels of the active nodes.
    std::vector<Label> restrict(const Labeling& x) const {
        std::vector<Label> u(active_nodes.size());
        for (std::size_t a = 0; a < u.size(); ++a) u[a] = x[static_cast<std::size_t>(active_nodes[a])];
        return u;
    }
};

/// Reduces the energy to the active nodes. Edges between two frozen nodes and
/// dropped edges become constants, edges with one active end become unary
/// terms evaluated with g, and active-active edges keep `pair_mode`'s table.
/// `intervals` holds one entry per model node; entries of frozen nodes are
/// ignored. Each active node's current label must lie in its interval, so the
/// move can always reproduce x.
inline SubProblem build_subproblem(const EnergyModel& model, const Labeling& x,
                                   const std::vector<char>& active,
                                   const std::vector<LabelInterval>& intervals,
                                   const std::vector<EdgeRole>& roles,
                                   PriorMode pair_mode = PriorMode::H) {
    validate_labeling(model, x);
    const auto n = static_cast<std::size_t>(model.node_count());
    detail::require(active.size() == n && intervals.size() == n,
                    "build_subproblem: active/interval vectors must cover every node");
    detail::require(roles.size() == model.topology().edge_count(),
                    "build_subproblem: one role per edge required");

    SubProblem sub;
    sub.label_count = model.label_count();
    sub.pair_table = model.prior().table(pair_mode);

    std::vector<int> local(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) {
            sub.constant_term += model.unary()(static_cast<NodeId>(i), x[i]);
            continue;
        }
        const LabelInterval& iv = intervals[i];
        detail::require(iv.lo >= 0 && iv.hi < model.label_count() && iv.lo <= iv.hi,
                        "build_subproblem: candidate interval empty or outside the label set");
        detail::require(iv.contains(x[i]),
                        "build_subproblem: current label outside its candidate interval");
        local[i] = static_cast<int>(sub.active_nodes.size());
        sub.active_nodes.push_back(static_cast<NodeId>(i));
        sub.intervals.push_back(iv);
        auto row = model.unary().row(static_cast<NodeId>(i));
        sub.unary.emplace_back(row.begin() + iv.lo, row.begin() + iv.hi + 1);
    }

    const Prior& prior = model.prior();
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto u = static_cast<std::size_t>(edges[e].u), v = static_cast<std::size_t>(edges[e].v);
        const double w = model.weight(e);
        const bool au = active[u] != 0, av = active[v] != 0;
        switch (roles[e]) {
        case EdgeRole::ActiveActive:
            detail::require(au && av, "build_subproblem: ActiveActive edge with a frozen end");
            sub.pairs.push_back({local[u], local[v], w});
            break;
        case EdgeRole::ActiveFrozen: {
            detail::require(au != av, "build_subproblem: ActiveFrozen edge needs exactly one active end");
            const std::size_t a = au ? u : v;
            auto& row = sub.unary[static_cast<std::size_t>(local[a])];
            const LabelInterval& iv = sub.intervals[static_cast<std::size_t>(local[a])];
            for (Label l = iv.lo; l <= iv.hi; ++l) {
                const int d = au ? l - x[v] : x[u] - l;
                row[static_cast<std::size_t>(l - iv.lo)] += w * prior.g(d);
            }
            break;
        }
        case EdgeRole::FrozenFrozen:
            detail::require(!au && !av, "build_subproblem: FrozenFrozen edge with an active end");
            sub.constant_term += w * prior.g(x[u] - x[v]);
            break;
        case EdgeRole::Dropped:
            sub.constant_term += w * prior.g(x[u] - x[v]);
            break;
        }
    }
    return sub;
}

inline SubProblem build_subproblem(const EnergyModel& model, const Labeling& x,
                                   const std::vector<char>& active,
                                   const std::vector<LabelInterval>& intervals,
                                   PriorMode pair_mode = PriorMode::H) {
    return build_subproblem(model, x, active, intervals, classify_edges(model.topology(), active),
                            pair_mode);
}

/// Threshold encoding of a SubProblem: active node a owns a column of
/// size_a - 1 network nodes; column node k is on the source side iff
/// u_a >= lo_a + k. Sentinel arcs inside a column forbid non-monotone cuts.
/// For every labeling u, cut_capacity(encode(u)) + constant == E'(u).
struct LayeredGraph {
    FlowNetwork network;
    std::vector<int> column_start;  ///< network id of the k = 1 node of each column
    double constant = 0.0;
    std::size_t inter_column_arcs = 0;
    std::vector<std::size_t> arcs_per_pair;
};

inline LayeredGraph build_layered_graph(const SubProblem& sub) {
    const std::size_t count = sub.size();
    LayeredGraph g;
    g.network = FlowNetwork(2, 0, 1);
    g.column_start.resize(count);
    for (std::size_t a = 0; a < count; ++a)
        g.column_start[a] = g.network.add_nodes(sub.intervals[a].size() - 1);

    const DifferenceTable& table = sub.pair_table;
    detail::require(table.max_abs() >= 1 || sub.pairs.empty(),
                    "build_layered_graph: pair table does not cover any difference");
    const int span = table.max_abs() - 1;
    // Second differences of the pair table at every interior difference.
    std::vector<double> second(static_cast<std::size_t>(std::max(2 * span + 1, 0)), 0.0);
    std::vector<int> negative_prefix(second.size() + 1, 0);
    for (int d = -span; d <= span; ++d) {
        double sd = table(d + 1) - 2.0 * table(d) + table(d - 1);
        const double scale = std::max({1.0, std::abs(table(d - 1)), std::abs(table(d)), std::abs(table(d + 1))});
        const bool negative = sd < -1e-9 * scale;
        if (!negative && std::abs(sd) <= 1e-12 * scale) sd = 0.0;
        second[static_cast<std::size_t>(d + span)] = std::max(sd, 0.0);
        negative_prefix[static_cast<std::size_t>(d + span) + 1] =
            negative_prefix[static_cast<std::size_t>(d + span)] + (negative ? 1 : 0);
    }
    std::vector<int> nonzero;
    for (int d = -span; d <= span; ++d)
        if (second[static_cast<std::size_t>(d + span)] > 0.0) nonzero.push_back(d);

    // Per-node unary in interval coordinates, accumulated with the linear
    // parts of the pairwise decomposition.
    std::vector<std::vector<double>> unary = sub.unary;
    double constant = sub.constant_term;

    struct PendingArc {
        int from, to;
        double capacity;
    };
    std::vector<PendingArc> pair_arcs;
    g.arcs_per_pair.assign(sub.pairs.size(), 0);

    for (std::size_t p = 0; p < sub.pairs.size(); ++p) {
        const PairTerm& term = sub.pairs[p];
        const auto a = static_cast<std::size_t>(term.a), b = static_cast<std::size_t>(term.b);
        const LabelInterval ia = sub.intervals[a], ib = sub.intervals[b];
        const int la = ia.size(), lb = ib.size();
        const double w = term.weight;
        auto theta = [&](int ka, int kb) { return w * table((ia.lo + ka) - (ib.lo + kb)); };

        // The arcs use second differences at d in the interior of the span.
        if (la > 1 && lb > 1) {
            const int lo_d = ia.lo + 1 - ib.hi, hi_d = ia.hi - ib.lo - 1;
            const int neg = negative_prefix[static_cast<std::size_t>(hi_d + span) + 1] -
                            negative_prefix[static_cast<std::size_t>(lo_d + span)];
            if (neg > 0)
                throw NonConvexPrior("solve_exact: pair table is not convex over the candidate span");
        }

        std::vector<double> row_sum(static_cast<std::size_t>(la), 0.0);
        if (w > 0.0) {
            for (int k = 1; k < la; ++k) {
                for (int d : nonzero) {
                    const int m = ia.lo + k - d - ib.lo;
                    if (m < 1 || m >= lb) continue;
                    const double cap = w * second[static_cast<std::size_t>(d + span)];
                    pair_arcs.push_back({g.column_start[a] + k - 1, g.column_start[b] + m - 1, cap});
                    row_sum[static_cast<std::size_t>(k)] += cap;
                    ++g.arcs_per_pair[p];
                }
            }
        }
        double prefix = 0.0;
        for (int ka = 0; ka < la; ++ka) {
            prefix += row_sum[static_cast<std::size_t>(ka)];
            unary[a][static_cast<std::size_t>(ka)] += theta(ka, 0) - prefix;
        }
        for (int kb = 0; kb < lb; ++kb) unary[b][static_cast<std::size_t>(kb)] += theta(0, kb);
        constant -= theta(0, 0);
        g.inter_column_arcs += g.arcs_per_pair[p];
    }

    // Unary: U(u) = U(lo) + sum_k (U(k) - U(k-1)) [u >= lo + k].
    for (std::size_t a = 0; a < count; ++a) {
        const auto& row = unary[a];
        constant += row[0];
        for (std::size_t k = 1; k < row.size(); ++k) {
            const int node = g.column_start[a] + static_cast<int>(k) - 1;
            const double c = row[k] - row[k - 1];
            if (c > 0.0) {
                g.network.add_arc(node, g.network.sink(), c);
            } else if (c < 0.0) {
                g.network.add_arc(g.network.source(), node, -c);
                constant += c;
            }
        }
        for (std::size_t k = 1; k + 1 < row.size(); ++k) {
            const int node = g.column_start[a] + static_cast<int>(k) - 1;
            g.network.add_arc(node + 1, node, kInfiniteCapacity);
        }
    }
    for (const PendingArc& arc : pair_arcs) g.network.add_arc(arc.from, arc.to, arc.capacity);

    if (!(g.network.total_finite_capacity() < kInfiniteCapacity))
        throw ContractViolation("build_layered_graph: energy scale exceeds the sentinel capacity");
    g.constant = constant;
    return g;
}

/// Cut that represents labeling u of the subproblem.
inline std::vector<CutSide> encode_labeling(const LayeredGraph& g, const SubProblem& sub,
                                            const std::vector<Label>& u) {
    detail::require(u.size() == sub.size(), "encode_labeling: size mismatch");
    std::vector<CutSide> side(static_cast<std::size_t>(g.network.node_count()), CutSide::Sink);
    side[static_cast<std::size_t>(g.network.source())] = CutSide::Source;
    for (std::size_t a = 0; a < u.size(); ++a) {
        const LabelInterval& iv = sub.intervals[a];
        detail::require(iv.contains(u[a]), "encode_labeling: label outside interval");
        for (int k = 1; k < iv.size(); ++k)
            if (u[a] >= iv.lo + k)
                side[static_cast<std::size_t>(g.column_start[a] + k - 1)] = CutSide::Source;
    }
    return side;
}

inline std::vector<Label> decode_cut(const LayeredGraph& g, const SubProblem& sub,
                                     const std::vector<CutSide>& side) {
    std::vector<Label> u(sub.size());
    for (std::size_t a = 0; a < u.size(); ++a) {
        const LabelInterval& iv = sub.intervals[a];
        int above = 0;
        bool prefix = true;
        for (int k = 1; k < iv.size(); ++k) {
            const bool src = side[static_cast<std::size_t>(g.column_start[a] + k - 1)] == CutSide::Source;
            if (src && !prefix) throw std::logic_error("decode_cut: non-monotone column");
            if (src) ++above;
            else prefix = false;
        }
        u[a] = iv.lo + above;
    }
    return u;
}

struct ExactSolution {
    std::vector<Label> labels;  ///< one per active node, in SubProblem order
    double energy = 0.0;        ///< E'(labels), constant term included
};

/// Exact minimizer of E' via one minimum cut. The pair table must be convex
/// over every span of differences it is evaluated on; otherwise NonConvexPrior.
inline ExactSolution solve_exact(const SubProblem& sub,
                                 MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::BoykovKolmogorov) {
    ExactSolution sol;
    if (sub.size() == 0) {
        sol.energy = sub.constant_term;
        return sol;
    }
    const LayeredGraph g = build_layered_graph(sub);
    const CutResult cut = max_flow(g.network, algorithm);
    sol.labels = decode_cut(g, sub, cut.side_of_cut);
    sol.energy = sub.evaluate(sol.labels);
    return sol;
}

} // namespace rangemove

#endif // RANGEMOVE_ISHIKAWA_HPP
