#ifndef RANGEMOVE_MAXFLOW_HPP
#define RANGEMOVE_MAXFLOW_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "rangemove/error.hpp"

namespace rangemove {

/// Capacity used for constraint arcs that must never be cut. Networks built by
/// this library keep their total finite capacity below it.
inline constexpr double kInfiniteCapacity = 1e15;

/// Residual capacities at or below this are treated as saturated.
inline constexpr double kFlowTolerance = 1e-9;

struct Arc {
    int from = 0;
    int to = 0;
    double capacity = 0.0;
};

/// Directed s-t network. Reverse arcs are implicit (capacity 0).
class FlowNetwork {
public:
    FlowNetwork() = default;
    FlowNetwork(int node_count, int source, int sink)
        : node_count_(node_count), source_(source), sink_(sink) {
        detail::require(node_count_ >= 2, "FlowNetwork: need at least two nodes");
        detail::require(in_range(source_) && in_range(sink_), "FlowNetwork: terminal out of range");
        detail::require(source_ != sink_, "FlowNetwork: source == sink");
    }

    int add_node() { return node_count_++; }

    int add_nodes(int count) {
        const int first = node_count_;
        node_count_ += count;
        return first;
    }

    void add_arc(int from, int to, double capacity) {
        detail::require(in_range(from) && in_range(to), "FlowNetwork: arc endpoint out of range");
        detail::require(from != to, "FlowNetwork: self loop");
        detail::require(!std::isnan(capacity) && capacity >= 0.0 && capacity <= kInfiniteCapacity,
                        "FlowNetwork: capacity must lie in [0, kInfiniteCapacity]");
        arcs_.push_back({from, to, capacity});
    }

    int node_count() const { return node_count_; }
    int source() const { return source_; }
    int sink() const { return sink_; }
    const std::vector<Arc>& arcs() const { return arcs_; }

    /// Sum of all capacities below the sentinel.
    double total_finite_capacity() const {
        double total = 0.0;
        for (const Arc& a : arcs_)
            if (a.capacity < kInfiniteCapacity) total += a.capacity;
        return total;
    }

private:
    bool in_range(int v) const { return v >= 0 && v < node_count_; }

    int node_count_ = 2;
    int source_ = 0;
    int sink_ = 1;
    std::vector<Arc> arcs_;
};

enum class CutSide : std::uint8_t { Source, Sink };

struct CutResult {
    double flow_value = 0.0;
    /// Source side = nodes reachable from s in the final residual graph.
    std::vector<CutSide> side_of_cut;
};

enum class MaxFlowAlgorithm { BoykovKolmogorov, ShortestAugmentingPath };

/// Capacity of the arcs leaving the source side for the sink side.
inline double cut_capacity(const FlowNetwork& net, const std::vector<CutSide>& side) {
    detail::require(side.size() == static_cast<std::size_t>(net.node_count()),
                    "cut_capacity: side vector size mismatch");
    double total = 0.0;
    for (const Arc& a : net.arcs()) {
        if (side[static_cast<std::size_t>(a.from)] == CutSide::Source &&
            side[static_cast<std::size_t>(a.to)] == CutSide::Sink)
            total += a.capacity;
    }
    return total;
}

namespace detail {

/// Residual graph shared by both algorithms. Arcs touching a terminal are
/// folded into a signed per-node terminal capacity (positive: residual from s,
/// negative: residual to t). Arcs are stored in sister pairs (a, a ^ 1) and
/// scanned in insertion order.
class ResidualGraph {
public:
    explicit ResidualGraph(const FlowNetwork& net)
        : n(net.node_count()), s(net.source()), t(net.sink()),
          terminal(idx(n), 0.0) {
        std::vector<double> from_s(idx(n), 0.0), to_t(idx(n), 0.0);
        std::vector<int> degree(idx(n) + 1, 0);
        for (const Arc& a : net.arcs()) {
            if (a.from == s && a.to == t) {
                flow += a.capacity;
            } else if (a.from == s) {
                if (a.to != s) from_s[idx(a.to)] += a.capacity;
            } else if (a.to == t) {
                if (a.from != t) to_t[idx(a.from)] += a.capacity;
            } else if (a.from != t && a.to != s) {
                // Arcs into s or out of t never carry flow and are dropped.
                head.push_back(a.to);
                rcap.push_back(a.capacity);
                head.push_back(a.from);
                rcap.push_back(0.0);
                ++degree[idx(a.from)];
                ++degree[idx(a.to)];
            }
        }
        for (int v = 0; v < n; ++v) {
            if (v == s || v == t) continue;
            const double common = std::min(from_s[idx(v)], to_t[idx(v)]);
            flow += common;
            terminal[idx(v)] = from_s[idx(v)] - to_t[idx(v)];
        }
        start.assign(idx(n) + 1, 0);
        for (int v = 0; v < n; ++v) start[idx(v) + 1] = start[idx(v)] + degree[idx(v)];
        adjacency.resize(head.size());
        std::vector<int> fill(start.begin(), start.end() - 1);
        for (std::size_t a = 0; a < head.size(); ++a) {
            const int tail = head[a ^ 1U];
            adjacency[idx(fill[idx(tail)]++)] = static_cast<int>(a);
        }
    }

    static std::size_t idx(int v) { return static_cast<std::size_t>(v); }
    int tail(int a) const { return head[idx(a ^ 1)]; }

    /// Nodes reachable from s through residual capacity.
    std::vector<CutSide> source_reachable() const {
        std::vector<CutSide> side(idx(n), CutSide::Sink);
        std::deque<int> queue;
        side[idx(s)] = CutSide::Source;
        for (int v = 0; v < n; ++v) {
            if (v != s && v != t && terminal[idx(v)] > kFlowTolerance) {
                side[idx(v)] = CutSide::Source;
                queue.push_back(v);
            }
        }
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int k = start[idx(v)]; k < start[idx(v) + 1]; ++k) {
                const int a = adjacency[idx(k)];
                const int w = head[idx(a)];
                if (rcap[idx(a)] > kFlowTolerance && side[idx(w)] == CutSide::Sink) {
                    side[idx(w)] = CutSide::Source;
                    queue.push_back(w);
                }
            }
        }
        return side;
    }

    int n, s, t;
    std::vector<int> head;
    std::vector<double> rcap;
    std::vector<int> start;
    std::vector<int> adjacency;
    std::vector<double> terminal;
    double flow = 0.0;
};

/// Boykov-Kolmogorov: two search trees grown from the terminals, augmentation
/// along the path where they meet, and adoption of orphaned subtrees so the
/// trees are reused between augmentations.
class BoykovKolmogorov {
public:
    explicit BoykovKolmogorov(ResidualGraph& g)
        : g_(g), parent_(idx(g.n), kNone), in_sink_(idx(g.n), 0),
          active_(idx(g.n), 0), stamp_(idx(g.n), 0), dist_(idx(g.n), 0) {}

    void run() {
        for (int v = 0; v < g_.n; ++v) {
            if (v == g_.s || v == g_.t) continue;
            const double tc = g_.terminal[idx(v)];
            if (tc > kFlowTolerance || tc < -kFlowTolerance) {
                in_sink_[idx(v)] = tc < 0 ? 1 : 0;
                parent_[idx(v)] = kTerminal;
                stamp_[idx(v)] = 0;
                dist_[idx(v)] = 1;
                activate(v);
            }
        }
        while (!queue_.empty()) {
            const int i = queue_.front();
            if (parent_[idx(i)] == kNone) {
                queue_.pop_front();
                active_[idx(i)] = 0;
                continue;
            }
            const int bridge = grow(i);
            if (bridge < 0) {
                queue_.pop_front();
                active_[idx(i)] = 0;
                continue;
            }
            ++time_;
            augment(bridge);
            adopt_orphans();
        }
    }

private:
    static constexpr int kNone = -1;
    static constexpr int kTerminal = -2;
    static constexpr int kOrphan = -3;

    static std::size_t idx(int v) { return static_cast<std::size_t>(v); }
    static int sister(int a) { return a ^ 1; }

    void activate(int v) {
        if (!active_[idx(v)]) {
            active_[idx(v)] = 1;
            queue_.push_back(v);
        }
    }

    bool in_tree(int v) const { return parent_[idx(v)] != kNone; }

    // Returns an arc from a source-tree node to a sink-tree node, or -1.
    int grow(int i) {
        const bool sink_tree = in_sink_[idx(i)] != 0;
        for (int k = g_.start[idx(i)]; k < g_.start[idx(i) + 1]; ++k) {
            const int a = g_.adjacency[idx(k)];
            const int j = g_.head[idx(a)];
            const double cap = sink_tree ? g_.rcap[idx(sister(a))] : g_.rcap[idx(a)];
            if (cap <= kFlowTolerance) continue;
            if (!in_tree(j)) {
                in_sink_[idx(j)] = sink_tree ? 1 : 0;
                parent_[idx(j)] = sister(a);
                stamp_[idx(j)] = stamp_[idx(i)];
                dist_[idx(j)] = dist_[idx(i)] + 1;
                activate(j);
            } else if ((in_sink_[idx(j)] != 0) != sink_tree) {
                return sink_tree ? sister(a) : a;
            } else if (stamp_[idx(j)] <= stamp_[idx(i)] && dist_[idx(j)] > dist_[idx(i)]) {
                // Shorter path to the root through i.
                parent_[idx(j)] = sister(a);
                stamp_[idx(j)] = stamp_[idx(i)];
                dist_[idx(j)] = dist_[idx(i)] + 1;
            }
        }
        return -1;
    }

    void make_orphan(int v) {
        parent_[idx(v)] = kOrphan;
        orphans_.push_back(v);
    }

    void augment(int bridge) {
        double bottleneck = g_.rcap[idx(bridge)];
        // Source side: parent arcs point towards s; flow runs against them.
        int v = g_.tail(bridge);
        while (parent_[idx(v)] != kTerminal) {
            const int p = parent_[idx(v)];
            bottleneck = std::min(bottleneck, g_.rcap[idx(sister(p))]);
            v = g_.head[idx(p)];
        }
        bottleneck = std::min(bottleneck, g_.terminal[idx(v)]);
        v = g_.head[idx(bridge)];
        while (parent_[idx(v)] != kTerminal) {
            const int p = parent_[idx(v)];
            bottleneck = std::min(bottleneck, g_.rcap[idx(p)]);
            v = g_.head[idx(p)];
        }
        bottleneck = std::min(bottleneck, -g_.terminal[idx(v)]);

        g_.rcap[idx(bridge)] -= bottleneck;
        g_.rcap[idx(sister(bridge))] += bottleneck;

        v = g_.tail(bridge);
        while (parent_[idx(v)] != kTerminal) {
            const int p = parent_[idx(v)];
            g_.rcap[idx(p)] += bottleneck;
            g_.rcap[idx(sister(p))] -= bottleneck;
            const int up = g_.head[idx(p)];
            if (g_.rcap[idx(sister(p))] <= kFlowTolerance) make_orphan(v);
            v = up;
        }
        g_.terminal[idx(v)] -= bottleneck;
        if (g_.terminal[idx(v)] <= kFlowTolerance) make_orphan(v);

        v = g_.head[idx(bridge)];
        while (parent_[idx(v)] != kTerminal) {
            const int p = parent_[idx(v)];
            g_.rcap[idx(p)] -= bottleneck;
            g_.rcap[idx(sister(p))] += bottleneck;
            const int up = g_.head[idx(p)];
            if (g_.rcap[idx(p)] <= kFlowTolerance) make_orphan(v);
            v = up;
        }
        g_.terminal[idx(v)] += bottleneck;
        if (g_.terminal[idx(v)] >= -kFlowTolerance) make_orphan(v);

        g_.flow += bottleneck;
    }

    // Distance from v to its tree root, or -1 when the chain hits an orphan.
    int root_distance(int v) {
        int d = 0;
        int k = v;
        while (true) {
            if (stamp_[idx(k)] == time_) {
                d += dist_[idx(k)];
                break;
            }
            const int p = parent_[idx(k)];
            ++d;
            if (p == kTerminal) {
                stamp_[idx(k)] = time_;
                dist_[idx(k)] = 1;
                break;
            }
            if (p == kOrphan || p == kNone) return -1;
            k = g_.head[idx(p)];
        }
        // Cache distances along the verified chain.
        int dd = d;
        for (k = v; stamp_[idx(k)] != time_; k = g_.head[idx(parent_[idx(k)])]) {
            stamp_[idx(k)] = time_;
            dist_[idx(k)] = dd--;
        }
        return d;
    }

    void adopt_orphans() {
        while (!orphans_.empty()) {
            const int i = orphans_.front();
            orphans_.pop_front();
            const bool sink_tree = in_sink_[idx(i)] != 0;

            int best_arc = -1;
            int best_dist = std::numeric_limits<int>::max();
            for (int k = g_.start[idx(i)]; k < g_.start[idx(i) + 1]; ++k) {
                const int a = g_.adjacency[idx(k)];
                const int j = g_.head[idx(a)];
                const double cap = sink_tree ? g_.rcap[idx(a)] : g_.rcap[idx(sister(a))];
                if (cap <= kFlowTolerance) continue;
                if (!in_tree(j) || (in_sink_[idx(j)] != 0) != sink_tree) continue;
                const int d = root_distance(j);
                if (d >= 0 && d < best_dist) {
                    best_dist = d;
                    best_arc = a;
                }
            }

            if (best_arc >= 0) {
                parent_[idx(i)] = best_arc;
                stamp_[idx(i)] = time_;
                dist_[idx(i)] = best_dist + 1;
                continue;
            }

            // No valid parent: i becomes free, its children become orphans and
            // neighbours that could regrow into i are re-activated.
            for (int k = g_.start[idx(i)]; k < g_.start[idx(i) + 1]; ++k) {
                const int a = g_.adjacency[idx(k)];
                const int j = g_.head[idx(a)];
                if (!in_tree(j) || (in_sink_[idx(j)] != 0) != sink_tree) continue;
                const double cap = sink_tree ? g_.rcap[idx(a)] : g_.rcap[idx(sister(a))];
                if (cap > kFlowTolerance) activate(j);
                const int pj = parent_[idx(j)];
                if (pj >= 0 && g_.head[idx(pj)] == i) make_orphan(j);
            }
            parent_[idx(i)] = kNone;
        }
    }

    ResidualGraph& g_;
    std::vector<int> parent_;
    std::vector<std::uint8_t> in_sink_;
    std::vector<std::uint8_t> active_;
    std::vector<long> stamp_;
    std::vector<int> dist_;
    std::deque<int> queue_;
    std::deque<int> orphans_;
    long time_ = 0;
};

/// Edmonds-Karp style: repeatedly augment along a BFS-shortest residual path.
inline void shortest_augmenting_paths(ResidualGraph& g) {
    const auto n = static_cast<std::size_t>(g.n);
    constexpr int kViaSource = -2;
    std::vector<int> pred(n);
    while (true) {
        std::fill(pred.begin(), pred.end(), -1);
        std::deque<int> queue;
        for (int v = 0; v < g.n; ++v) {
            if (g.terminal[static_cast<std::size_t>(v)] > kFlowTolerance) {
                pred[static_cast<std::size_t>(v)] = kViaSource;
                queue.push_back(v);
            }
        }
        int last = -1;
        while (!queue.empty() && last < 0) {
            const int v = queue.front();
            queue.pop_front();
            if (g.terminal[static_cast<std::size_t>(v)] < -kFlowTolerance) {
                last = v;
                break;
            }
            for (int k = g.start[static_cast<std::size_t>(v)]; k < g.start[static_cast<std::size_t>(v) + 1]; ++k) {
                const int a = g.adjacency[static_cast<std::size_t>(k)];
                const int w = g.head[static_cast<std::size_t>(a)];
                if (g.rcap[static_cast<std::size_t>(a)] > kFlowTolerance && pred[static_cast<std::size_t>(w)] == -1) {
                    pred[static_cast<std::size_t>(w)] = a;
                    queue.push_back(w);
                }
            }
        }
        if (last < 0) return;

        double bottleneck = -g.terminal[static_cast<std::size_t>(last)];
        int v = last;
        while (pred[static_cast<std::size_t>(v)] != kViaSource) {
            const int a = pred[static_cast<std::size_t>(v)];
            bottleneck = std::min(bottleneck, g.rcap[static_cast<std::size_t>(a)]);
            v = g.tail(a);
        }
        bottleneck = std::min(bottleneck, g.terminal[static_cast<std::size_t>(v)]);

        g.terminal[static_cast<std::size_t>(last)] += bottleneck;
        v = last;
        while (pred[static_cast<std::size_t>(v)] != kViaSource) {
            const int a = pred[static_cast<std::size_t>(v)];
            g.rcap[static_cast<std::size_t>(a)] -= bottleneck;
            g.rcap[static_cast<std::size_t>(a ^ 1)] += bottleneck;
            v = g.tail(a);
        }
        g.terminal[static_cast<std::size_t>(v)] -= bottleneck;
        g.flow += bottleneck;
    }
}

} // namespace detail

/// Maximum s-t flow and the minimum cut it certifies. Throws std::logic_error
/// if a sentinel-capacity arc crosses the cut, which only happens for
/// networks whose constraint arcs cannot all be satisfied.
inline CutResult max_flow(const FlowNetwork& net,
                          MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::BoykovKolmogorov) {
    detail::ResidualGraph g(net);
    if (algorithm == MaxFlowAlgorithm::BoykovKolmogorov) {
        detail::BoykovKolmogorov(g).run();
    } else {
        detail::shortest_augmenting_paths(g);
    }
    CutResult result;
    result.flow_value = g.flow;
    result.side_of_cut = g.source_reachable();
    for (const Arc& a : net.arcs()) {
        if (a.capacity >= kInfiniteCapacity &&
            result.side_of_cut[static_cast<std::size_t>(a.from)] == CutSide::Source &&
            result.side_of_cut[static_cast<std::size_t>(a.to)] == CutSide::Sink)
            throw std::logic_error("max_flow: sentinel-capacity arc crosses the minimum cut");
    }
    return result;
}

/// Exhaustive minimum cut over every bipartition of the non-terminal nodes.
/// Test oracle; limited to 18 free nodes.
inline double min_cut_value_bruteforce(const FlowNetwork& net) {
    const int free_nodes = net.node_count() - 2;
    detail::require(free_nodes <= 18, "min_cut_value_bruteforce: more than 18 free nodes");
    std::vector<int> others;
    for (int v = 0; v < net.node_count(); ++v)
        if (v != net.source() && v != net.sink()) others.push_back(v);
    std::vector<CutSide> side(static_cast<std::size_t>(net.node_count()), CutSide::Sink);
    side[static_cast<std::size_t>(net.source())] = CutSide::Source;
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t count = 1U << others.size();
    for (std::uint32_t mask = 0; mask < count; ++mask) {
        for (std::size_t k = 0; k < others.size(); ++k)
            side[static_cast<std::size_t>(others[k])] = (mask >> k) & 1U ? CutSide::Source : CutSide::Sink;
        best = std::min(best, cut_capacity(net, side));
    }
    return best;
}

} // namespace rangemove

#endif // RANGEMOVE_MAXFLOW_HPP
