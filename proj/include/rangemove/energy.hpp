#ifndef RANGEMOVE_ENERGY_HPP
#define RANGEMOVE_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rangemove/error.hpp"
#include "rangemove/prior.hpp"

namespace rangemove {

using Label = int;
using NodeId = int;

/// x: one label per node.
using Labeling = std::vector<Label>;

/// Ordered label set {0, ..., count-1}.
struct LabelSpace {
    int count = 2;

    explicit LabelSpace(int n) : count(n) {
        detail::require(count >= 2, "LabelSpace: at least two labels required");
    }
    bool contains(Label l) const { return l >= 0 && l < count; }
};

/// Pairwise term orientation: the prior is evaluated at x[u] - x[v].
struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    bool operator==(const Edge&) const = default;
};

struct GridShape {
    int width = 0;
    int height = 0;
};

/// Nodes and pairwise edges. Edges are kept in canonical order
/// (lexicographic on (min(u,v), max(u,v))) whatever order they were given in.
class GraphTopology {
public:
    GraphTopology() = default;

    /// Throws if an endpoint is out of range, an edge is a self loop, or the
    /// same pair appears twice (in either orientation). The permutation
    /// applied to the input edges is available through input_order().
    GraphTopology(int node_count, std::vector<Edge> edges,
                  std::optional<GridShape> grid = std::nullopt)
        : node_count_(node_count), grid_(grid) {
        detail::require(node_count_ >= 1, "GraphTopology: need at least one node");
        for (const Edge& e : edges) {
            detail::require(e.u >= 0 && e.u < node_count_ && e.v >= 0 && e.v < node_count_,
                            "GraphTopology: edge endpoint out of range");
            detail::require(e.u != e.v, "GraphTopology: self loop");
        }
        std::vector<std::size_t> order(edges.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        auto key = [&](std::size_t k) {
            return std::pair{std::min(edges[k].u, edges[k].v), std::max(edges[k].u, edges[k].v)};
        };
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
        for (std::size_t k = 1; k < order.size(); ++k)
            detail::require(key(order[k - 1]) != key(order[k]), "GraphTopology: duplicate edge");
        edges_.reserve(edges.size());
        for (std::size_t k : order) edges_.push_back(edges[k]);
        input_order_ = std::move(order);

        incident_.assign(static_cast<std::size_t>(node_count_), {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            incident_[static_cast<std::size_t>(edges_[e].u)].push_back(static_cast<int>(e));
            incident_[static_cast<std::size_t>(edges_[e].v)].push_back(static_cast<int>(e));
        }
    }

    int node_count() const { return node_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }
    const std::optional<GridShape>& grid() const { return grid_; }

    /// Edge ids touching node i, ascending.
    std::span<const int> incident(NodeId i) const {
        return incident_[static_cast<std::size_t>(i)];
    }

    /// input_order()[k] is the position, in the constructor argument, of edges()[k].
    const std::vector<std::size_t>& input_order() const { return input_order_; }

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
    std::optional<GridShape> grid_;
    std::vector<std::vector<int>> incident_;
    std::vector<std::size_t> input_order_;
};

/// 4-connected width x height grid, nodes row-major.
inline GraphTopology make_grid_topology(int width, int height) {
    detail::require(width >= 1 && height >= 1, "make_grid_topology: empty grid");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2 * width * height));
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int p = y * width + x;
            if (x + 1 < width) edges.push_back({p, p + 1});
            if (y + 1 < height) edges.push_back({p, p + width});
        }
    }
    return GraphTopology(width * height, std::move(edges), GridShape{width, height});
}

/// Path 0 - 1 - ... - (n-1).
inline GraphTopology make_chain_topology(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return GraphTopology(n, std::move(edges));
}

/// Dense node_count x label_count matrix of unary costs, node-major.
class UnaryTable {
public:
    UnaryTable() = default;
    UnaryTable(int node_count, int label_count, std::vector<double> costs)
        : node_count_(node_count), label_count_(label_count), costs_(std::move(costs)) {
        detail::require(costs_.size() ==
                            static_cast<std::size_t>(node_count_) * static_cast<std::size_t>(label_count_),
                        "UnaryTable: size mismatch");
        for (double c : costs_) detail::require(std::isfinite(c), "UnaryTable: non-finite cost");
    }

    int node_count() const { return node_count_; }
    int label_count() const { return label_count_; }

    double operator()(NodeId i, Label l) const {
        return costs_[static_cast<std::size_t>(i) * static_cast<std::size_t>(label_count_) +
                      static_cast<std::size_t>(l)];
    }

    std::span<const double> row(NodeId i) const {
        return {costs_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(label_count_),
                static_cast<std::size_t>(label_count_)};
    }

    const std::vector<double>& costs() const { return costs_; }

private:
    int node_count_ = 0;
    int label_count_ = 0;
    std::vector<double> costs_;
};

/// E(x) = sum_i U_i(x_i) + sum_(u,v) w_uv f(x_u - x_v), with f = g or h.
class EnergyModel {
public:
    /// edge_weights are aligned with topology.edges() (canonical order).
    EnergyModel(GraphTopology topology, UnaryTable unary, Prior prior,
                std::vector<double> edge_weights)
        : topology_(std::move(topology)),
          labels_(unary.label_count()),
          unary_(std::move(unary)),
          prior_(std::move(prior)),
          weights_(std::move(edge_weights)) {
        detail::require(unary_.node_count() == topology_.node_count(),
                        "EnergyModel: unary rows != node count");
        detail::require(prior_.label_count() == labels_.count,
                        "EnergyModel: prior built for a different label count");
        detail::require(weights_.size() == topology_.edge_count(),
                        "EnergyModel: one weight per edge required");
        for (double w : weights_)
            detail::require(std::isfinite(w) && w >= 0.0, "EnergyModel: weights must be finite and >= 0");
    }

    const GraphTopology& topology() const { return topology_; }
    const LabelSpace& labels() const { return labels_; }
    int label_count() const { return labels_.count; }
    int node_count() const { return topology_.node_count(); }
    const UnaryTable& unary() const { return unary_; }
    const Prior& prior() const { return prior_; }
    const std::vector<double>& edge_weights() const { return weights_; }
    double weight(std::size_t e) const { return weights_[e]; }

    /// Same model with another prior (same label count).
    EnergyModel with_prior(Prior prior) const {
        return EnergyModel(topology_, unary_, std::move(prior), weights_);
    }

private:
    GraphTopology topology_;
    LabelSpace labels_;
    UnaryTable unary_;
    Prior prior_;
    std::vector<double> weights_;
};

inline void validate_labeling(const EnergyModel& model, const Labeling& x) {
    detail::require(x.size() == static_cast<std::size_t>(model.node_count()),
                    "labeling length does not match node count");
    for (Label l : x)
        detail::require(model.labels().contains(l), "labeling contains an out-of-range label");
}

inline double evaluate_energy(const EnergyModel& model, const Labeling& x,
                              PriorMode mode = PriorMode::G) {
    validate_labeling(model, x);
    double total = 0.0;
    for (int i = 0; i < model.node_count(); ++i)
        total += model.unary()(i, x[static_cast<std::size_t>(i)]);
    const auto& table = model.prior().table(mode);
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int d = x[static_cast<std::size_t>(edges[e].u)] - x[static_cast<std::size_t>(edges[e].v)];
        total += model.weight(e) * table(d);
    }
    return total;
}

/// Hybrid energy: h on edges with both ends in `active`, g elsewhere.
/// `active` is a per-node membership mask.
inline double evaluate_hybrid_energy(const EnergyModel& model, const Labeling& x,
                                     const std::vector<char>& active) {
    validate_labeling(model, x);
    detail::require(active.size() == static_cast<std::size_t>(model.node_count()),
                    "evaluate_hybrid_energy: active mask length mismatch");
    double total = 0.0;
    for (int i = 0; i < model.node_count(); ++i)
        total += model.unary()(i, x[static_cast<std::size_t>(i)]);
    const auto& prior = model.prior();
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto u = static_cast<std::size_t>(edges[e].u), v = static_cast<std::size_t>(edges[e].v);
        const int d = x[u] - x[v];
        const bool both = active[u] && active[v];
        total += model.weight(e) * (both ? prior.h(d) : prior.g(d));
    }
    return total;
}

} // namespace rangemove

#endif // RANGEMOVE_ENERGY_HPP
