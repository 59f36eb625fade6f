#ifndef RANGEMOVE_ORACLE_HPP
#define RANGEMOVE_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/ishikawa.hpp"

namespace rangemove {

struct OracleBudget {
    std::uint64_t max_states = 10'000'000;
};

struct OracleResult {
    std::vector<Label> labels;
    double energy = 0.0;
};

namespace detail {

/// Product of per-variable domain sizes, checked against the budget.
inline void check_budget(const std::vector<int>& sizes, const OracleBudget& budget) {
    double states = 1.0;
    for (int s : sizes) states *= static_cast<double>(s);
    if (states > static_cast<double>(budget.max_states))
        throw BudgetExceeded("oracle: " + std::to_string(states) + " states exceed budget of " +
                             std::to_string(budget.max_states));
}

/// Odometer enumeration of every assignment, first digit most significant.
/// Each variable's cost terms are attached to the latest variable they
/// involve, so a partial sum is complete once its last variable is set.
/// Ties keep the first (lexicographically smallest) assignment.
class Odometer {
public:
    Odometer(std::vector<std::vector<Label>> domains, std::vector<std::vector<double>> unary,
             std::vector<std::vector<std::pair<int, int>>> back_terms,
             std::function<double(int, int, Label, Label)> pair_cost)
        : domains_(std::move(domains)), unary_(std::move(unary)),
          back_terms_(std::move(back_terms)), pair_cost_(std::move(pair_cost)) {}

    std::vector<Label> run() {
        const std::size_t n = domains_.size();
        current_.assign(n, 0);
        best_.assign(n, 0);
        best_value_ = std::numeric_limits<double>::infinity();
        if (n == 0) return {};
        descend(0, 0.0);
        return best_;
    }

private:
    void descend(std::size_t depth, double partial) {
        const auto& dom = domains_[depth];
        for (std::size_t k = 0; k < dom.size(); ++k) {
            current_[depth] = dom[k];
            double value = partial + unary_[depth][k];
            for (const auto& [other, term] : back_terms_[depth])
                value += pair_cost_(term, static_cast<int>(depth), current_[static_cast<std::size_t>(other)], dom[k]);
            if (depth + 1 == domains_.size()) {
                if (value < best_value_) {
                    best_value_ = value;
                    best_ = current_;
                }
            } else {
                descend(depth + 1, value);
            }
        }
    }

    std::vector<std::vector<Label>> domains_;
    std::vector<std::vector<double>> unary_;
    std::vector<std::vector<std::pair<int, int>>> back_terms_;
    std::function<double(int, int, Label, Label)> pair_cost_;
    std::vector<Label> current_;
    std::vector<Label> best_;
    double best_value_ = 0.0;
};

} // namespace detail

/// Global minimum of E (with g or h) by exhaustive enumeration.
inline OracleResult exact_minimum(const EnergyModel& model, PriorMode mode,
                                  const OracleBudget& budget = {}) {
    const int n = model.node_count();
    const int l = model.label_count();
    detail::check_budget(std::vector<int>(static_cast<std::size_t>(n), l), budget);

    std::vector<std::vector<Label>> domains(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> unary(static_cast<std::size_t>(n));
    std::vector<std::vector<std::pair<int, int>>> back(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (Label a = 0; a < l; ++a) domains[static_cast<std::size_t>(i)].push_back(a);
        auto row = model.unary().row(i);
        unary[static_cast<std::size_t>(i)].assign(row.begin(), row.end());
    }
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int later = std::max(edges[e].u, edges[e].v);
        const int earlier = std::min(edges[e].u, edges[e].v);
        back[static_cast<std::size_t>(later)].emplace_back(earlier, static_cast<int>(e));
    }
    const auto& table = model.prior().table(mode);
    auto pair_cost = [&](int e, int later, Label earlier_label, Label later_label) {
        const Edge& edge = edges[static_cast<std::size_t>(e)];
        const Label xu = edge.u == later ? later_label : earlier_label;
        const Label xv = edge.u == later ? earlier_label : later_label;
        return model.weight(static_cast<std::size_t>(e)) * table(xu - xv);
    };
    detail::Odometer odo(std::move(domains), std::move(unary), std::move(back), pair_cost);
    OracleResult result;
    result.labels = odo.run();
    result.energy = evaluate_energy(model, result.labels, mode);
    return result;
}

/// Exact minimum of a move's reduced energy E' over the product of its
/// candidate intervals. No convexity requirement.
inline OracleResult exact_move_minimum(const SubProblem& sub, const OracleBudget& budget = {}) {
    const std::size_t n = sub.size();
    std::vector<int> sizes;
    for (const auto& iv : sub.intervals) sizes.push_back(iv.size());
    detail::check_budget(sizes, budget);

    std::vector<std::vector<Label>> domains(n);
    std::vector<std::vector<std::pair<int, int>>> back(n);
    for (std::size_t a = 0; a < n; ++a)
        for (Label l = sub.intervals[a].lo; l <= sub.intervals[a].hi; ++l) domains[a].push_back(l);
    for (std::size_t p = 0; p < sub.pairs.size(); ++p) {
        const int later = std::max(sub.pairs[p].a, sub.pairs[p].b);
        const int earlier = std::min(sub.pairs[p].a, sub.pairs[p].b);
        back[static_cast<std::size_t>(later)].emplace_back(earlier, static_cast<int>(p));
    }
    auto pair_cost = [&](int p, int later, Label earlier_label, Label later_label) {
        const PairTerm& term = sub.pairs[static_cast<std::size_t>(p)];
        const Label ua = term.a == later ? later_label : earlier_label;
        const Label ub = term.a == later ? earlier_label : later_label;
        return term.weight * sub.pair_table(ua - ub);
    };
    detail::Odometer odo(std::move(domains), sub.unary, std::move(back), pair_cost);
    OracleResult result;
    result.labels = odo.run();
    result.energy = sub.evaluate(result.labels);
    return result;
}

/// Exact minimum of the true energy when node i may only take the labels in
/// choices[i] (a single entry freezes it). Verifies binary moves such as
/// expansion and swap.
inline OracleResult exact_choice_minimum(const EnergyModel& model,
                                         const std::vector<std::vector<Label>>& choices,
                                         PriorMode mode = PriorMode::G,
                                         const OracleBudget& budget = {}) {
    const int n = model.node_count();
    detail::require(choices.size() == static_cast<std::size_t>(n),
                    "exact_choice_minimum: one choice list per node required");
    std::vector<int> sizes;
    for (const auto& c : choices) {
        detail::require(!c.empty(), "exact_choice_minimum: empty choice list");
        for (Label l : c) detail::require(model.labels().contains(l), "exact_choice_minimum: bad label");
        sizes.push_back(static_cast<int>(c.size()));
    }
    detail::check_budget(sizes, budget);

    std::vector<std::vector<double>> unary(static_cast<std::size_t>(n));
    std::vector<std::vector<std::pair<int, int>>> back(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (Label l : choices[static_cast<std::size_t>(i)]) unary[static_cast<std::size_t>(i)].push_back(model.unary()(i, l));
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e)
        back[static_cast<std::size_t>(std::max(edges[e].u, edges[e].v))].emplace_back(
            std::min(edges[e].u, edges[e].v), static_cast<int>(e));
    const auto& table = model.prior().table(mode);
    auto pair_cost = [&](int e, int later, Label earlier_label, Label later_label) {
        const Edge& edge = edges[static_cast<std::size_t>(e)];
        const Label xu = edge.u == later ? later_label : earlier_label;
        const Label xv = edge.u == later ? earlier_label : later_label;
        return model.weight(static_cast<std::size_t>(e)) * table(xu - xv);
    };
    detail::Odometer odo(choices, std::move(unary), std::move(back), pair_cost);
    OracleResult result;
    result.labels = odo.run();
    result.energy = evaluate_energy(model, result.labels, mode);
    return result;
}

} // namespace rangemove

#endif // RANGEMOVE_ORACLE_HPP
