#ifndef RANGEMOVE_MOVES_HPP
#define RANGEMOVE_MOVES_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rangemove/binary_cut.hpp"
#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/ishikawa.hpp"
#include "rangemove/maxflow.hpp"

namespace rangemove {

enum class SolverKind {
    AlphaExpansion,
    AlphaBetaSwap,
    RangeSwap,
    RangeSwapExtended,
    GSwap,
    GSwapFull,
};

inline constexpr SolverKind kAllSolvers[] = {
    SolverKind::AlphaExpansion, SolverKind::AlphaBetaSwap, SolverKind::RangeSwap,
    SolverKind::RangeSwapExtended, SolverKind::GSwap, SolverKind::GSwapFull,
};

inline std::string_view solver_name(SolverKind kind) {
    switch (kind) {
    case SolverKind::AlphaExpansion: return "alpha_exp";
    case SolverKind::AlphaBetaSwap: return "ab_swap";
    case SolverKind::RangeSwap: return "rswap";
    case SolverKind::RangeSwapExtended: return "rswape";
    case SolverKind::GSwap: return "gswap";
    case SolverKind::GSwapFull: return "gswapf";
    }
    return "?";
}

inline std::optional<SolverKind> parse_solver(std::string_view name) {
    for (SolverKind k : kAllSolvers)
        if (solver_name(k) == name) return k;
    if (name == "alpha_expansion") return SolverKind::AlphaExpansion;
    return std::nullopt;
}

enum class RangeVariant { Standard, Extended };

enum class ActiveStrategy {
    Alternating,    ///< omit the larger (even t) / smaller (odd t) end of each violating edge
    RangeAnchored,  ///< prefer omitting the end whose label lies outside [alpha, beta]
};

/// One iteration's choice function: who is active, over which labels, and
/// how each edge enters the reduced problem.
struct MovePlan {
    std::vector<char> active;
    std::vector<LabelInterval> intervals;  ///< per node; frozen nodes hold [x_i, x_i]
    std::vector<EdgeRole> roles;
    PriorMode pair_mode = PriorMode::H;
    int parity = 0;
    std::optional<std::pair<Label, Label>> range;
    int epsilon = 0;

    std::size_t active_count() const {
        return static_cast<std::size_t>(std::count(active.begin(), active.end(), char{1}));
    }
};

/// True iff every edge with both ends active has |x_u - x_v| <= T.
inline bool satisfies_active_condition(const Labeling& x, const GraphTopology& topology,
                                       int truncation, const std::vector<char>& active) {
    for (const Edge& e : topology.edges()) {
        const auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
        if (active[u] && active[v] && std::abs(x[u] - x[v]) > truncation) return false;
    }
    return true;
}

/// Active set for a generalized range move. Edges are scanned in canonical
/// order; an edge whose labels differ by more than T loses one endpoint
/// unless an earlier edge already removed one of them.
inline std::vector<char> gswap_select_active(const Labeling& x, const GraphTopology& topology,
                                             int truncation, int parity,
                                             ActiveStrategy strategy = ActiveStrategy::Alternating,
                                             Label alpha = 0, Label beta = 0) {
    detail::require(x.size() == static_cast<std::size_t>(topology.node_count()),
                    "gswap_select_active: labeling size mismatch");
    std::vector<char> active(x.size(), 1);
    const bool even = parity % 2 == 0;
    for (const Edge& e : topology.edges()) {
        const auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
        if (std::abs(x[u] - x[v]) <= truncation) continue;
        if (!active[u] || !active[v]) continue;
        const std::size_t larger = x[u] > x[v] ? u : v;
        const std::size_t smaller = larger == u ? v : u;
        std::size_t omit = even ? larger : smaller;
        if (strategy == ActiveStrategy::RangeAnchored) {
            const bool u_in = x[u] >= alpha && x[u] <= beta;
            const bool v_in = x[v] >= alpha && x[v] <= beta;
            if (u_in != v_in) omit = u_in ? v : u;
        }
        active[omit] = 0;
    }
    return active;
}

inline MovePlan plan_range_swap(const EnergyModel& model, const Labeling& x, Label alpha, Label beta,
                                RangeVariant variant, int epsilon = 2) {
    const int l = model.label_count();
    detail::require(alpha >= 0 && beta < l, "range move: labels outside the label set");
    detail::require(beta - alpha > 0 && beta - alpha <= model.prior().truncation(),
                    "range move: requires 0 < beta - alpha <= T");
    detail::require(epsilon >= 0, "range move: epsilon must be >= 0");
    MovePlan plan;
    plan.range = {alpha, beta};
    plan.epsilon = variant == RangeVariant::Extended ? epsilon : 0;
    plan.pair_mode = variant == RangeVariant::Extended ? PriorMode::H : PriorMode::G;
    const LabelInterval candidates =
        variant == RangeVariant::Extended
            ? LabelInterval{std::max(0, alpha - epsilon), std::min(l - 1, beta + epsilon)}
            : LabelInterval{alpha, beta};
    plan.active.resize(x.size());
    plan.intervals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool in = x[i] >= alpha && x[i] <= beta;
        plan.active[i] = in ? 1 : 0;
        plan.intervals[i] = in ? candidates : LabelInterval{x[i], x[i]};
    }
    plan.roles = classify_edges(model.topology(), plan.active);
    return plan;
}

inline MovePlan plan_gswap(const EnergyModel& model, const Labeling& x, int parity,
                           ActiveStrategy strategy = ActiveStrategy::Alternating, Label alpha = 0,
                           Label beta = 0) {
    const int t = model.prior().truncation();
    MovePlan plan;
    plan.parity = parity;
    plan.active = gswap_select_active(x, model.topology(), t, parity, strategy, alpha, beta);
    if (!satisfies_active_condition(x, model.topology(), t, plan.active))
        throw std::logic_error("plan_gswap: active set violates the threshold condition");
    if (strategy == ActiveStrategy::RangeAnchored) plan.range = {alpha, beta};
    plan.intervals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        plan.intervals[i] = plan.active[i] ? LabelInterval{0, model.label_count() - 1}
                                           : LabelInterval{x[i], x[i]};
    plan.roles = classify_edges(model.topology(), plan.active);
    return plan;
}

/// Every node active over the full label set; edges whose labels are more
/// than T apart are frozen at their current cost.
inline MovePlan plan_gswapf(const EnergyModel& model, const Labeling& x) {
    const int t = model.prior().truncation();
    MovePlan plan;
    plan.active.assign(x.size(), 1);
    plan.intervals.assign(x.size(), LabelInterval{0, model.label_count() - 1});
    plan.roles.resize(model.topology().edge_count());
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int d = x[static_cast<std::size_t>(edges[e].u)] - x[static_cast<std::size_t>(edges[e].v)];
        plan.roles[e] = std::abs(d) > t ? EdgeRole::Dropped : EdgeRole::ActiveActive;
    }
    return plan;
}

struct MoveOutcome {
    Labeling labeling;
    SubProblem subproblem;
    ExactSolution solution;
};

/// Builds the reduced problem for `plan`, solves it exactly and maps the
/// result back to a full labeling.
inline MoveOutcome execute_plan(const EnergyModel& model, const Labeling& x, const MovePlan& plan,
                                MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::BoykovKolmogorov) {
    MoveOutcome out;
    out.subproblem = build_subproblem(model, x, plan.active, plan.intervals, plan.roles, plan.pair_mode);
    out.solution = solve_exact(out.subproblem, algorithm);
    out.labeling = out.subproblem.expand(x, out.solution.labels);
    return out;
}

inline Labeling range_swap_move(const EnergyModel& model, const Labeling& x, Label alpha, Label beta,
                                RangeVariant variant, int epsilon = 2) {
    return execute_plan(model, x, plan_range_swap(model, x, alpha, beta, variant, epsilon)).labeling;
}

inline Labeling gswap_move(const EnergyModel& model, const Labeling& x, int parity) {
    return execute_plan(model, x, plan_gswap(model, x, parity)).labeling;
}

inline void check_solver_supported(const Prior& prior, SolverKind solver) {
    if (solver == SolverKind::GSwapFull && !prior.is_truncated_flat())
        throw SolverRefused(
            "gswapf requires a truncated convex prior that is constant beyond T; the '" +
            std::string(prior_kind_name(prior.kind())) +
            "' prior keeps changing past T, so freezing far-apart edges could increase the energy");
}

inline Labeling gswapf_move(const EnergyModel& model, const Labeling& x) {
    check_solver_supported(model.prior(), SolverKind::GSwapFull);
    return execute_plan(model, x, plan_gswapf(model, x)).labeling;
}

struct BinaryMoveResult {
    Labeling labeling;               ///< proposal if accepted, else the input
    Labeling proposal;               ///< minimum-cut labeling
    double proposal_energy = 0.0;    ///< binary move energy at the proposal (after repairs)
    std::size_t repaired_edges = 0;  ///< pairwise tables that were not submodular
    bool accepted = false;           ///< true energy strictly decreased
};

/// Every node either keeps its label or switches to alpha.
inline BinaryMoveResult alpha_expansion_move(const EnergyModel& model, const Labeling& x, Label alpha,
                                             MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::BoykovKolmogorov) {
    validate_labeling(model, x);
    detail::require(model.labels().contains(alpha), "alpha_expansion_move: alpha outside the label set");
    const int n = model.node_count();
    const Prior& prior = model.prior();
    BinaryCutProblem problem(n);
    for (int i = 0; i < n; ++i)
        problem.add_unary(i, model.unary()(i, x[static_cast<std::size_t>(i)]), model.unary()(i, alpha));
    BinaryMoveResult result;
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double w = model.weight(e);
        if (w == 0.0) continue;
        const Label xu = x[static_cast<std::size_t>(edges[e].u)], xv = x[static_cast<std::size_t>(edges[e].v)];
        if (problem.add_pairwise(edges[e].u, edges[e].v, w * prior.g(xu - xv), w * prior.g(xu - alpha),
                                 w * prior.g(alpha - xv), w * prior.g(0)))
            ++result.repaired_edges;
    }
    const auto sol = problem.solve(algorithm);
    result.proposal = x;
    for (int i = 0; i < n; ++i)
        if (sol.values[static_cast<std::size_t>(i)]) result.proposal[static_cast<std::size_t>(i)] = alpha;
    result.proposal_energy = sol.energy;
    result.accepted = evaluate_energy(model, result.proposal) < evaluate_energy(model, x);
    result.labeling = result.accepted ? result.proposal : x;
    return result;
}

/// Nodes labeled alpha or beta may exchange between the two labels.
inline BinaryMoveResult alphabeta_swap_move(const EnergyModel& model, const Labeling& x, Label alpha,
                                            Label beta,
                                            MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::BoykovKolmogorov) {
    validate_labeling(model, x);
    detail::require(alpha != beta, "alphabeta_swap_move: alpha == beta");
    detail::require(model.labels().contains(alpha) && model.labels().contains(beta),
                    "alphabeta_swap_move: label outside the label set");
    const auto n = static_cast<std::size_t>(model.node_count());
    std::vector<int> local(n, -1);
    std::vector<NodeId> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == alpha || x[i] == beta) {
            local[i] = static_cast<int>(nodes.size());
            nodes.push_back(static_cast<NodeId>(i));
        }
    }
    BinaryMoveResult result;
    result.proposal = x;
    result.labeling = x;
    if (nodes.empty()) return result;

    const Prior& prior = model.prior();
    std::vector<double> cost_alpha(nodes.size()), cost_beta(nodes.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        cost_alpha[a] = model.unary()(nodes[a], alpha);
        cost_beta[a] = model.unary()(nodes[a], beta);
    }
    BinaryCutProblem problem(static_cast<int>(nodes.size()));
    const auto& edges = model.topology().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double w = model.weight(e);
        const auto u = static_cast<std::size_t>(edges[e].u), v = static_cast<std::size_t>(edges[e].v);
        const int lu = local[u], lv = local[v];
        if (lu >= 0 && lv >= 0) {
            if (w == 0.0) continue;
            if (problem.add_pairwise(lu, lv, w * prior.g(alpha - alpha), w * prior.g(alpha - beta),
                                     w * prior.g(beta - alpha), w * prior.g(beta - beta)))
                ++result.repaired_edges;
        } else if (lu >= 0) {
            cost_alpha[static_cast<std::size_t>(lu)] += w * prior.g(alpha - x[v]);
            cost_beta[static_cast<std::size_t>(lu)] += w * prior.g(beta - x[v]);
        } else if (lv >= 0) {
            cost_alpha[static_cast<std::size_t>(lv)] += w * prior.g(x[u] - alpha);
            cost_beta[static_cast<std::size_t>(lv)] += w * prior.g(x[u] - beta);
        }
    }
    for (std::size_t a = 0; a < nodes.size(); ++a)
        problem.add_unary(static_cast<int>(a), cost_alpha[a], cost_beta[a]);
    const auto sol = problem.solve(algorithm);
    for (std::size_t a = 0; a < nodes.size(); ++a)
        result.proposal[static_cast<std::size_t>(nodes[a])] = sol.values[a] ? beta : alpha;
    result.proposal_energy = sol.energy;
    result.accepted = evaluate_energy(model, result.proposal) < evaluate_energy(model, x);
    result.labeling = result.accepted ? result.proposal : x;
    return result;
}

struct TraceRow {
    std::size_t iteration = 0;
    double energy_g = 0.0;
    double energy_h = 0.0;
    double changed_fraction = 0.0;
    std::size_t active_count = 0;
    double ms = 0.0;  ///< elapsed since the start of the run
};

struct SolveTrace {
    SolverKind solver = SolverKind::GSwap;
    std::vector<TraceRow> rows;  ///< rows[0] is the initial labeling
    Labeling labeling;
    std::size_t sweeps = 0;
    std::size_t repaired_edges = 0;
    bool converged = false;

    double final_energy() const { return rows.back().energy_g; }
    std::size_t iterations() const { return rows.size() - 1; }
};

/// Passed to SolverOptions::observer after every move. plan and subproblem
/// are null for the binary (expansion / swap) moves.
struct MoveEvent {
    SolverKind solver;
    std::size_t iteration;
    const Labeling& before;
    const Labeling& after;
    const MovePlan* plan;
    const SubProblem* subproblem;
};

struct SolverOptions {
    double tol = 1e-6;
    int epsilon = 2;
    std::size_t max_sweeps = 1000;
    MaxFlowAlgorithm flow_algorithm = MaxFlowAlgorithm::BoykovKolmogorov;
    bool record_timing = true;
    std::function<void(const MoveEvent&)> observer;
};

/// Runs a move-making solver from `init` until a full sweep no longer lowers
/// E^g by more than options.tol. For the generalized moves a sweep is one
/// iteration; GSwap stops after two quiet iterations in a row so that both
/// parities have been tried.
inline SolveTrace run(const EnergyModel& model, SolverKind solver, const Labeling& init,
                      const SolverOptions& options = {}) {
    validate_labeling(model, init);
    check_solver_supported(model.prior(), solver);
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto elapsed_ms = [&] {
        if (!options.record_timing) return 0.0;
        return std::chrono::duration<double, std::milli>(clock::now() - start).count();
    };

    SolveTrace trace;
    trace.solver = solver;
    Labeling x = init;
    double energy = evaluate_energy(model, x);
    trace.rows.push_back({0, energy, evaluate_energy(model, x, PriorMode::H), 0.0, 0, elapsed_ms()});
    const auto n = static_cast<double>(model.node_count());

    auto commit = [&](Labeling next, std::size_t active, const MovePlan* plan, const SubProblem* sub) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < x.size(); ++i) changed += x[i] != next[i] ? 1 : 0;
        const std::size_t iteration = trace.rows.size();
        if (options.observer) options.observer(MoveEvent{solver, iteration, x, next, plan, sub});
        x = std::move(next);
        energy = evaluate_energy(model, x);
        trace.rows.push_back({iteration, energy, evaluate_energy(model, x, PriorMode::H),
                              static_cast<double>(changed) / n, active, elapsed_ms()});
    };

    auto run_plan = [&](const MovePlan& plan) {
        const std::size_t active = plan.active_count();
        if (active == 0) return;
        MoveOutcome out = execute_plan(model, x, plan, options.flow_algorithm);
        commit(std::move(out.labeling), active, &plan, &out.subproblem);
    };

    auto run_binary = [&](const BinaryMoveResult& r, std::size_t active) {
        trace.repaired_edges += r.repaired_edges;
        commit(r.labeling, active, nullptr, nullptr);
    };

    const int l = model.label_count();
    const int t = model.prior().truncation();
    while (trace.sweeps < options.max_sweeps) {
        const double sweep_start = energy;
        ++trace.sweeps;
        switch (solver) {
        case SolverKind::AlphaExpansion:
            for (Label alpha = 0; alpha < l; ++alpha)
                run_binary(alpha_expansion_move(model, x, alpha, options.flow_algorithm), x.size());
            break;
        case SolverKind::AlphaBetaSwap:
            for (Label alpha = 0; alpha < l; ++alpha) {
                for (Label beta = alpha + 1; beta < l; ++beta) {
                    const auto active = static_cast<std::size_t>(std::count_if(
                        x.begin(), x.end(), [&](Label v) { return v == alpha || v == beta; }));
                    if (active == 0) continue;
                    run_binary(alphabeta_swap_move(model, x, alpha, beta, options.flow_algorithm), active);
                }
            }
            break;
        case SolverKind::RangeSwap:
        case SolverKind::RangeSwapExtended: {
            const auto variant = solver == SolverKind::RangeSwap ? RangeVariant::Standard : RangeVariant::Extended;
            for (Label alpha = 0; alpha < l; ++alpha)
                for (Label beta = alpha + 1; beta < l && beta - alpha <= t; ++beta)
                    run_plan(plan_range_swap(model, x, alpha, beta, variant, options.epsilon));
            break;
        }
        case SolverKind::GSwap:
            run_plan(plan_gswap(model, x, static_cast<int>((trace.sweeps - 1) % 2)));
            break;
        case SolverKind::GSwapFull:
            run_plan(plan_gswapf(model, x));
            break;
        }

        const bool quiet = sweep_start - energy <= options.tol;
        if (solver == SolverKind::GSwap) {
            // Needs a quiet iteration at each parity.
            const std::size_t rows = trace.rows.size();
            const bool previous_quiet =
                rows >= 3 && trace.rows[rows - 3].energy_g - trace.rows[rows - 2].energy_g <= options.tol;
            if (quiet && previous_quiet) {
                trace.converged = true;
                break;
            }
        } else if (quiet) {
            trace.converged = true;
            break;
        }
    }
    trace.labeling = x;
    return trace;
}

/// CSV with header iteration,E_g,E_h,changed_fraction,active_count,ms.
inline void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
    out << "iteration,E_g,E_h,changed_fraction,active_count,ms\n";
    char buf[256];
    for (const TraceRow& r : trace.rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%zu,%.3f\n", r.iteration, r.energy_g, r.energy_h,
                      r.changed_fraction, r.active_count, r.ms);
        out << buf;
    }
}

} // namespace rangemove

#endif // RANGEMOVE_MOVES_HPP
