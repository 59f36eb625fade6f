// rangemove: run move-making MRF solvers on instance files, stereo pairs or
// synthetic models.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rangemove/rangemove.hpp"

namespace {

using namespace rangemove;

struct InputOptions {
    std::string instance;
    std::vector<std::string> pair;
    std::string synthetic;
    std::string preset;
    std::string prior;
    int trunc = 0;
    int labels = 0;
    double weight = -1.0;
    std::optional<std::uint64_t> seed;
};

struct RunOptions {
    std::string init = "zeros";
    std::string init_file;
    std::string init_from;
    double tol = 1e-6;
    int epsilon = 2;
    std::size_t max_sweeps = 1000;
    std::string flow = "bk";
    bool no_timing = false;
};

/// The model plus what is needed to write a disparity map.
struct LoadedInput {
    std::optional<EnergyModel> model;
    std::optional<GridShape> grid;
};

void add_input_options(CLI::App* app, InputOptions& in) {
    auto* inst = app->add_option("--instance", in.instance, "Instance file");
    auto* pair = app->add_option("--pair", in.pair, "Left and right images (PGM/PPM)")->expected(2);
    auto* syn = app->add_option("--synthetic", in.synthetic, "Synthetic spec, e.g. grid:w=20,h=20,l=16,seed=1");
    inst->excludes(pair)->excludes(syn);
    pair->excludes(syn);
    app->add_option("--preset", in.preset, "Stereo parameters: map, venus, sawtooth, teddy, cones, kitti");
    app->add_option("--prior", in.prior, "Prior: tl, tq or cauchy");
    app->add_option("--trunc", in.trunc, "Truncation T")->check(CLI::PositiveNumber);
    app->add_option("--labels", in.labels, "Disparity count for --pair")->check(CLI::Range(2, 1 << 20));
    app->add_option("--weight", in.weight, "Constant edge weight for --pair")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", in.seed, "Seed for --synthetic (overrides the spec)");
}

void add_run_options(CLI::App* app, RunOptions& run) {
    app->add_option("--init", run.init, "Initial labeling: zeros or file")->check(CLI::IsMember({"zeros", "file"}));
    app->add_option("--init-file", run.init_file, "Labeling file for --init file");
    app->add_option("--init-from", run.init_from, "Start from the result of another solver");
    app->add_option("--tol", run.tol, "Stop when a sweep lowers the energy by at most this")->check(CLI::NonNegativeNumber);
    app->add_option("--epsilon", run.epsilon, "Label margin of the extended range swap")->check(CLI::NonNegativeNumber);
    app->add_option("--max-sweeps", run.max_sweeps, "Sweep limit");
    app->add_option("--flow", run.flow, "Max-flow algorithm: bk or sap")->check(CLI::IsMember({"bk", "sap"}));
    app->add_flag("--no-timing", run.no_timing, "Write zero times so output is byte-identical across runs");
}

PriorKind prior_from(const std::string& name) {
    const auto kind = parse_prior_kind(name);
    if (!kind || *kind == PriorKind::TabulatedConvexPart)
        throw CLI::ValidationError("--prior", "expected tl, tq or cauchy, got '" + name + "'");
    return *kind;
}

LoadedInput load_input(const InputOptions& in) {
    LoadedInput out;
    if (!in.instance.empty()) {
        EnergyModel m = load_instance(in.instance);
        if (!in.prior.empty() || in.trunc > 0) {
            const PriorKind kind = in.prior.empty() ? m.prior().kind() : prior_from(in.prior);
            const int t = in.trunc > 0 ? in.trunc : m.prior().truncation();
            m = m.with_prior(make_prior(kind, t, m.label_count()));
        }
        out.grid = m.topology().grid();
        out.model.emplace(std::move(m));
    } else if (!in.pair.empty()) {
        StereoParams params;
        if (!in.preset.empty()) {
            const auto preset = stereo_preset(in.preset);
            if (!preset) throw CLI::ValidationError("--preset", "unknown preset '" + in.preset + "'");
            params = *preset;
        }
        if (!in.prior.empty()) params.prior = prior_from(in.prior);
        if (in.trunc > 0) params.truncation = in.trunc;
        if (in.labels > 0) params.label_count = in.labels;
        if (in.weight >= 0) params.weight = WeightRule::constant(in.weight);
        ImagePair pair{load_pnm(in.pair[0]), load_pnm(in.pair[1])};
        out.grid = GridShape{pair.left.width, pair.left.height};
        out.model.emplace(build_stereo_model(pair, params));
    } else if (!in.synthetic.empty()) {
        SyntheticSpec spec = parse_synthetic_spec(in.synthetic);
        if (!in.prior.empty()) spec.prior = prior_from(in.prior);
        if (in.trunc > 0) spec.truncation = in.trunc;
        if (in.seed) spec.seed = *in.seed;
        EnergyModel m = make_synthetic(spec);
        out.grid = m.topology().grid();
        out.model.emplace(std::move(m));
    } else {
        throw CLI::ValidationError("input", "one of --instance, --pair or --synthetic is required");
    }
    return out;
}

SolverKind solver_from(const std::string& name) {
    const auto s = parse_solver(name);
    if (!s)
        throw CLI::ValidationError("--solver",
                                   "unknown solver '" + name + "' (alpha_exp, ab_swap, rswap, rswape, gswap, gswapf)");
    return *s;
}

SolverOptions solver_options(const RunOptions& run) {
    SolverOptions opt;
    opt.tol = run.tol;
    opt.epsilon = run.epsilon;
    opt.max_sweeps = run.max_sweeps;
    opt.record_timing = !run.no_timing;
    opt.flow_algorithm = run.flow == "sap" ? MaxFlowAlgorithm::ShortestAugmentingPath : MaxFlowAlgorithm::BoykovKolmogorov;
    return opt;
}

Labeling initial_labeling(const EnergyModel& m, const RunOptions& run) {
    Labeling x(static_cast<std::size_t>(m.node_count()), 0);
    if (run.init == "file") {
        if (run.init_file.empty()) throw CLI::ValidationError("--init-file", "required with --init file");
        std::ifstream f(run.init_file);
        if (!f) throw ParseError("cannot open labeling file '" + run.init_file + "'");
        x = read_labeling(f, m);
    }
    if (!run.init_from.empty()) x = rangemove::run(m, solver_from(run.init_from), x, solver_options(run)).labeling;
    return x;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + path + "'");
    return f;
}

int cmd_solve(const InputOptions& in, const RunOptions& run, const std::string& solver_name,
              const std::string& trace_path, const std::string& disparity_path, const std::string& labels_path) {
    const SolverKind solver = solver_from(solver_name);
    LoadedInput input = load_input(in);
    const EnergyModel& m = *input.model;
    check_solver_supported(m.prior(), solver);
    const auto start = std::chrono::steady_clock::now();
    const Labeling init = initial_labeling(m, run);
    const SolveTrace trace = rangemove::run(m, solver, init, solver_options(run));
    const double ms =
        run.no_timing ? 0.0 : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (!trace_path.empty()) {
        auto f = open_output(trace_path);
        write_trace_csv(f, trace);
    }
    if (!labels_path.empty()) {
        auto f = open_output(labels_path);
        for (std::size_t i = 0; i < trace.labeling.size(); ++i) f << trace.labeling[i] << (i + 1 < trace.labeling.size() ? ' ' : '\n');
    }
    if (!disparity_path.empty()) {
        if (!input.grid) throw CLI::ValidationError("--disparity", "input has no grid shape");
        auto f = open_output(disparity_path);
        write_pgm(f, disparity_image(trace.labeling, input.grid->width, input.grid->height, m.label_count()));
    }
    std::printf("E_g=%.6f time_ms=%lld iters=%zu\n", trace.final_energy(), static_cast<long long>(ms),
                trace.iterations());
    return 0;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_compare(const InputOptions& in, const RunOptions& run, const std::string& solvers_text,
                const std::string& out_path) {
    const auto names = split_list(solvers_text);
    if (names.empty()) throw CLI::ValidationError("--solvers", "no solvers given");
    std::vector<SolverKind> solvers;
    for (const auto& n : names) solvers.push_back(solver_from(n));
    LoadedInput input = load_input(in);
    const EnergyModel& m = *input.model;
    const Labeling init = initial_labeling(m, run);

    std::vector<SolveTrace> traces;
    for (SolverKind s : solvers) {
        if (!m.prior().is_truncated_flat() && s == SolverKind::GSwapFull) {
            std::fprintf(stderr, "skipping gswapf: prior '%s' is not constant beyond T\n",
                         std::string(prior_kind_name(m.prior().kind())).c_str());
            continue;
        }
        traces.push_back(rangemove::run(m, s, init, solver_options(run)));
    }

    std::ostringstream csv;
    csv << "row";
    for (const auto& t : traces) csv << ',' << solver_name(t.solver) << "_ms," << solver_name(t.solver) << "_E_g";
    csv << '\n';
    std::size_t rows = 0;
    for (const auto& t : traces) rows = std::max(rows, t.rows.size());
    char buf[64];
    for (std::size_t r = 0; r < rows; ++r) {
        csv << r;
        for (const auto& t : traces) {
            if (r < t.rows.size()) {
                std::snprintf(buf, sizeof buf, ",%.3f,%.6f", t.rows[r].ms, t.rows[r].energy_g);
                csv << buf;
            } else {
                csv << ",,";
            }
        }
        csv << '\n';
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        auto f = open_output(out_path);
        f << csv.str();
    }
    for (const auto& t : traces)
        std::fprintf(stderr, "%s E_g=%.6f iters=%zu\n", std::string(solver_name(t.solver)).c_str(), t.final_energy(),
                     t.iterations());
    return 0;
}

int cmd_build(const InputOptions& in, const std::string& out_path, const std::string& dimacs_path) {
    LoadedInput input = load_input(in);
    const EnergyModel& m = *input.model;
    if (!out_path.empty()) save_instance(out_path, m);
    if (!dimacs_path.empty()) {
        const auto n = static_cast<std::size_t>(m.node_count());
        const SubProblem sub = build_subproblem(m, Labeling(n, 0), std::vector<char>(n, 1),
                                                std::vector<LabelInterval>(n, LabelInterval{0, m.label_count() - 1}));
        const LayeredGraph g = build_layered_graph(sub);
        auto f = open_output(dimacs_path);
        f << "c layered graph of E^h over the full label set, constant " << g.constant << '\n';
        write_dimacs(f, g.network);
    }
    std::printf("nodes=%d labels=%d edges=%zu prior=%s T=%d\n", m.node_count(), m.label_count(),
                m.topology().edge_count(), std::string(prior_kind_name(m.prior().kind())).c_str(),
                m.prior().truncation());
    return 0;
}

int cmd_energy(const InputOptions& in, const std::string& labels_path) {
    LoadedInput input = load_input(in);
    const EnergyModel& m = *input.model;
    std::ifstream f(labels_path);
    if (!f) throw ParseError("cannot open labeling file '" + labels_path + "'");
    const Labeling x = read_labeling(f, m);
    std::printf("E_g=%.6f E_h=%.6f\n", evaluate_energy(m, x), evaluate_energy(m, x, PriorMode::H));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Move-making solvers for multi-label MRF energies"};
    app.require_subcommand(1);

    InputOptions in;
    RunOptions run;

    std::string solver = "gswap", trace_path, disparity_path, labels_path;
    auto* solve = app.add_subcommand("solve", "Run one solver and print the final energy");
    add_input_options(solve, in);
    add_run_options(solve, run);
    solve->add_option("--solver", solver, "alpha_exp, ab_swap, rswap, rswape, gswap or gswapf");
    solve->add_option("--trace", trace_path, "Write the per-move trace CSV here");
    solve->add_option("--disparity", disparity_path, "Write the labeling as a PGM image here");
    solve->add_option("--labels-out", labels_path, "Write the final labeling here");

    std::string solvers = "alpha_exp,ab_swap,rswap,rswape,gswap,gswapf", compare_out;
    auto* compare = app.add_subcommand("compare", "Run several solvers from the same start; wide CSV of E_g");
    add_input_options(compare, in);
    add_run_options(compare, run);
    compare->add_option("--solvers", solvers, "Comma-separated solver names");
    compare->add_option("--out", compare_out, "CSV path (default stdout)");

    std::string build_out, dimacs_out;
    auto* build = app.add_subcommand("build", "Write the model as an instance file");
    add_input_options(build, in);
    build->add_option("--out", build_out, "Instance file to write");
    build->add_option("--dimacs", dimacs_out, "Also dump the layered graph of the full problem in DIMACS form");

    std::string energy_labels;
    auto* energy = app.add_subcommand("energy", "Evaluate a labeling");
    add_input_options(energy, in);
    energy->add_option("--labeling", energy_labels, "Labeling file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*solve) return cmd_solve(in, run, solver, trace_path, disparity_path, labels_path);
        if (*compare) return cmd_compare(in, run, solvers, compare_out);
        if (*build) return cmd_build(in, build_out, dimacs_out);
        if (*energy) return cmd_energy(in, energy_labels);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
