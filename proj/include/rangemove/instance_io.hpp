#ifndef RANGEMOVE_INSTANCE_IO_HPP
#define RANGEMOVE_INSTANCE_IO_HPP

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/prior.hpp"

// Instance file, version 1. Line oriented; '#' starts a comment.
//
//   rangemove-instance 1
//   nodes <N> labels <L>
//   prior <tl|tq|cauchy|table> <T>
//   table <g(-(L-1))> ... <g(L-1)>      only for prior table
//   grid <W> <H>                        optional, requires N = W*H
//   unary
//   <L costs for node 0>
//   ...
//   <L costs for node N-1>
//   edges <M>
//   <u> <v> <w>                         M lines, pairwise term w * f(x_u - x_v)
//   end

namespace rangemove {

inline constexpr int kInstanceFormatVersion = 1;

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty line with comments stripped, as a token stream.
    std::istringstream next(const char* what) {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            return std::istringstream(line);
        }
        fail(std::string("unexpected end of input, expected ") + what);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("instance line " + std::to_string(number_) + ": " + msg);
    }

    void expect_keyword(std::istringstream& line, const std::string& keyword) const {
        std::string word;
        if (!(line >> word) || word != keyword) fail("expected '" + keyword + "'");
    }

    template <class T>
    T read(std::istringstream& line, const char* what) const {
        T value{};
        if (!(line >> value)) fail(std::string("expected ") + what);
        return value;
    }

    void expect_end(std::istringstream& line) const {
        std::string rest;
        if (line >> rest) fail("trailing token '" + rest + "'");
    }

private:
    std::istream& in_;
    int number_ = 0;
};

inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline EnergyModel read_instance(std::istream& in) {
    detail::LineReader reader(in);
    auto line = reader.next("header");
    reader.expect_keyword(line, "rangemove-instance");
    const int version = reader.read<int>(line, "format version");
    if (version != kInstanceFormatVersion)
        reader.fail("unsupported format version " + std::to_string(version));

    line = reader.next("nodes line");
    reader.expect_keyword(line, "nodes");
    const int n = reader.read<int>(line, "node count");
    reader.expect_keyword(line, "labels");
    const int l = reader.read<int>(line, "label count");
    reader.expect_end(line);
    if (n < 1) reader.fail("node count must be >= 1");
    if (l < 2) reader.fail("label count must be >= 2");

    line = reader.next("prior line");
    reader.expect_keyword(line, "prior");
    const auto kind_name = reader.read<std::string>(line, "prior name");
    const int t = reader.read<int>(line, "truncation");
    reader.expect_end(line);
    const auto kind = parse_prior_kind(kind_name);
    if (!kind) reader.fail("unknown prior '" + kind_name + "'");

    std::optional<Prior> prior;
    try {
        if (*kind == PriorKind::TabulatedConvexPart) {
            line = reader.next("table line");
            reader.expect_keyword(line, "table");
            std::vector<double> values(static_cast<std::size_t>(2 * l - 1));
            for (double& v : values) v = reader.read<double>(line, "table value");
            reader.expect_end(line);
            prior = make_tabulated_prior(std::move(values), t, l);
        } else {
            prior = make_prior(*kind, t, l);
        }
    } catch (const ContractViolation& e) {
        reader.fail(e.what());
    }

    line = reader.next("grid or unary");
    std::string word = reader.read<std::string>(line, "keyword");
    std::optional<GridShape> grid;
    if (word == "grid") {
        GridShape shape;
        shape.width = reader.read<int>(line, "grid width");
        shape.height = reader.read<int>(line, "grid height");
        reader.expect_end(line);
        if (shape.width < 1 || shape.height < 1 || shape.width * shape.height != n)
            reader.fail("grid dimensions do not match node count");
        grid = shape;
        line = reader.next("unary");
        word = reader.read<std::string>(line, "keyword");
    }
    if (word != "unary") reader.fail("expected 'unary'");
    reader.expect_end(line);

    std::vector<double> costs;
    costs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(l));
    for (int i = 0; i < n; ++i) {
        line = reader.next("unary row");
        for (int a = 0; a < l; ++a) costs.push_back(reader.read<double>(line, "unary cost"));
        reader.expect_end(line);
    }

    line = reader.next("edges line");
    reader.expect_keyword(line, "edges");
    const int m = reader.read<int>(line, "edge count");
    reader.expect_end(line);
    if (m < 0) reader.fail("negative edge count");
    std::vector<Edge> edges;
    std::vector<double> weights;
    for (int k = 0; k < m; ++k) {
        line = reader.next("edge");
        Edge e;
        e.u = reader.read<int>(line, "edge endpoint");
        e.v = reader.read<int>(line, "edge endpoint");
        const double w = reader.read<double>(line, "edge weight");
        reader.expect_end(line);
        edges.push_back(e);
        weights.push_back(w);
    }
    line = reader.next("end");
    reader.expect_keyword(line, "end");

    try {
        GraphTopology topology(n, std::move(edges), grid);
        std::vector<double> canonical(weights.size());
        for (std::size_t k = 0; k < canonical.size(); ++k) canonical[k] = weights[topology.input_order()[k]];
        return EnergyModel(std::move(topology), UnaryTable(n, l, std::move(costs)), std::move(*prior),
                           std::move(canonical));
    } catch (const ContractViolation& e) {
        reader.fail(e.what());
    }
}

inline void write_instance(std::ostream& out, const EnergyModel& model) {
    const int n = model.node_count();
    const int l = model.label_count();
    const Prior& prior = model.prior();
    out << "rangemove-instance " << kInstanceFormatVersion << '\n';
    out << "nodes " << n << " labels " << l << '\n';
    out << "prior " << prior_kind_name(prior.kind()) << ' ' << prior.truncation() << '\n';
    if (prior.kind() == PriorKind::TabulatedConvexPart) {
        out << "table";
        for (int d = -(l - 1); d <= l - 1; ++d) out << ' ' << detail::format_real(prior.g(d));
        out << '\n';
    }
    if (const auto& grid = model.topology().grid())
        out << "grid " << grid->width << ' ' << grid->height << '\n';
    out << "unary\n";
    for (int i = 0; i < n; ++i) {
        const auto row = model.unary().row(i);
        for (int a = 0; a < l; ++a) out << (a ? " " : "") << detail::format_real(row[static_cast<std::size_t>(a)]);
        out << '\n';
    }
    const auto& edges = model.topology().edges();
    out << "edges " << edges.size() << '\n';
    for (std::size_t e = 0; e < edges.size(); ++e)
        out << edges[e].u << ' ' << edges[e].v << ' ' << detail::format_real(model.weight(e)) << '\n';
    out << "end\n";
}

inline EnergyModel load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file '" + path + "'");
    return read_instance(in);
}

inline void save_instance(const std::string& path, const EnergyModel& model) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write instance file '" + path + "'");
    write_instance(out, model);
}

/// One label per whitespace-separated token, N of them.
inline Labeling read_labeling(std::istream& in, const EnergyModel& model) {
    Labeling x;
    Label v;
    while (in >> v) x.push_back(v);
    if (!in.eof()) throw ParseError("labeling: non-integer token");
    if (x.size() != static_cast<std::size_t>(model.node_count()))
        throw ParseError("labeling: expected " + std::to_string(model.node_count()) + " labels, got " +
                         std::to_string(x.size()));
    for (Label a : x)
        if (!model.labels().contains(a)) throw ParseError("labeling: label " + std::to_string(a) + " out of range");
    return x;
}

} // namespace rangemove

#endif // RANGEMOVE_INSTANCE_IO_HPP
