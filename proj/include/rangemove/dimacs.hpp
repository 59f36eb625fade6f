#ifndef RANGEMOVE_DIMACS_HPP
#define RANGEMOVE_DIMACS_HPP

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "rangemove/error.hpp"
#include "rangemove/maxflow.hpp"

// DIMACS max-flow text format:
//   c <comment>
//   p max <nodes> <arcs>
//   n <id> s
//   n <id> t
//   a <from> <to> <capacity>
// Node ids are 1-based in the file and 0-based in FlowNetwork.

namespace rangemove {

inline FlowNetwork read_dimacs(std::istream& in) {
    std::string line;
    int number = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError("dimacs line " + std::to_string(number) + ": " + msg);
    };
    std::optional<int> nodes;
    long long declared_arcs = 0, seen_arcs = 0;
    std::optional<int> source, sink;
    struct Pending { int from, to; double cap; };
    std::vector<Pending> arcs;
    while (std::getline(in, line)) {
        ++number;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        if (tag == "p") {
            std::string kind;
            int n = 0;
            if (nodes) fail("duplicate problem line");
            if (!(ls >> kind >> n >> declared_arcs) || kind != "max") fail("expected 'p max <nodes> <arcs>'");
            if (n < 2) fail("need at least two nodes");
            nodes = n;
        } else if (tag == "n") {
            int id = 0;
            std::string which;
            if (!nodes) fail("node line before problem line");
            if (!(ls >> id >> which) || id < 1 || id > *nodes) fail("bad node line");
            if (which == "s") source = id - 1;
            else if (which == "t") sink = id - 1;
            else fail("node designator must be 's' or 't'");
        } else if (tag == "a") {
            Pending a{};
            if (!nodes) fail("arc line before problem line");
            if (!(ls >> a.from >> a.to >> a.cap)) fail("bad arc line");
            if (a.from < 1 || a.from > *nodes || a.to < 1 || a.to > *nodes) fail("arc endpoint out of range");
            --a.from;
            --a.to;
            arcs.push_back(a);
            ++seen_arcs;
        } else {
            fail("unknown line tag '" + tag + "'");
        }
    }
    if (!nodes) throw ParseError("dimacs: missing problem line");
    if (!source || !sink) throw ParseError("dimacs: missing source or sink designator");
    if (seen_arcs != declared_arcs)
        throw ParseError("dimacs: declared " + std::to_string(declared_arcs) + " arcs, found " +
                         std::to_string(seen_arcs));
    try {
        FlowNetwork net(*nodes, *source, *sink);
        for (const Pending& a : arcs) net.add_arc(a.from, a.to, a.cap);
        return net;
    } catch (const ContractViolation& e) {
        throw ParseError(std::string("dimacs: ") + e.what());
    }
}

inline void write_dimacs(std::ostream& out, const FlowNetwork& net) {
    out << "p max " << net.node_count() << ' ' << net.arcs().size() << '\n';
    out << "n " << net.source() + 1 << " s\n";
    out << "n " << net.sink() + 1 << " t\n";
    char buf[64];
    for (const Arc& a : net.arcs()) {
        std::snprintf(buf, sizeof buf, "%.17g", a.capacity);
        out << "a " << a.from + 1 << ' ' << a.to + 1 << ' ' << buf << '\n';
    }
}

} // namespace rangemove

#endif // RANGEMOVE_DIMACS_HPP
