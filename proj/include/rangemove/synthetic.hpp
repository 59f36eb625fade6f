#ifndef RANGEMOVE_SYNTHETIC_HPP
#define RANGEMOVE_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/prior.hpp"

namespace rangemove {

enum class SyntheticShape { Chain, Grid };
enum class UnaryKind { Uniform, Bimodal };

/// Random instance description. Text form:
///   chain:n=10,l=6,seed=1
///   grid:w=20,h=20,l=16,t=3,prior=tq,unary=bimodal,weight=2,weights=random,seed=7
struct SyntheticSpec {
    SyntheticShape shape = SyntheticShape::Chain;
    int nodes = 10;
    int width = 4;
    int height = 4;
    int labels = 6;
    int truncation = 2;
    PriorKind prior = PriorKind::TruncatedQuadratic;
    UnaryKind unary = UnaryKind::Uniform;
    double weight = 1.0;
    bool random_weights = false;
    std::uint64_t seed = 0;

    int node_count() const { return shape == SyntheticShape::Chain ? nodes : width * height; }
};

inline SyntheticSpec parse_synthetic_spec(std::string_view text) {
    const auto fail = [&](const std::string& msg) {
        throw ParseError("synthetic spec '" + std::string(text) + "': " + msg);
    };
    SyntheticSpec spec;
    const auto colon = text.find(':');
    const std::string_view shape = text.substr(0, colon);
    if (shape == "chain") spec.shape = SyntheticShape::Chain;
    else if (shape == "grid") spec.shape = SyntheticShape::Grid;
    else fail("shape must be 'chain' or 'grid'");
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    const auto to_int = [&](std::string_view key, std::string_view v) {
        const std::string s(v);
        char* end = nullptr;
        const long long n = std::strtoll(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0') fail("bad integer for '" + std::string(key) + "'");
        return n;
    };
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) fail("expected key=value, got '" + std::string(item) + "'");
        const std::string_view key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "n") spec.nodes = static_cast<int>(to_int(key, value));
        else if (key == "w") spec.width = static_cast<int>(to_int(key, value));
        else if (key == "h") spec.height = static_cast<int>(to_int(key, value));
        else if (key == "l") spec.labels = static_cast<int>(to_int(key, value));
        else if (key == "t") spec.truncation = static_cast<int>(to_int(key, value));
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(to_int(key, value));
        else if (key == "prior") {
            const auto kind = parse_prior_kind(value);
            if (!kind || *kind == PriorKind::TabulatedConvexPart) fail("prior must be tl, tq or cauchy");
            spec.prior = *kind;
        } else if (key == "unary") {
            if (value == "uniform") spec.unary = UnaryKind::Uniform;
            else if (value == "bimodal") spec.unary = UnaryKind::Bimodal;
            else fail("unary must be uniform or bimodal");
        } else if (key == "weight") {
            const std::string s(value);
            char* end = nullptr;
            spec.weight = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0' || !(spec.weight >= 0.0)) fail("bad weight");
        } else if (key == "weights") {
            if (value == "const") spec.random_weights = false;
            else if (value == "random") spec.random_weights = true;
            else fail("weights must be const or random");
        } else {
            fail("unknown key '" + std::string(key) + "'");
        }
    }
    if (spec.node_count() < 1) fail("instance must have at least one node");
    if (spec.labels < 2) fail("need at least two labels");
    if (spec.truncation < 1) fail("truncation must be >= 1");
    return spec;
}

inline std::string to_string(const SyntheticSpec& s) {
    std::string out = s.shape == SyntheticShape::Chain ? "chain:n=" + std::to_string(s.nodes)
                                                       : "grid:w=" + std::to_string(s.width) +
                                                             ",h=" + std::to_string(s.height);
    out += ",l=" + std::to_string(s.labels) + ",t=" + std::to_string(s.truncation);
    out += ",prior=" + std::string(prior_kind_name(s.prior));
    out += s.unary == UnaryKind::Bimodal ? ",unary=bimodal" : ",unary=uniform";
    char buf[64];
    std::snprintf(buf, sizeof buf, ",weight=%g", s.weight);
    out += buf;
    if (s.random_weights) out += ",weights=random";
    out += ",seed=" + std::to_string(s.seed);
    return out;
}

namespace detail {

/// Uniform in [0, 1) from the top 53 bits, identical on every platform.
inline double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int below(std::mt19937_64& rng, int n) {
    return static_cast<int>(unit(rng) * n);
}

} // namespace detail

/// Uniform unaries are U(0, 10). Bimodal unaries have two random minima per
/// node: 2 * min(|a - m1|, |a - m2|) + U(0, 2).
inline EnergyModel make_synthetic(const SyntheticSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    GraphTopology topology = spec.shape == SyntheticShape::Chain ? make_chain_topology(spec.nodes)
                                                                 : make_grid_topology(spec.width, spec.height);
    const int n = topology.node_count();
    const int l = spec.labels;
    std::vector<double> costs;
    costs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(l));
    for (int i = 0; i < n; ++i) {
        if (spec.unary == UnaryKind::Uniform) {
            for (int a = 0; a < l; ++a) costs.push_back(10.0 * detail::unit(rng));
        } else {
            const int m1 = detail::below(rng, l);
            const int m2 = detail::below(rng, l);
            for (int a = 0; a < l; ++a)
                costs.push_back(2.0 * std::min(std::abs(a - m1), std::abs(a - m2)) + 2.0 * detail::unit(rng));
        }
    }
    std::vector<double> weights(topology.edge_count(), spec.weight);
    if (spec.random_weights)
        for (double& w : weights) w = 2.0 * spec.weight * detail::unit(rng);
    return EnergyModel(std::move(topology), UnaryTable(n, l, std::move(costs)),
                       make_prior(spec.prior, spec.truncation, l), std::move(weights));
}

inline EnergyModel make_synthetic(std::string_view text) { return make_synthetic(parse_synthetic_spec(text)); }

} // namespace rangemove

#endif // RANGEMOVE_SYNTHETIC_HPP
