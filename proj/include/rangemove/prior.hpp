#ifndef RANGEMOVE_PRIOR_HPP
#define RANGEMOVE_PRIOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rangemove/error.hpp"

namespace rangemove {

/// Values of a function over signed label differences d in [-max_abs, max_abs].
class DifferenceTable {
public:
    DifferenceTable() = default;

    DifferenceTable(int max_abs, std::vector<double> values)
        : max_abs_(max_abs), values_(std::move(values)) {
        detail::require(max_abs_ >= 0, "DifferenceTable: negative range");
        detail::require(values_.size() == static_cast<std::size_t>(2 * max_abs_ + 1),
                        "DifferenceTable: expected 2*max_abs+1 values");
        for (double v : values_)
            detail::require(std::isfinite(v), "DifferenceTable: non-finite entry");
    }

    static DifferenceTable from_function(int max_abs, const std::function<double(int)>& f) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(2 * max_abs + 1));
        for (int d = -max_abs; d <= max_abs; ++d) values.push_back(f(d));
        return DifferenceTable(max_abs, std::move(values));
    }

    int max_abs() const { return max_abs_; }
    bool contains(int d) const { return d >= -max_abs_ && d <= max_abs_; }

    double operator()(int d) const {
        return values_[static_cast<std::size_t>(d + max_abs_)];
    }

    double at(int d) const {
        detail::require(contains(d), "DifferenceTable: difference out of range");
        return (*this)(d);
    }

    const std::vector<double>& values() const { return values_; }

private:
    int max_abs_ = 0;
    std::vector<double> values_{0.0};
};

/// Discrete convexity test: 2 f(a) <= f(a-1) + f(a+1) for every a strictly
/// inside [lo, hi]. The tolerance is scaled by the magnitude of the entries.
inline bool is_discretely_convex(const DifferenceTable& table, int lo, int hi,
                                 double tol = 1e-9) {
    detail::require(lo <= hi && table.contains(lo) && table.contains(hi),
                    "is_discretely_convex: range outside table");
    for (int a = lo + 1; a < hi; ++a) {
        const double left = table(a - 1), mid = table(a), right = table(a + 1);
        const double scale = std::max({1.0, std::abs(left), std::abs(mid), std::abs(right)});
        if (2.0 * mid > left + right + tol * scale) return false;
    }
    return true;
}

enum class PriorKind { TruncatedLinear, TruncatedQuadratic, Cauchy, TabulatedConvexPart };

inline std::string_view prior_kind_name(PriorKind kind) {
    switch (kind) {
    case PriorKind::TruncatedLinear: return "tl";
    case PriorKind::TruncatedQuadratic: return "tq";
    case PriorKind::Cauchy: return "cauchy";
    case PriorKind::TabulatedConvexPart: return "table";
    }
    return "?";
}

inline std::optional<PriorKind> parse_prior_kind(std::string_view name) {
    if (name == "tl" || name == "truncated_linear") return PriorKind::TruncatedLinear;
    if (name == "tq" || name == "truncated_quadratic") return PriorKind::TruncatedQuadratic;
    if (name == "cauchy") return PriorKind::Cauchy;
    if (name == "table") return PriorKind::TabulatedConvexPart;
    return std::nullopt;
}

/// Which pairwise function an energy is evaluated with: the robust prior g or
/// its generalized Huber extension h.
enum class PriorMode { G, H };

/// A robust pairwise prior g, convex on [-T, T], together with its
/// generalized Huber function h: g on [-T, T], continued linearly outside.
/// The built-in priors continue with the slope of g at T (so the quadratic
/// gives 2T|x| - T^2); tabulated priors use the smallest slope that keeps h
/// convex and above g.
class Prior {
public:
    PriorKind kind() const { return kind_; }
    int truncation() const { return truncation_; }
    int label_count() const { return label_count_; }

    double g(int d) const { return g_(d); }
    double h(int d) const { return h_(d); }
    double value(int d, PriorMode mode) const { return mode == PriorMode::G ? g_(d) : h_(d); }

    const DifferenceTable& g_table() const { return g_; }
    const DifferenceTable& h_table() const { return h_; }
    const DifferenceTable& table(PriorMode mode) const { return mode == PriorMode::G ? g_ : h_; }

    /// g attains its maximum at every |d| >= T. Holds for the truncated
    /// linear/quadratic priors, fails for Cauchy. The full range move relies on it.
    bool is_truncated_flat() const { return truncated_flat_; }

    /// h(a+1) - 2 h(a) + h(a-1); nonnegative, and zero whenever |a| >= T.
    double second_difference(int a) const {
        detail::require(std::abs(a) <= label_count_ - 2,
                        "second_difference: |a| must be at most label_count - 2");
        return h_(a + 1) - 2.0 * h_(a) + h_(a - 1);
    }

    friend Prior make_prior(PriorKind kind, int truncation, int label_count);
    friend Prior make_tabulated_prior(std::vector<double> g_values, int truncation,
                                      int label_count);

private:
    Prior() = default;

    void finish(DifferenceTable g, double boundary_slope);

    PriorKind kind_ = PriorKind::TruncatedQuadratic;
    int truncation_ = 1;
    int label_count_ = 2;
    bool truncated_flat_ = false;
    DifferenceTable g_;
    DifferenceTable h_;
};

inline void Prior::finish(DifferenceTable g, double boundary_slope) {
    const int m = label_count_ - 1;
    const int t = std::min(truncation_, m);
    if (!is_discretely_convex(g, -t, t))
        throw ContractViolation("prior is not convex on [-T, T]");

    std::vector<double> h(g.values());
    if (truncation_ < m) {
        double slope_hi = boundary_slope;
        double slope_lo = boundary_slope;
        if (std::isnan(boundary_slope)) {
            // Smallest slope that keeps the continuation convex and above g.
            slope_hi = g(t) - g(t - 1);
            slope_lo = g(-t) - g(-t + 1);
            for (int d = t + 1; d <= m; ++d) {
                slope_hi = std::max(slope_hi, (g(d) - g(t)) / (d - t));
                slope_lo = std::max(slope_lo, (g(-d) - g(-t)) / (d - t));
            }
        }
        for (int d = t + 1; d <= m; ++d)
            h[static_cast<std::size_t>(d + m)] = g(t) + (d - t) * slope_hi;
        for (int d = -t - 1; d >= -m; --d)
            h[static_cast<std::size_t>(d + m)] = g(-t) + (-t - d) * slope_lo;
    }
    g_ = std::move(g);
    h_ = DifferenceTable(m, std::move(h));

    // A table whose convex part decreases at the boundary cannot be dominated
    // by its linear continuation.
    for (int d = -m; d <= m; ++d) {
        if (h_(d) < g_(d) - 1e-9 * std::max(1.0, std::abs(g_(d))))
            throw ContractViolation("generalized Huber extension falls below g");
    }
    if (!is_discretely_convex(h_, -m, m))
        throw ContractViolation("generalized Huber extension is not convex");

    switch (kind_) {
    case PriorKind::TruncatedLinear:
    case PriorKind::TruncatedQuadratic: truncated_flat_ = true; break;
    case PriorKind::Cauchy: truncated_flat_ = false; break;
    case PriorKind::TabulatedConvexPart: {
        const auto& v = g_.values();
        const double top = *std::max_element(v.begin(), v.end());
        truncated_flat_ = true;
        for (int d = -m; d <= m; ++d) {
            if (std::abs(d) >= truncation_ && g_(d) < top - 1e-12 * std::max(1.0, top))
                truncated_flat_ = false;
        }
        break;
    }
    }
}

/// Builds g(x) = min(|x|, T), min(x^2, T^2) or T^2/2 log(1 + (x/T)^2).
inline Prior make_prior(PriorKind kind, int truncation, int label_count) {
    detail::require(truncation >= 1, "make_prior: T must be >= 1");
    detail::require(label_count >= 2, "make_prior: label count must be >= 2");
    detail::require(kind != PriorKind::TabulatedConvexPart,
                    "make_prior: use make_tabulated_prior for tabulated priors");
    Prior p;
    p.kind_ = kind;
    p.truncation_ = truncation;
    p.label_count_ = label_count;
    const double t = truncation;
    std::function<double(int)> f;
    double slope = 0.0;  // dg/dx at x = T from the left
    switch (kind) {
    case PriorKind::TruncatedLinear:
        f = [t](int d) { return std::min(std::abs(static_cast<double>(d)), t); };
        slope = 1.0;
        break;
    case PriorKind::TruncatedQuadratic:
        f = [t](int d) { return std::min(static_cast<double>(d) * d, t * t); };
        slope = 2.0 * t;
        break;
    case PriorKind::Cauchy:
        f = [t](int d) {
            const double r = d / t;
            return t * t / 2.0 * std::log1p(r * r);
        };
        slope = t / 2.0;
        break;
    case PriorKind::TabulatedConvexPart: break;
    }
    p.finish(DifferenceTable::from_function(label_count - 1, f), slope);
    return p;
}

/// g given explicitly for d = -(l-1) .. l-1; must be convex on [-T, T].
inline Prior make_tabulated_prior(std::vector<double> g_values, int truncation,
                                  int label_count) {
    detail::require(truncation >= 1, "make_tabulated_prior: T must be >= 1");
    detail::require(label_count >= 2, "make_tabulated_prior: label count must be >= 2");
    Prior p;
    p.kind_ = PriorKind::TabulatedConvexPart;
    p.truncation_ = truncation;
    p.label_count_ = label_count;
    p.finish(DifferenceTable(label_count - 1, std::move(g_values)), std::nan(""));
    return p;
}

} // namespace rangemove

#endif // RANGEMOVE_PRIOR_HPP
