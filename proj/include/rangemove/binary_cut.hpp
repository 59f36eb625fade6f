#ifndef RANGEMOVE_BINARY_CUT_HPP
#define RANGEMOVE_BINARY_CUT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rangemove/error.hpp"
#include "rangemove/maxflow.hpp"

namespace rangemove {

/// Pseudo-boolean energy with unary and pairwise terms, minimized by one cut.
/// A variable is 1 iff its network node ends up on the sink side.
/// Non-submodular pairwise tables are made submodular by lowering E00, the
/// entry where both variables keep their first option.
class BinaryCutProblem {
public:
    explicit BinaryCutProblem(int variable_count) : net_(2 + variable_count, 0, 1),
                                                    count_(variable_count) {}

    int variable_count() const { return count_; }

    void add_unary(int v, double e0, double e1) {
        check(v);
        const int node = v + 2;
        if (e1 > e0) {
            net_.add_arc(net_.source(), node, e1 - e0);
            constant_ += e0;
        } else {
            if (e0 > e1) net_.add_arc(node, net_.sink(), e0 - e1);
            constant_ += e1;
        }
    }

    /// Returns true when the table had to be repaired.
    bool add_pairwise(int v1, int v2, double e00, double e01, double e10, double e11) {
        check(v1);
        check(v2);
        detail::require(v1 != v2, "BinaryCutProblem: pairwise term on a single variable");
        bool repaired = false;
        const double excess = e00 + e11 - e01 - e10;
        if (excess > 0.0) {
            e00 -= excess;
            const double scale = std::max({1.0, std::abs(e00), std::abs(e01), std::abs(e10), std::abs(e11)});
            repaired = excess > 1e-12 * scale;
        }
        // E = E00 + (E10 - E00) y1 + (E11 - E10) y2 + (E01 + E10 - E00 - E11)(1 - y1) y2
        constant_ += e00;
        add_unary(v1, 0.0, e10 - e00);
        add_unary(v2, 0.0, e11 - e10);
        const double coupling = e01 + e10 - e00 - e11;
        if (coupling > 0.0) net_.add_arc(v1 + 2, v2 + 2, coupling);
        return repaired;
    }

    struct Solution {
        std::vector<std::uint8_t> values;
        double energy = 0.0;  ///< value of the (possibly repaired) binary energy
    };

    Solution solve(MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::BoykovKolmogorov) const {
        const CutResult cut = max_flow(net_, algorithm);
        Solution sol;
        sol.values.resize(static_cast<std::size_t>(count_));
        for (int v = 0; v < count_; ++v)
            sol.values[static_cast<std::size_t>(v)] =
                cut.side_of_cut[static_cast<std::size_t>(v + 2)] == CutSide::Sink ? 1 : 0;
        sol.energy = constant_ + cut_capacity(net_, cut.side_of_cut);
        return sol;
    }

private:
    void check(int v) const {
        detail::require(v >= 0 && v < count_, "BinaryCutProblem: variable out of range");
    }

    FlowNetwork net_;
    int count_;
    double constant_ = 0.0;
};

} // namespace rangemove

#endif // RANGEMOVE_BINARY_CUT_HPP
