#pragma once
// Worked networks shared by the unit and acceptance tests.

#include "bcclear/games.hpp"

namespace fixtures {

using namespace bcclear;

inline Rational q(const char* text) { return parse_rational(text); }

// One debtor (node 2, cash 1.5) owing 1 to each of nodes 0 and 1, who both hold 1.
inline FinancialNetwork fee_race() {
    FinancialNetwork net;
    net.node_count = 3;
    net.cash = {1, 1, q("1.5")};
    net.liabilities = Matrix<Rational>(3, 3, Rational(0));
    net.liabilities(2, 0) = 1;
    net.liabilities(2, 1) = 1;
    net.block_capacity = 2;
    return net;
}
inline Discretization fee_race_disc() { return {1, 10}; }

// Bank 2 bids fee f0/10 towards node 0 and f1/10 towards node 1.
inline BidSchedule fee_race_bids(FeeNum f0, FeeNum f1) {
    return all_or_nothing(fee_race(), fee_race_disc(), {{{2, 0}, f0}, {{2, 1}, f1}});
}

// Society (node 0) plus four banks under a two-point systematic shock.
inline FinancialNetwork five_node(bool stressed = false) {
    FinancialNetwork net;
    net.node_count = 5;
    net.has_society = true;
    net.liabilities = Matrix<Rational>(5, 5, Rational(0));
    const int rows[4][5] = {{3, 0, 7, 1, 1}, {3, 3, 0, 3, 3}, {3, 1, 1, 0, 1}, {3, 1, 2, 1, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) net.liabilities(i + 1, j) = rows[i][j];
    net.cash = stressed ? std::vector<Rational>{0, 1, 3, 2, 5} : std::vector<Rational>{0, 6, 8, 7, 10};
    net.block_capacity = 16;
    return net;
}
inline Discretization five_node_disc() { return {100, 40}; }

inline ScenarioSet five_node_scenarios() {
    return ScenarioSet({{q("0.75"), five_node(false).cash}, {q("0.25"), five_node(true).cash}});
}

inline ObjectiveSpec five_node_objective() {
    ObjectiveSpec spec = ObjectiveSpec::uniform(5);
    spec.weights = {q("0.1"), 1, 1, 1, 1};
    return spec;
}

// The published optimum: everything at fee 0 except four obligations.
inline FeeAssignment five_node_published_fees() {
    FeeAssignment fees = zero_fee_assignment(five_node());
    fees[{1, 2}] = 1;
    fees[{1, 3}] = 1;
    fees[{1, 4}] = 2;
    fees[{2, 4}] = 1;
    return fees;
}

inline BidSchedule five_node_published_bids() {
    return all_or_nothing(five_node(), five_node_disc(), five_node_published_fees());
}

}  // namespace fixtures
