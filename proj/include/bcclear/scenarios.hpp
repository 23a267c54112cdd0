#pragma once

#include "bcclear/bids.hpp"
#include "bcclear/centralized.hpp"
#include "bcclear/engine.hpp"
#include "bcclear/limit.hpp"
#include "bcclear/network.hpp"

#include <vector>

namespace bcclear {

struct Scenario {
    Rational probability;
    std::vector<Rational> cash;
};

/// Finite endowment distribution; probabilities are positive and sum to exactly 1.
class ScenarioSet {
public:
    ScenarioSet() = default;
    explicit ScenarioSet(std::vector<Scenario> scenarios);

    static ScenarioSet single(std::vector<Rational> cash);

    const std::vector<Scenario>& scenarios() const noexcept { return scenarios_; }
    std::size_t size() const noexcept { return scenarios_.size(); }
    bool empty() const noexcept { return scenarios_.empty(); }

    void check_dimension(std::size_t node_count) const;

private:
    std::vector<Scenario> scenarios_;
};

enum class Utility { PositivePart };

const char* to_string(Utility utility);

/// Per-node utilities and strictly positive scalarization weights.
struct ObjectiveSpec {
    std::vector<Utility> utilities;
    std::vector<Rational> weights;

    static ObjectiveSpec uniform(std::size_t node_count);
    void check(std::size_t node_count) const;
};

/// How terminal cash is obtained for one scenario: by running blocks, by the
/// large-capacity fixed point, or (benchmark) by centralized clearing.
enum class Evaluator { Chain, Limit, Centralized };

const char* to_string(Evaluator evaluator);

struct EvaluationOptions {
    Evaluator evaluator = Evaluator::Limit;
    ChainOptions chain = [] {
        ChainOptions o;
        o.record_blocks = false;
        return o;
    }();
    TerminalOptions limit;
    ClearingOptions centralized;
};

struct ExpectedCash {
    std::vector<Rational> cash;
    std::vector<std::vector<Rational>> per_scenario;
    /// False when any scenario was stopped early or solved only in floating point.
    bool exact = true;
};

/// Probability-weighted terminal cash per node. `bids` is ignored by the
/// centralized evaluator. Failures are rethrown with the scenario index.
ExpectedCash expected_cash(const FinancialNetwork& network, const ScenarioSet& scenarios, const BidSchedule& bids,
                           const EvaluationOptions& options = {});

/// Terminal cash for the network's own endowment.
std::vector<Rational> terminal_cash(const FinancialNetwork& network, const BidSchedule& bids,
                                    const EvaluationOptions& options, bool* exact = nullptr);

/// Sum_k w_k u_k(E[cash_k]); for the positive-part utility on nonnegative cash
/// this equals Sum_k w_k E[u_k(cash_k)].
Rational weighted_objective(const std::vector<Rational>& expected, const ObjectiveSpec& objective);

/// Expected initial cash V^0 per node under the scenarios.
std::vector<Rational> expected_initial_cash(const FinancialNetwork& network, const ScenarioSet& scenarios);

}  // namespace bcclear
