#include "bcclear/scenarios.hpp"

#include "bcclear/error.hpp"

namespace bcclear {

ScenarioSet::ScenarioSet(std::vector<Scenario> scenarios) : scenarios_(std::move(scenarios)) {
    if (scenarios_.empty()) throw ValidationError("scenario set is empty");
    Rational total = 0;
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
        if (scenarios_[s].probability <= 0)
            throw ValidationError("scenario " + std::to_string(s) + " has nonpositive probability");
        total += scenarios_[s].probability;
    }
    if (total != 1)
        throw ValidationError("scenario probabilities sum to " + to_exact_string(total) + ", expected 1");
}

ScenarioSet ScenarioSet::single(std::vector<Rational> cash) { return ScenarioSet({{Rational(1), std::move(cash)}}); }

void ScenarioSet::check_dimension(std::size_t node_count) const {
    for (std::size_t s = 0; s < scenarios_.size(); ++s)
        if (scenarios_[s].cash.size() != node_count)
            throw ValidationError("scenario " + std::to_string(s) + " has " +
                                  std::to_string(scenarios_[s].cash.size()) + " cash entries, expected " +
                                  std::to_string(node_count));
}

const char* to_string(Utility) { return "positive_part"; }

ObjectiveSpec ObjectiveSpec::uniform(std::size_t node_count) {
    return {std::vector<Utility>(node_count, Utility::PositivePart), std::vector<Rational>(node_count, Rational(1))};
}

void ObjectiveSpec::check(std::size_t node_count) const {
    if (weights.size() != node_count || utilities.size() != node_count)
        throw ValidationError("objective has " + std::to_string(weights.size()) + " weights, expected " +
                              std::to_string(node_count));
    for (std::size_t k = 0; k < weights.size(); ++k)
        if (weights[k] <= 0) throw ValidationError("weight " + std::to_string(k) + " must be strictly positive");
}

const char* to_string(Evaluator evaluator) {
    switch (evaluator) {
        case Evaluator::Chain: return "chain";
        case Evaluator::Limit: return "limit";
        case Evaluator::Centralized: return "centralized";
    }
    return "unknown";
}

std::vector<Rational> terminal_cash(const FinancialNetwork& network, const BidSchedule& bids,
                                    const EvaluationOptions& options, bool* exact) {
    bool is_exact = true;
    std::vector<Rational> cash;
    switch (options.evaluator) {
        case Evaluator::Chain: {
            const auto limit = limiting_cash(run_chain(network, bids, options.chain));
            is_exact = limit.exact;
            cash = limit.cash;
            break;
        }
        case Evaluator::Limit: {
            initial_cash(network);  // cash must cover collateral in every scenario
            const auto terminal = solve_terminal(network, bids, Bound::Greatest, options.limit);
            is_exact = terminal.exact;
            cash = terminal.cash();
            break;
        }
        case Evaluator::Centralized: {
            const auto clearing = clearing_payments(network, Bound::Greatest, options.centralized);
            is_exact = clearing.exact;
            for (const auto& k : clearing.net_worths) cash.push_back(positive_part(k));
            break;
        }
    }
    if (exact) *exact = is_exact;
    return cash;
}

ExpectedCash expected_cash(const FinancialNetwork& network, const ScenarioSet& scenarios, const BidSchedule& bids,
                           const EvaluationOptions& options) {
    scenarios.check_dimension(network.node_count);
    ExpectedCash out;
    out.cash.assign(network.node_count, Rational(0));
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const Scenario& scenario = scenarios.scenarios()[s];
        const std::string where = "scenario " + std::to_string(s) + ": ";
        bool exact = true;
        std::vector<Rational> cash;
        try {
            cash = terminal_cash(network.with_cash(scenario.cash), bids, options, &exact);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what(), e.details());
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(where + e.what(), e.last_iterate(), e.residual(), e.iterations());
        } catch (const BudgetExceededError& e) {
            throw BudgetExceededError(where + e.what(), e.required(), e.budget());
        } catch (const SolverError& e) {
            throw SolverError(where + e.what());
        }
        out.exact = out.exact && exact;
        for (std::size_t i = 0; i < cash.size(); ++i) out.cash[i] += scenario.probability * cash[i];
        out.per_scenario.push_back(std::move(cash));
    }
    return out;
}

Rational weighted_objective(const std::vector<Rational>& expected, const ObjectiveSpec& objective) {
    objective.check(expected.size());
    Rational total = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) total += objective.weights[k] * positive_part(expected[k]);
    return total;
}

std::vector<Rational> expected_initial_cash(const FinancialNetwork& network, const ScenarioSet& scenarios) {
    scenarios.check_dimension(network.node_count);
    std::vector<Rational> out(network.node_count, Rational(0));
    for (const auto& scenario : scenarios.scenarios()) {
        const auto v0 = initial_cash_unchecked(network.with_cash(scenario.cash));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += scenario.probability * v0[i];
    }
    return out;
}

}  // namespace bcclear
