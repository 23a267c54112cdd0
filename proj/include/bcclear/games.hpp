#pragma once

#include "bcclear/bids.hpp"
#include "bcclear/network.hpp"
#include "bcclear/scenarios.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bcclear {

enum class SpaceMode { AllOrNothing, FullGrid };

const char* to_string(SpaceMode mode);

/// Pure strategies of one node: joint bids on all of its incoming obligations.
struct StrategySpace {
    std::size_t player = 0;
    std::vector<Pair> obligations;
    std::vector<BidMap> strategies;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return strategies.size(); }
};

/// All-or-nothing: one fee per incoming obligation, mixed radix with the last
/// obligation fastest. FullGrid: every split of each obligation over D, F.
StrategySpace make_strategy_space(const FinancialNetwork& network, const Discretization& disc, std::size_t player,
                                  SpaceMode mode, double budget = 1e6);

using Profile = std::vector<std::size_t>;

/// Expected utility of each designated player for every pure profile.
/// Profiles are indexed in mixed radix with the last player fastest.
struct PayoffTable {
    std::vector<std::size_t> players;
    std::vector<std::size_t> sizes;
    std::vector<std::vector<Rational>> payoffs;  // [profile][player position]
    /// Expected initial cash per player; payoff minus baseline is the expected gain.
    std::vector<Rational> baselines;
    std::vector<std::vector<std::string>> labels;
    bool exact = true;

    std::size_t profile_count() const noexcept { return payoffs.size(); }
    std::size_t index_of(const Profile& profile) const;
    Profile profile_of(std::size_t index) const;
    const Rational& payoff(const Profile& profile, std::size_t position) const {
        return payoffs[index_of(profile)][position];
    }
};

/// Builds a table from explicit payoffs (toy games, tests).
PayoffTable make_payoff_table(std::vector<std::size_t> sizes, std::vector<std::vector<Rational>> payoffs);

/// Replaces the obligations of each chosen strategy inside `fixed`.
BidMap combine_bids(const BidMap& fixed, const std::vector<const BidMap*>& fragments);

PayoffTable payoff_table(const FinancialNetwork& network, const Discretization& disc, const ScenarioSet& scenarios,
                         const std::vector<StrategySpace>& spaces, const BidMap& fixed,
                         const EvaluationOptions& options = {}, double budget = 1e6);

/// Profiles where no player gains more than `tol` by a unilateral switch.
std::vector<Profile> pure_nash_scan(const PayoffTable& table, const Rational& tol = 0);

/// Maximizing strategies of the player at `position` against the others in `profile`; ties kept.
std::vector<std::size_t> best_response(const PayoffTable& table, std::size_t position, const Profile& profile);

struct SymmetricEquilibrium {
    std::vector<Rational> probabilities;
    std::vector<std::size_t> support;
    Rational payoff;
};

/// Support enumeration for a symmetric two-player table (P_2(a,b) = P_1(b,a)).
/// Returns every equilibrium whose support solves the indifference system;
/// throws SolverError when none exists within `tol`.
std::vector<SymmetricEquilibrium> symmetric_mixed_equilibrium(const PayoffTable& table, const Rational& tol = 0);

struct BimatrixEquilibrium {
    std::vector<Rational> row;
    std::vector<Rational> column;
    Rational row_payoff;
    Rational column_payoff;
};

/// Support enumeration over equal-size supports of a general two-player table (nondegenerate games).
std::vector<BimatrixEquilibrium> two_player_equilibria(const PayoffTable& table, const Rational& tol = 0,
                                                       double budget = 1e6);

struct EquilibriumReport {
    std::vector<std::vector<double>> profile;  // per player mixture
    std::vector<double> payoffs;
    std::vector<double> deviation_gains;
    double max_deviation_gain = 0;
    std::size_t rounds = 0;
    std::string note;
};

/// Expected payoffs of every player under independent mixtures.
std::vector<double> mixed_payoffs(const PayoffTable& table, const std::vector<std::vector<double>>& mixture);

/// Largest gain any player gets by a pure deviation from `mixture`.
std::vector<double> deviation_gains(const PayoffTable& table, const std::vector<std::vector<double>>& mixture);

/// Simultaneous fictitious play on empirical frequencies, seeded tie-breaks.
/// A heuristic: the report carries the residual, not a convergence guarantee.
EquilibriumReport fictitious_play(const PayoffTable& table, std::size_t rounds, std::uint64_t seed);

EquilibriumReport fictitious_play(const FinancialNetwork& network, const Discretization& disc,
                                  const ScenarioSet& scenarios, const std::vector<StrategySpace>& spaces,
                                  const BidMap& fixed, std::size_t rounds, std::uint64_t seed,
                                  const EvaluationOptions& options = {});

struct DeviationReport {
    std::vector<std::size_t> players;
    std::vector<Rational> base_payoffs;
    std::vector<Rational> max_gains;
    Rational max_gain = 0;
    std::size_t evaluations = 0;
};

/// Nash check of a pure bid profile: every player tries every strategy of its space.
DeviationReport unilateral_deviation_scan(const FinancialNetwork& network, const Discretization& disc,
                                          const ScenarioSet& scenarios, const std::vector<StrategySpace>& spaces,
                                          const BidSchedule& bids, const EvaluationOptions& options = {});

Rational pareto_objective(const FinancialNetwork& network, const ScenarioSet& scenarios, const BidSchedule& bids,
                          const ObjectiveSpec& objective, const EvaluationOptions& options = {});

struct ParetoOptions {
    std::size_t max_sweeps = 100;
    /// The given start is always the first; the rest are seeded random assignments.
    std::size_t starts = 8;
    std::uint64_t seed = 0;
    EvaluationOptions evaluation;
};

struct ParetoResult {
    FeeAssignment fees;
    BidSchedule bids;
    Rational objective;
    std::size_t best_start = 0;
    std::vector<Rational> start_objectives;
    std::vector<std::size_t> start_sweeps;
    std::size_t evaluations = 0;
};

/// All-or-nothing coordinate ascent: sweep obligations in order, move each
/// to its best fee when that strictly improves the weighted objective.
ParetoResult pareto_coordinate_ascent(const FinancialNetwork& network, const Discretization& disc,
                                      const ScenarioSet& scenarios, const ObjectiveSpec& objective,
                                      const FeeAssignment& start, const ParetoOptions& options = {});

struct LocalOptimalityReport {
    Rational base_objective;
    Rational max_gain;
    Pair best_pair;
    FeeNum best_fee = 0;
    std::size_t evaluations = 0;

    bool locally_optimal() const { return max_gain <= 0; }
};

/// Tries every single-obligation all-or-nothing fee deviation from `bids`.
LocalOptimalityReport local_optimality_check(const FinancialNetwork& network, const Discretization& disc,
                                             const ScenarioSet& scenarios, const ObjectiveSpec& objective,
                                             const BidSchedule& bids, const EvaluationOptions& options = {});

}  // namespace bcclear
