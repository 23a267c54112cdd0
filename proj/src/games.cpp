#include "bcclear/games.hpp"

#include "bcclear/error.hpp"
#include "bcclear/linear_solve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace bcclear {

const char* to_string(SpaceMode mode) { return mode == SpaceMode::AllOrNothing ? "all-or-nothing" : "full-grid"; }

namespace {

double binomial(double n, double k) {
    double r = 1;
    for (double i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Every way to place `units` bid units over fee levels 0..F.
void compositions(long units, int fee_den, std::vector<long>& current, std::size_t level,
                  std::vector<std::vector<long>>& out) {
    if (level == static_cast<std::size_t>(fee_den)) {
        current[level] = units;
        out.push_back(current);
        return;
    }
    for (long u = units; u >= 0; --u) {
        current[level] = u;
        compositions(units - u, fee_den, current, level + 1, out);
    }
    current[level] = 0;
}

std::string pair_label(const Pair& p) { return std::to_string(p.from) + ">" + std::to_string(p.to); }

std::vector<Rational> player_payoffs(const FinancialNetwork& network, const Discretization& disc,
                                     const ScenarioSet& scenarios, const BidMap& bids,
                                     const std::vector<std::size_t>& players, const EvaluationOptions& options,
                                     bool& exact) {
    const BidSchedule schedule = make_schedule(network, disc, bids);
    const ExpectedCash cash = expected_cash(network, scenarios, schedule, options);
    exact = exact && cash.exact;
    std::vector<Rational> out;
    for (std::size_t p : players) out.push_back(positive_part(cash.cash[p]));
    return out;
}

}  // namespace

StrategySpace make_strategy_space(const FinancialNetwork& network, const Discretization& disc, std::size_t player,
                                  SpaceMode mode, double budget) {
    if (player >= network.node_count) throw ValidationError("player " + std::to_string(player) + " is not a node");
    const FeeGrid grid(disc.fee_denominator);
    StrategySpace space;
    space.player = player;
    space.obligations = network.incoming_obligations(player);

    // Per-obligation choices, then their product.
    std::vector<std::vector<AtomMap>> choices;
    std::vector<std::vector<std::string>> choice_labels;
    double total = 1;
    for (const Pair& pair : space.obligations) {
        const Rational amount = network.unsecured(pair.from, pair.to);
        std::vector<AtomMap> options;
        std::vector<std::string> labels;
        if (amount == 0) {
            options.emplace_back();
            labels.push_back(pair_label(pair) + ":-");
        } else if (mode == SpaceMode::AllOrNothing) {
            for (FeeNum f = 0; f <= disc.fee_denominator; ++f) {
                options.push_back(AtomMap{{f, amount}});
                labels.push_back(pair_label(pair) + ":" + std::to_string(f));
            }
        } else {
            Rational units_q = amount * disc.bid_denominator;
            units_q.canonicalize();
            if (units_q.get_den() != 1)
                throw ValidationError("obligation " + to_string(pair) + " is not a whole number of bid units");
            const long units = units_q.get_num().get_si();
            if (binomial(static_cast<double>(units + disc.fee_denominator), disc.fee_denominator) * total > budget)
                throw BudgetExceededError("full-grid strategy space of node " + std::to_string(player) +
                                              " exceeds the enumeration budget",
                                          binomial(static_cast<double>(units + disc.fee_denominator),
                                                   disc.fee_denominator) * total,
                                          budget);
            std::vector<long> current(grid.size(), 0);
            std::vector<std::vector<long>> splits;
            compositions(units, disc.fee_denominator, current, 0, splits);
            for (const auto& split : splits) {
                AtomMap atoms;
                std::string label = pair_label(pair) + ":{";
                bool first = true;
                for (std::size_t f = 0; f < split.size(); ++f) {
                    if (split[f] == 0) continue;
                    atoms[static_cast<FeeNum>(f)] = ratio(split[f], disc.bid_denominator);
                    label += (first ? "" : ",") + std::to_string(f) + "=" +
                             to_exact_string(ratio(split[f], disc.bid_denominator));
                    first = false;
                }
                options.push_back(std::move(atoms));
                labels.push_back(label + "}");
            }
        }
        total *= static_cast<double>(options.size());
        if (total > budget)
            throw BudgetExceededError("strategy space of node " + std::to_string(player) +
                                          " exceeds the enumeration budget",
                                      total, budget);
        choices.push_back(std::move(options));
        choice_labels.push_back(std::move(labels));
    }

    std::vector<std::size_t> digit(choices.size(), 0);
    while (true) {
        BidMap fragment;
        std::string label;
        for (std::size_t o = 0; o < choices.size(); ++o) {
            const AtomMap& atoms = choices[o][digit[o]];
            if (!atoms.empty()) fragment[space.obligations[o]] = atoms;
            label += (o ? "," : "") + choice_labels[o][digit[o]];
        }
        space.strategies.push_back(std::move(fragment));
        space.labels.push_back(label.empty() ? "none" : label);

        // Odometer step, last obligation fastest.
        std::size_t pos = choices.size();
        while (pos > 0 && ++digit[pos - 1] == choices[pos - 1].size()) digit[--pos] = 0;
        if (pos == 0) break;
    }
    return space;
}

std::size_t PayoffTable::index_of(const Profile& profile) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) idx = idx * sizes[k] + profile[k];
    return idx;
}

Profile PayoffTable::profile_of(std::size_t index) const {
    Profile profile(sizes.size());
    for (std::size_t k = sizes.size(); k-- > 0;) {
        profile[k] = index % sizes[k];
        index /= sizes[k];
    }
    return profile;
}

PayoffTable make_payoff_table(std::vector<std::size_t> sizes, std::vector<std::vector<Rational>> payoffs) {
    PayoffTable table;
    std::size_t count = 1;
    for (auto s : sizes) count *= s;
    if (payoffs.size() != count) throw ValidationError("payoff table has the wrong number of profiles");
    for (const auto& row : payoffs)
        if (row.size() != sizes.size()) throw ValidationError("payoff row has the wrong number of players");
    for (std::size_t k = 0; k < sizes.size(); ++k) table.players.push_back(k);
    table.baselines.assign(sizes.size(), Rational(0));
    table.sizes = std::move(sizes);
    table.payoffs = std::move(payoffs);
    return table;
}

BidMap combine_bids(const BidMap& fixed, const std::vector<const BidMap*>& fragments) {
    BidMap out = fixed;
    for (const BidMap* fragment : fragments)
        for (const auto& [pair, atoms] : *fragment) out[pair] = atoms;
    return out;
}

PayoffTable payoff_table(const FinancialNetwork& network, const Discretization& disc, const ScenarioSet& scenarios,
                         const std::vector<StrategySpace>& spaces, const BidMap& fixed,
                         const EvaluationOptions& options, double budget) {
    PayoffTable table;
    double count = 1;
    for (const auto& space : spaces) {
        table.players.push_back(space.player);
        table.sizes.push_back(space.size());
        table.labels.push_back(space.labels);
        count *= static_cast<double>(space.size());
    }
    if (count > budget)
        throw BudgetExceededError("payoff table needs " + std::to_string(count) + " profiles (budget " +
                                      std::to_string(budget) + ")",
                                  count, budget);

    // Base bids: everything the players do not choose themselves.
    BidMap base = fixed;
    for (const auto& space : spaces)
        for (const Pair& pair : space.obligations) base.erase(pair);

    const auto v0 = expected_initial_cash(network, scenarios);
    for (std::size_t p : table.players) table.baselines.push_back(v0[p]);

    const std::size_t profiles = static_cast<std::size_t>(count);
    table.payoffs.reserve(profiles);
    std::vector<const BidMap*> fragments(spaces.size());
    for (std::size_t idx = 0; idx < profiles; ++idx) {
        const Profile profile = table.profile_of(idx);
        for (std::size_t k = 0; k < spaces.size(); ++k) fragments[k] = &spaces[k].strategies[profile[k]];
        table.payoffs.push_back(player_payoffs(network, disc, scenarios, combine_bids(base, fragments),
                                               table.players, options, table.exact));
    }
    return table;
}

std::vector<std::size_t> best_response(const PayoffTable& table, std::size_t position, const Profile& profile) {
    Profile probe = profile;
    std::vector<std::size_t> best;
    Rational best_value;
    for (std::size_t s = 0; s < table.sizes[position]; ++s) {
        probe[position] = s;
        const Rational& v = table.payoff(probe, position);
        if (best.empty() || v > best_value) {
            best = {s};
            best_value = v;
        } else if (v == best_value) {
            best.push_back(s);
        }
    }
    return best;
}

std::vector<Profile> pure_nash_scan(const PayoffTable& table, const Rational& tol) {
    std::vector<Profile> equilibria;
    for (std::size_t idx = 0; idx < table.profile_count(); ++idx) {
        const Profile profile = table.profile_of(idx);
        bool stable = true;
        for (std::size_t k = 0; k < table.sizes.size() && stable; ++k) {
            const Rational& current = table.payoffs[idx][k];
            Profile probe = profile;
            for (std::size_t s = 0; s < table.sizes[k] && stable; ++s) {
                probe[k] = s;
                if (table.payoff(probe, k) > current + tol) stable = false;
            }
        }
        if (stable) equilibria.push_back(profile);
    }
    return equilibria;
}

std::vector<SymmetricEquilibrium> symmetric_mixed_equilibrium(const PayoffTable& table, const Rational& tol) {
    if (table.sizes.size() != 2 || table.sizes[0] != table.sizes[1])
        throw ValidationError("symmetric equilibrium needs a square two-player table");
    const std::size_t m = table.sizes[0];
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (table.payoff({a, b}, 1) != table.payoff({b, a}, 0))
                throw ValidationError("payoff table is not symmetric at (" + std::to_string(a) + "," +
                                      std::to_string(b) + ")");
    if (m > 24) throw BudgetExceededError("support enumeration over 2^" + std::to_string(m) + " supports", std::ldexp(1.0, static_cast<int>(m)), std::ldexp(1.0, 24));

    Matrix<Rational> payoff(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) payoff(a, b) = table.payoff({a, b}, 0);

    std::vector<SymmetricEquilibrium> found;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
        std::vector<std::size_t> support;
        for (std::size_t s = 0; s < m; ++s)
            if (mask >> s & 1) support.push_back(s);
        const std::size_t k = support.size();

        // Unknowns: p_s for s in support, then the common value v.
        Matrix<Rational> a(k + 1, k + 1, Rational(0));
        std::vector<Rational> rhs(k + 1, Rational(0));
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) a(r, c) = payoff(support[r], support[c]);
            a(r, k) = -1;
        }
        for (std::size_t c = 0; c < k; ++c) a(k, c) = 1;
        rhs[k] = 1;
        auto solution = solve_exact(std::move(a), std::move(rhs));
        if (!solution) continue;

        bool positive = true;
        for (std::size_t c = 0; c < k; ++c) positive = positive && (*solution)[c] > 0;
        if (!positive) continue;

        std::vector<Rational> p(m, Rational(0));
        for (std::size_t c = 0; c < k; ++c) p[support[c]] = (*solution)[c];
        const Rational& value = (*solution)[k];
        bool no_deviation = true;
        for (std::size_t r = 0; r < m && no_deviation; ++r) {
            if (mask >> r & 1) continue;
            Rational v = 0;
            for (std::size_t c = 0; c < m; ++c) v += payoff(r, c) * p[c];
            no_deviation = v <= value + tol;
        }
        if (no_deviation) found.push_back({std::move(p), std::move(support), value});
    }
    if (found.empty()) throw SolverError("no symmetric mixed equilibrium found within tolerance");
    return found;
}

namespace {

// Mixture on `support` making the opponent indifferent over `other` against `payoff(other, support)`.
std::optional<std::pair<std::vector<Rational>, Rational>> indifference(const Matrix<Rational>& payoff,
                                                                       const std::vector<std::size_t>& other,
                                                                       const std::vector<std::size_t>& support) {
    const std::size_t k = support.size();
    Matrix<Rational> a(k + 1, k + 1, Rational(0));
    std::vector<Rational> rhs(k + 1, Rational(0));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) a(r, c) = payoff(other[r], support[c]);
        a(r, k) = -1;
    }
    for (std::size_t c = 0; c < k; ++c) a(k, c) = 1;
    rhs[k] = 1;
    auto sol = solve_exact(std::move(a), std::move(rhs));
    if (!sol) return std::nullopt;
    std::vector<Rational> mix(k);
    for (std::size_t c = 0; c < k; ++c) {
        if ((*sol)[c] <= 0) return std::nullopt;
        mix[c] = (*sol)[c];
    }
    return std::make_pair(std::move(mix), (*sol)[k]);
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + (pos - 1)) --pos;
        if (pos == 0) return;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
}

}  // namespace

std::vector<BimatrixEquilibrium> two_player_equilibria(const PayoffTable& table, const Rational& tol, double budget) {
    if (table.sizes.size() != 2) throw ValidationError("two-player support enumeration needs a two-player table");
    const std::size_t m = table.sizes[0];
    const std::size_t n = table.sizes[1];
    double work = 0;
    for (std::size_t k = 1; k <= std::min(m, n); ++k)
        work += binomial(static_cast<double>(m), static_cast<double>(k)) *
                binomial(static_cast<double>(n), static_cast<double>(k));
    if (work > budget) throw BudgetExceededError("support enumeration exceeds the budget", work, budget);

    Matrix<Rational> row_payoff(m, n);     // row player, indexed (row, col)
    Matrix<Rational> column_payoff(n, m);  // column player, indexed (col, row)
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            row_payoff(r, c) = table.payoff({r, c}, 0);
            column_payoff(c, r) = table.payoff({r, c}, 1);
        }

    std::vector<BimatrixEquilibrium> found;
    for (std::size_t k = 1; k <= std::min(m, n); ++k) {
        for_each_subset(m, k, [&](const std::vector<std::size_t>& rows) {
            for_each_subset(n, k, [&](const std::vector<std::size_t>& cols) {
                auto q = indifference(row_payoff, rows, cols);
                if (!q) return;
                auto p = indifference(column_payoff, cols, rows);
                if (!p) return;
                BimatrixEquilibrium eq{std::vector<Rational>(m, Rational(0)), std::vector<Rational>(n, Rational(0)),
                                       q->second, p->second};
                for (std::size_t i = 0; i < k; ++i) {
                    eq.row[rows[i]] = p->first[i];
                    eq.column[cols[i]] = q->first[i];
                }
                for (std::size_t r = 0; r < m; ++r) {
                    Rational v = 0;
                    for (std::size_t c = 0; c < n; ++c) v += row_payoff(r, c) * eq.column[c];
                    if (v > eq.row_payoff + tol) return;
                }
                for (std::size_t c = 0; c < n; ++c) {
                    Rational v = 0;
                    for (std::size_t r = 0; r < m; ++r) v += column_payoff(c, r) * eq.row[r];
                    if (v > eq.column_payoff + tol) return;
                }
                found.push_back(std::move(eq));
            });
        });
    }
    return found;
}

namespace {

// payoff_by_strategy[k][s]: expected payoff of player k playing s against the others' mixtures.
std::vector<std::vector<double>> strategy_values(const PayoffTable& table,
                                                 const std::vector<std::vector<double>>& mixture) {
    const std::size_t players = table.sizes.size();
    std::vector<std::vector<double>> values(players);
    for (std::size_t k = 0; k < players; ++k) values[k].assign(table.sizes[k], 0.0);
    for (std::size_t idx = 0; idx < table.profile_count(); ++idx) {
        const Profile profile = table.profile_of(idx);
        for (std::size_t k = 0; k < players; ++k) {
            double weight = 1;
            for (std::size_t q = 0; q < players && weight != 0; ++q)
                if (q != k) weight *= mixture[q][profile[q]];
            if (weight != 0) values[k][profile[k]] += weight * to_double(table.payoffs[idx][k]);
        }
    }
    return values;
}

}  // namespace

std::vector<double> mixed_payoffs(const PayoffTable& table, const std::vector<std::vector<double>>& mixture) {
    const auto values = strategy_values(table, mixture);
    std::vector<double> out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        double v = 0;
        for (std::size_t s = 0; s < values[k].size(); ++s) v += mixture[k][s] * values[k][s];
        out.push_back(v);
    }
    return out;
}

std::vector<double> deviation_gains(const PayoffTable& table, const std::vector<std::vector<double>>& mixture) {
    const auto values = strategy_values(table, mixture);
    std::vector<double> gains;
    for (std::size_t k = 0; k < values.size(); ++k) {
        double current = 0;
        for (std::size_t s = 0; s < values[k].size(); ++s) current += mixture[k][s] * values[k][s];
        const double best = *std::max_element(values[k].begin(), values[k].end());
        gains.push_back(std::max(0.0, best - current));
    }
    return gains;
}

EquilibriumReport fictitious_play(const PayoffTable& table, std::size_t rounds, std::uint64_t seed) {
    const std::size_t players = table.sizes.size();
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> counts(players);
    for (std::size_t k = 0; k < players; ++k) {
        counts[k].assign(table.sizes[k], 0.0);
        std::uniform_int_distribution<std::size_t> pick(0, table.sizes[k] - 1);
        counts[k][pick(rng)] = 1;
    }
    auto frequencies = [&](double total) {
        std::vector<std::vector<double>> mix = counts;
        for (auto& m : mix)
            for (auto& v : m) v /= total;
        return mix;
    };

    for (std::size_t round = 1; round < rounds; ++round) {
        const auto values = strategy_values(table, frequencies(static_cast<double>(round)));
        for (std::size_t k = 0; k < players; ++k) {
            const double best = *std::max_element(values[k].begin(), values[k].end());
            std::vector<std::size_t> ties;
            for (std::size_t s = 0; s < values[k].size(); ++s)
                if (values[k][s] >= best - 1e-12) ties.push_back(s);
            std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
            counts[k][ties[pick(rng)]] += 1;
        }
    }

    EquilibriumReport report;
    report.rounds = std::max<std::size_t>(rounds, 1);
    report.profile = frequencies(static_cast<double>(report.rounds));
    report.payoffs = mixed_payoffs(table, report.profile);
    report.deviation_gains = deviation_gains(table, report.profile);
    report.max_deviation_gain = *std::max_element(report.deviation_gains.begin(), report.deviation_gains.end());
    report.note = "fictitious play is a heuristic; convergence is not guaranteed, check max_deviation_gain";
    return report;
}

EquilibriumReport fictitious_play(const FinancialNetwork& network, const Discretization& disc,
                                  const ScenarioSet& scenarios, const std::vector<StrategySpace>& spaces,
                                  const BidMap& fixed, std::size_t rounds, std::uint64_t seed,
                                  const EvaluationOptions& options) {
    return fictitious_play(payoff_table(network, disc, scenarios, spaces, fixed, options), rounds, seed);
}

DeviationReport unilateral_deviation_scan(const FinancialNetwork& network, const Discretization& disc,
                                          const ScenarioSet& scenarios, const std::vector<StrategySpace>& spaces,
                                          const BidSchedule& bids, const EvaluationOptions& options) {
    DeviationReport report;
    bool exact = true;
    std::vector<std::size_t> all_players;
    for (const auto& space : spaces) all_players.push_back(space.player);
    report.players = all_players;
    report.base_payoffs = player_payoffs(network, disc, scenarios, bids.entries(), all_players, options, exact);
    ++report.evaluations;

    for (std::size_t k = 0; k < spaces.size(); ++k) {
        const StrategySpace& space = spaces[k];
        BidMap base = bids.entries();
        for (const Pair& pair : space.obligations) base.erase(pair);
        Rational best_gain = 0;
        for (const BidMap& strategy : space.strategies) {
            const auto payoff =
                player_payoffs(network, disc, scenarios, combine_bids(base, {&strategy}), {space.player}, options,
                               exact);
            ++report.evaluations;
            best_gain = std::max(best_gain, Rational(payoff[0] - report.base_payoffs[k]));
        }
        report.max_gains.push_back(best_gain);
        report.max_gain = std::max(report.max_gain, best_gain);
    }
    return report;
}

Rational pareto_objective(const FinancialNetwork& network, const ScenarioSet& scenarios, const BidSchedule& bids,
                          const ObjectiveSpec& objective, const EvaluationOptions& options) {
    return weighted_objective(expected_cash(network, scenarios, bids, options).cash, objective);
}

ParetoResult pareto_coordinate_ascent(const FinancialNetwork& network, const Discretization& disc,
                                      const ScenarioSet& scenarios, const ObjectiveSpec& objective,
                                      const FeeAssignment& start, const ParetoOptions& options) {
    objective.check(network.node_count);
    const std::vector<Pair> pairs = network.obligations();
    ParetoResult result;
    auto evaluate = [&](const FeeAssignment& fees) {
        ++result.evaluations;
        return pareto_objective(network, scenarios, all_or_nothing(network, disc, fees), objective,
                                options.evaluation);
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<FeeNum> random_fee(0, disc.fee_denominator);
    bool have_best = false;
    for (std::size_t s = 0; s < std::max<std::size_t>(options.starts, 1); ++s) {
        FeeAssignment fees = start;
        if (s > 0)
            for (auto& [pair, fee] : fees) fee = random_fee(rng);

        Rational value = evaluate(fees);
        std::size_t sweeps = 0;
        for (; sweeps < options.max_sweeps;) {
            ++sweeps;
            bool improved = false;
            for (const Pair& pair : pairs) {
                const FeeNum current = fees.at(pair);
                FeeNum best_fee = current;
                Rational best_value = value;
                for (FeeNum f = 0; f <= disc.fee_denominator; ++f) {
                    if (f == current) continue;
                    fees[pair] = f;
                    const Rational v = evaluate(fees);
                    if (v > best_value) {
                        best_value = v;
                        best_fee = f;
                    }
                }
                fees[pair] = best_fee;
                if (best_fee != current) {
                    value = best_value;
                    improved = true;
                }
            }
            if (!improved) break;
        }
        result.start_objectives.push_back(value);
        result.start_sweeps.push_back(sweeps);
        if (!have_best || value > result.objective) {
            have_best = true;
            result.objective = value;
            result.fees = fees;
            result.best_start = s;
        }
    }
    result.bids = all_or_nothing(network, disc, result.fees);
    return result;
}

LocalOptimalityReport local_optimality_check(const FinancialNetwork& network, const Discretization& disc,
                                             const ScenarioSet& scenarios, const ObjectiveSpec& objective,
                                             const BidSchedule& bids, const EvaluationOptions& options) {
    LocalOptimalityReport report;
    report.base_objective = pareto_objective(network, scenarios, bids, objective, options);
    ++report.evaluations;
    bool have = false;
    for (const Pair& pair : network.obligations()) {
        const Rational amount = network.unsecured(pair.from, pair.to);
        if (amount == 0) continue;
        for (FeeNum f = 0; f <= disc.fee_denominator; ++f) {
            const AtomMap deviation{{f, amount}};
            if (bids.at(pair) == deviation) continue;
            BidMap entries = bids.entries();
            entries[pair] = deviation;
            const Rational gain =
                pareto_objective(network, scenarios, make_schedule(network, disc, entries), objective, options) -
                report.base_objective;
            ++report.evaluations;
            if (!have || gain > report.max_gain) {
                have = true;
                report.max_gain = gain;
                report.best_pair = pair;
                report.best_fee = f;
            }
        }
    }
    return report;
}

}  // namespace bcclear
