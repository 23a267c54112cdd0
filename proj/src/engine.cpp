#include "bcclear/engine.hpp"

#include "bcclear/error.hpp"

#include <algorithm>
#include <cmath>

namespace bcclear {

const char* to_string(Termination reason) {
    switch (reason) {
        case Termination::ResidualsExhausted: return "residuals_exhausted";
        case Termination::ZeroPaymentFixedPoint: return "zero_payment_fixed_point";
        case Termination::VolumeBelowEpsilon: return "volume_below_epsilon";
        case Termination::MaxBlocks: return "max_blocks";
    }
    return "unknown";
}

FeeNum threshold_fee_block(const AtomMap& atoms, const Rational& cash) {
    if (atoms.empty()) return 0;
    Rational strict_tail = total_mass(atoms);
    // Candidate 0 first, then each atom fee in increasing order.
    if (auto it = atoms.find(0); it != atoms.end()) strict_tail -= it->second;
    if (strict_tail <= cash) return 0;
    for (const auto& [fee, amount] : atoms) {
        if (fee == 0) continue;
        strict_tail -= amount;
        if (strict_tail <= cash) return fee;
    }
    return atoms.rbegin()->first;  // unreachable: the top atom has an empty strict tail
}

Block realized_block_bids(const ResidualBids& residuals, const std::vector<Rational>& cash,
                          const std::vector<Pair>& pairs) {
    Block block;
    block.pairs = pairs;
    const int fee_den = residuals.fee_denominator;

    std::size_t begin = 0;
    while (begin < pairs.size()) {
        const std::size_t payer = pairs[begin].from;
        std::size_t end = begin;
        AtomMap aggregated;
        while (end < pairs.size() && pairs[end].from == payer) {
            for (const auto& [fee, amount] : residuals.at(pairs[end])) aggregated[fee] += amount;
            ++end;
        }

        const Rational& available = cash[payer];
        const FeeNum threshold = threshold_fee_block(aggregated, available);
        block.thresholds[payer] = threshold;
        const Rational surplus = available - tail_mass(aggregated, threshold, Tail::Strict);
        const auto at_threshold = aggregated.find(threshold);
        const Rational threshold_mass = at_threshold == aggregated.end() ? Rational(0) : at_threshold->second;
        const bool threshold_in_full = surplus >= threshold_mass;

        for (std::size_t k = begin; k < end; ++k) {
            AtomMap paid;
            for (const auto& [fee, amount] : residuals.at(pairs[k])) {
                if (fee > threshold) {
                    paid[fee] = amount;
                } else if (fee == threshold && threshold_mass > 0) {
                    Rational part = threshold_in_full ? amount : Rational(amount * surplus / threshold_mass);
                    if (part > 0) paid[fee] = part;
                }
            }
            for (const auto& [fee, amount] : paid) {
                block.miner_fee += ratio(fee, fee_den) * amount;
                block.volume += amount;
            }
            if (!paid.empty()) block.realized[pairs[k]] = std::move(paid);
        }
        begin = end;
    }
    return block;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

Selection select_greedy(const ChainState& state, const std::vector<Pair>& active, std::size_t size) {
    Selection sel;
    std::vector<Pair> chosen;
    std::vector<bool> used(active.size(), false);
    for (std::size_t step = 0; step < size; ++step) {
        std::size_t best = active.size();
        Block best_block;
        for (std::size_t c = 0; c < active.size(); ++c) {
            if (used[c]) continue;
            std::vector<Pair> trial = chosen;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), active[c]), active[c]);
            Block b = realized_block_bids(state.residuals, state.cash, trial);
            ++sel.candidates_evaluated;
            if (best == active.size() || b.miner_fee > best_block.miner_fee) {
                best = c;
                best_block = std::move(b);
            }
        }
        used[best] = true;
        chosen = best_block.pairs;
        sel.block = std::move(best_block);
    }
    sel.all_maximizers_zero_volume = sel.block.volume == 0;
    return sel;
}

}  // namespace

Selection select_block(const ChainState& state, std::size_t capacity, const ChainOptions& options,
                       std::mt19937_64* rng) {
    const std::vector<Pair> active = state.residuals.active_pairs();
    Selection sel;
    if (active.empty()) return sel;

    if (active.size() <= capacity) {
        sel.block = realized_block_bids(state.residuals, state.cash, active);
        sel.candidates_evaluated = 1;
        sel.all_maximizers_zero_volume = sel.block.volume == 0;
        return sel;
    }

    const std::size_t k = capacity;
    const double count = binomial(active.size(), k);
    if (count > options.enumeration_budget) {
        if (options.greedy_fallback) return select_greedy(state, active, k);
        throw BudgetExceededError("block selection needs " + std::to_string(count) + " candidate pair sets (budget " +
                                      std::to_string(options.enumeration_budget) +
                                      "); enable the greedy fallback to build blocks heuristically",
                                  count, options.enumeration_budget);
    }

    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<Block> maximizers;  // only collected in random tie mode
    bool have_best = false;
    Block best;
    while (true) {
        std::vector<Pair> subset;
        subset.reserve(k);
        for (std::size_t i : idx) subset.push_back(active[i]);
        Block b = realized_block_bids(state.residuals, state.cash, subset);
        ++sel.candidates_evaluated;
        // Combinations are visited in lexicographic order, so the first maximizer is the smallest set.
        if (!have_best || b.miner_fee > best.miner_fee) {
            have_best = true;
            maximizers.clear();
            if (rng) maximizers.push_back(b);
            best = std::move(b);
        } else if (rng && b.miner_fee == best.miner_fee) {
            maximizers.push_back(std::move(b));
        }

        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == active.size() - k + (pos - 1)) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }

    if (rng) {
        bool any_volume = false;
        for (const auto& m : maximizers) any_volume = any_volume || m.volume > 0;
        sel.all_maximizers_zero_volume = !any_volume;
        std::uniform_int_distribution<std::size_t> pick(0, maximizers.size() - 1);
        sel.block = std::move(maximizers[pick(*rng)]);
    } else {
        sel.block = std::move(best);
        sel.all_maximizers_zero_volume = sel.block.volume == 0;
    }
    return sel;
}

namespace {

ChainState apply_block(const ChainState& state, const Block& block) {
    ChainState next = state;
    const int fee_den = state.residuals.fee_denominator;
    for (const auto& [pair, paid] : block.realized) {
        AtomMap& residual = next.residuals.atoms[pair];
        for (const auto& [fee, amount] : paid) {
            next.cash[pair.from] -= amount;
            next.cash[pair.to] += (1 - ratio(fee, fee_den)) * amount;
            auto it = residual.find(fee);
            it->second -= amount;
            if (it->second == 0) residual.erase(it);
        }
        if (residual.empty()) next.residuals.atoms.erase(pair);
    }
    next.block = state.block + 1;
    return next;
}

}  // namespace

ChainState initial_state(const FinancialNetwork& network, const BidSchedule& bids) {
    ChainState state;
    state.cash = initial_cash(network);
    state.residuals = bids.residuals();
    return state;
}

std::pair<ChainState, Block> advance(const ChainState& state, std::size_t capacity, const ChainOptions& options,
                                     std::mt19937_64* rng) {
    if (state.residuals.empty()) return {state, Block{}};
    Selection sel = select_block(state, capacity, options, rng);
    ChainState next = apply_block(state, sel.block);
    return {std::move(next), std::move(sel.block)};
}

ChainTrace run_chain(const FinancialNetwork& network, const BidSchedule& bids, const ChainOptions& options) {
    ChainState state = initial_state(network, bids);
    std::optional<std::mt19937_64> rng;
    if (options.random_tie_seed) rng.emplace(*options.random_tie_seed);

    ChainTrace trace;
    trace.cash.push_back(state.cash);
    while (true) {
        if (state.residuals.empty()) {
            trace.reason = Termination::ResidualsExhausted;
            break;
        }
        if (trace.block_count >= options.max_blocks) {
            trace.reason = Termination::MaxBlocks;
            break;
        }
        Selection sel = select_block(state, network.block_capacity, options, rng ? &*rng : nullptr);
        ++trace.block_count;
        state = apply_block(state, sel.block);
        const Rational volume = sel.block.volume;
        if (options.record_blocks) {
            trace.blocks.push_back(std::move(sel.block));
            trace.cash.push_back(state.cash);
        }
        // Deterministic selection repeats a zero-volume block forever; with random
        // ties it only does so if no maximizer pays anything.
        if (volume == 0 && sel.all_maximizers_zero_volume) {
            trace.reason = Termination::ZeroPaymentFixedPoint;
            break;
        }
        if (volume > 0 && volume < options.volume_epsilon) {
            trace.reason = Termination::VolumeBelowEpsilon;
            break;
        }
    }
    if (!options.record_blocks && trace.block_count > 0) trace.cash.push_back(state.cash);
    trace.final_cash = state.cash;
    trace.final_residuals = state.residuals;
    return trace;
}

LimitingCash limiting_cash(const ChainTrace& trace) {
    LimitingCash out;
    out.cash = trace.final_cash;
    out.exact = trace.reason == Termination::ResidualsExhausted || trace.reason == Termination::ZeroPaymentFixedPoint;
    out.remaining_mass = trace.final_residuals.total();
    return out;
}

}  // namespace bcclear
