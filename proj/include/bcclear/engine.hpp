#pragma once

#include "bcclear/bids.hpp"
#include "bcclear/network.hpp"
#include "bcclear/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace bcclear {

struct ChainOptions {
    Rational volume_epsilon = ratio(1, 1'000'000'000'000);
    std::size_t max_blocks = 10'000;
    /// Largest number of candidate pair sets evaluated exactly per block.
    double enumeration_budget = 1e6;
    /// Beyond the budget, build blocks by greedy marginal fee instead of failing.
    bool greedy_fallback = false;
    /// Pick uniformly among fee-maximizing pair sets instead of the lexicographic minimum.
    std::optional<std::uint64_t> random_tie_seed;
    /// Keep every block and cash vector; off for bulk evaluations.
    bool record_blocks = true;
};

struct ChainState {
    std::size_t block = 0;
    std::vector<Rational> cash;
    ResidualBids residuals;
};

/// Realized payments of one candidate or accepted block.
struct Block {
    std::vector<Pair> pairs;
    BidMap realized;
    std::map<std::size_t, FeeNum> thresholds;
    Rational miner_fee = 0;
    /// Face value paid.
    Rational volume = 0;
};

enum class Termination { ResidualsExhausted, ZeroPaymentFixedPoint, VolumeBelowEpsilon, MaxBlocks };

const char* to_string(Termination reason);

struct ChainTrace {
    std::vector<Block> blocks;
    /// cash[0] = V^0, cash[t] after block t (only first and last when blocks are not recorded).
    std::vector<std::vector<Rational>> cash;
    std::vector<Rational> final_cash;
    ResidualBids final_residuals;
    std::size_t block_count = 0;
    Termination reason = Termination::ResidualsExhausted;
};

/// Lowest fee a payer with `cash` can support against `atoms` (residuals
/// aggregated over the payer's selected payees): the first level in
/// {0} ∪ atom fees whose strict upper tail fits in cash.
FeeNum threshold_fee_block(const AtomMap& atoms, const Rational& cash);

/// Miner-optimal payments restricted to `pairs`: atoms above each payer's
/// threshold in full, the threshold atom in full or pro rata on face value.
Block realized_block_bids(const ResidualBids& residuals, const std::vector<Rational>& cash,
                          const std::vector<Pair>& pairs);

struct Selection {
    Block block;
    std::size_t candidates_evaluated = 0;
    /// False when another maximizer could have realized positive volume.
    bool all_maximizers_zero_volume = true;
};

/// Fee-maximizing pair set of size min(|I|, capacity); ties go to the
/// lexicographically smallest set unless `rng` is given.
Selection select_block(const ChainState& state, std::size_t capacity, const ChainOptions& options = {},
                       std::mt19937_64* rng = nullptr);

/// One block: select, realize, update cash and residuals.
std::pair<ChainState, Block> advance(const ChainState& state, std::size_t capacity, const ChainOptions& options = {},
                                     std::mt19937_64* rng = nullptr);

ChainState initial_state(const FinancialNetwork& network, const BidSchedule& bids);

ChainTrace run_chain(const FinancialNetwork& network, const BidSchedule& bids, const ChainOptions& options = {});

struct LimitingCash {
    std::vector<Rational> cash;
    /// True when the trace ended at an exact fixed point.
    bool exact = false;
    Rational remaining_mass = 0;
};

LimitingCash limiting_cash(const ChainTrace& trace);

}  // namespace bcclear
