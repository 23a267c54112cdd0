#pragma once

#include "bcclear/network.hpp"
#include "bcclear/rational.hpp"

#include <map>
#include <vector>

namespace bcclear {

/// Fee levels are stored as integer numerators over the fee denominator F.
using FeeNum = int;

/// The grid {0, 1/F, ..., 1}.
class FeeGrid {
public:
    explicit FeeGrid(int denominator);

    int denominator() const noexcept { return denominator_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(denominator_) + 1; }
    Rational value(FeeNum num) const { return ratio(num, denominator_); }
    bool contains(FeeNum num) const noexcept { return num >= 0 && num <= denominator_; }
    std::vector<Rational> levels() const;

private:
    int denominator_;
};

/// Dirac atoms: fee numerator -> amount. Zero amounts are never stored.
using AtomMap = std::map<FeeNum, Rational>;
using BidMap = std::map<Pair, AtomMap>;

Rational total_mass(const AtomMap& atoms);

enum class Tail { Strict, Inclusive };

/// Sum of amounts at fee levels > fee (Strict) or >= fee (Inclusive).
Rational tail_mass(const AtomMap& atoms, FeeNum fee, Tail kind);

/// As tail_mass with each atom weighted by (1 - fee/F).
Rational discounted_tail(const AtomMap& atoms, FeeNum fee, Tail kind, int fee_denominator);

/// Sum of fee * amount.
Rational fee_value(const AtomMap& atoms, int fee_denominator);

/// Atoms that need not be grid amounts, as left over after pro-rata payments.
struct ResidualBids {
    int fee_denominator = 1;
    BidMap atoms;

    const AtomMap& at(const Pair& pair) const;
    Rational total() const;
    bool empty() const noexcept { return atoms.empty(); }
    /// Pairs with positive residual, in lexicographic order.
    std::vector<Pair> active_pairs() const;

    friend bool operator==(const ResidualBids&, const ResidualBids&) = default;
};

/// Feasible discrete bids: every obligation with L_ij > 0 carries atoms on the
/// fee grid, amounts are multiples of 1/D, and they sum to (1 - mu) L_ij.
class BidSchedule {
public:
    BidSchedule() = default;

    int fee_denominator() const noexcept { return fee_denominator_; }
    const BidMap& entries() const noexcept { return entries_; }
    const AtomMap& at(const Pair& pair) const;

    Rational tail_mass(const Pair& pair, FeeNum fee, Tail kind) const;
    Rational discounted_tail(const Pair& pair, FeeNum fee, Tail kind) const;

    ResidualBids residuals() const { return {fee_denominator_, entries_}; }

    friend bool operator==(const BidSchedule&, const BidSchedule&) = default;

private:
    friend BidSchedule make_schedule(const FinancialNetwork&, const Discretization&, const BidMap&, bool);

    int fee_denominator_ = 1;
    BidMap entries_;
};

/// Validates and builds a schedule. With `pad_zero_fee`, any shortfall of an
/// obligation is placed at fee 0 instead of being rejected.
BidSchedule make_schedule(const FinancialNetwork& network, const Discretization& disc, const BidMap& entries,
                          bool pad_zero_fee = false);

using FeeAssignment = std::map<Pair, FeeNum>;

/// Full (1 - mu) L_ij at the assigned fee of every obligation.
BidSchedule all_or_nothing(const FinancialNetwork& network, const Discretization& disc,
                           const FeeAssignment& fees);

/// Every obligation at fee 0.
FeeAssignment zero_fee_assignment(const FinancialNetwork& network);

}  // namespace bcclear
