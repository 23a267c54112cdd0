#include "bcclear/bids.hpp"

#include "bcclear/error.hpp"

namespace bcclear {

namespace {

const AtomMap& empty_atoms() {
    static const AtomMap empty;
    return empty;
}

}  // namespace

FeeGrid::FeeGrid(int denominator) : denominator_(denominator) {
    if (denominator <= 0) throw ValidationError("fee denominator F must be positive");
}

std::vector<Rational> FeeGrid::levels() const {
    std::vector<Rational> out;
    for (FeeNum f = 0; f <= denominator_; ++f) out.push_back(value(f));
    return out;
}

Rational total_mass(const AtomMap& atoms) {
    Rational sum = 0;
    for (const auto& [fee, amount] : atoms) sum += amount;
    return sum;
}

Rational tail_mass(const AtomMap& atoms, FeeNum fee, Tail kind) {
    Rational sum = 0;
    auto it = kind == Tail::Strict ? atoms.upper_bound(fee) : atoms.lower_bound(fee);
    for (; it != atoms.end(); ++it) sum += it->second;
    return sum;
}

Rational discounted_tail(const AtomMap& atoms, FeeNum fee, Tail kind, int fee_denominator) {
    Rational sum = 0;
    auto it = kind == Tail::Strict ? atoms.upper_bound(fee) : atoms.lower_bound(fee);
    for (; it != atoms.end(); ++it) sum += (1 - ratio(it->first, fee_denominator)) * it->second;
    return sum;
}

Rational fee_value(const AtomMap& atoms, int fee_denominator) {
    Rational sum = 0;
    for (const auto& [fee, amount] : atoms) sum += ratio(fee, fee_denominator) * amount;
    return sum;
}

const AtomMap& ResidualBids::at(const Pair& pair) const {
    auto it = atoms.find(pair);
    return it == atoms.end() ? empty_atoms() : it->second;
}

Rational ResidualBids::total() const {
    Rational sum = 0;
    for (const auto& [pair, a] : atoms) sum += total_mass(a);
    return sum;
}

std::vector<Pair> ResidualBids::active_pairs() const {
    std::vector<Pair> out;
    for (const auto& [pair, a] : atoms)
        if (total_mass(a) > 0) out.push_back(pair);
    return out;
}

const AtomMap& BidSchedule::at(const Pair& pair) const {
    auto it = entries_.find(pair);
    return it == entries_.end() ? empty_atoms() : it->second;
}

Rational BidSchedule::tail_mass(const Pair& pair, FeeNum fee, Tail kind) const {
    return bcclear::tail_mass(at(pair), fee, kind);
}

Rational BidSchedule::discounted_tail(const Pair& pair, FeeNum fee, Tail kind) const {
    return bcclear::discounted_tail(at(pair), fee, kind, fee_denominator_);
}

BidSchedule make_schedule(const FinancialNetwork& network, const Discretization& disc, const BidMap& entries,
                          bool pad_zero_fee) {
    const FeeGrid grid(disc.fee_denominator);
    if (disc.bid_denominator <= 0) throw ValidationError("bid denominator D must be positive");
    std::vector<std::string> problems;

    BidSchedule schedule;
    schedule.fee_denominator_ = disc.fee_denominator;
    const std::size_t n = network.node_count;

    for (const auto& [pair, atoms] : entries) {
        if (pair.from >= n || pair.to >= n) {
            problems.push_back("pair " + to_string(pair) + " is outside the network");
            continue;
        }
        if (network.liabilities(pair.from, pair.to) <= 0 && total_mass(atoms) > 0)
            problems.push_back("pair " + to_string(pair) + " has bids but no obligation");
    }

    for (const Pair& pair : network.obligations()) {
        const Rational required = network.unsecured(pair.from, pair.to);
        AtomMap clean;
        if (auto it = entries.find(pair); it != entries.end()) {
            for (const auto& [fee, amount] : it->second) {
                if (!grid.contains(fee)) {
                    problems.push_back("pair " + to_string(pair) + ": fee numerator " + std::to_string(fee) +
                                       " is off the grid 0.." + std::to_string(disc.fee_denominator));
                    continue;
                }
                if (amount < 0) {
                    problems.push_back("pair " + to_string(pair) + ": negative amount at fee " + std::to_string(fee));
                    continue;
                }
                Rational units = amount * disc.bid_denominator;
                units.canonicalize();
                if (units.get_den() != 1)
                    problems.push_back("pair " + to_string(pair) + ": amount " + to_exact_string(amount) +
                                       " is not a multiple of 1/" + std::to_string(disc.bid_denominator));
                if (amount > 0) clean[fee] += amount;
            }
        }
        const Rational mass = total_mass(clean);
        if (mass < required && pad_zero_fee) {
            clean[0] += required - mass;
        } else if (mass != required) {
            problems.push_back("pair " + to_string(pair) + ": bids sum to " + to_exact_string(mass) +
                               " but feasibility requires (1-mu)L = " + to_exact_string(required));
        }
        if (!clean.empty()) schedule.entries_[pair] = std::move(clean);
    }

    if (!problems.empty()) throw ValidationError("infeasible bid schedule", problems);
    return schedule;
}

BidSchedule all_or_nothing(const FinancialNetwork& network, const Discretization& disc, const FeeAssignment& fees) {
    const FeeGrid grid(disc.fee_denominator);
    BidMap entries;
    std::vector<std::string> problems;
    for (const auto& [pair, fee] : fees) {
        if (!grid.contains(fee))
            problems.push_back("pair " + to_string(pair) + ": fee numerator " + std::to_string(fee) + " is off the grid");
    }
    for (const Pair& pair : network.obligations()) {
        auto it = fees.find(pair);
        if (it == fees.end()) {
            problems.push_back("pair " + to_string(pair) + " has no assigned fee");
            continue;
        }
        const Rational amount = network.unsecured(pair.from, pair.to);
        if (amount > 0) entries[pair][it->second] = amount;
    }
    if (!problems.empty()) throw ValidationError("invalid fee assignment", problems);
    return make_schedule(network, disc, entries);
}

FeeAssignment zero_fee_assignment(const FinancialNetwork& network) {
    FeeAssignment fees;
    for (const Pair& pair : network.obligations()) fees[pair] = 0;
    return fees;
}

}  // namespace bcclear
