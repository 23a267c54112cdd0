#pragma once
// Hand-rolled random instance generators for the property tests.

#include "bcclear/games.hpp"

#include <random>

namespace gen {

using namespace bcclear;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }
    template <class T>
    const T& pick(const std::vector<T>& values) {
        return values[static_cast<std::size_t>(integer(0, static_cast<long>(values.size()) - 1))];
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

struct NetworkShape {
    std::size_t max_nodes = 4;
    long max_bid_denominator = 4;
    int max_fee_denominator = 4;
    long max_units = 4;         // unsecured units of 1/D per obligation
    double density = 0.6;
    bool collateral = false;    // draw mu, f_R from small grids
    long max_cash_units = 6;    // cash in units of 1/D
};

struct Instance {
    FinancialNetwork network;
    Discretization disc;
};

// Random admissible network; liabilities are whole numbers of 1/D after the collateral haircut.
inline Instance random_network(Rng& rng, const NetworkShape& shape = {}) {
    while (true) {
        Instance inst;
        FinancialNetwork& net = inst.network;
        net.node_count = static_cast<std::size_t>(rng.integer(2, static_cast<long>(shape.max_nodes)));
        inst.disc.bid_denominator = rng.integer(1, shape.max_bid_denominator);
        inst.disc.fee_denominator = static_cast<int>(rng.integer(1, shape.max_fee_denominator));
        const long d = inst.disc.bid_denominator;
        if (shape.collateral) {
            net.collateral_level = rng.pick(std::vector<Rational>{0, ratio(1, 4), ratio(1, 2)});
            net.rehypothecation_fee = rng.pick(std::vector<Rational>{0, ratio(1, 10), ratio(1, 2)});
        }
        const Rational unsecured_share = 1 - net.collateral_level;
        net.liabilities = Matrix<Rational>(net.node_count, net.node_count, Rational(0));
        for (std::size_t i = 0; i < net.node_count; ++i)
            for (std::size_t j = 0; j < net.node_count; ++j)
                if (i != j && rng.chance(shape.density))
                    net.liabilities(i, j) = ratio(rng.integer(1, shape.max_units), d) / unsecured_share;
        for (std::size_t i = 0; i < net.node_count; ++i) net.cash.push_back(ratio(rng.integer(0, shape.max_cash_units), d));
        net.block_capacity = net.node_count * net.node_count;
        if (validate(net, inst.disc).admissible()) return inst;
    }
}

// Splits each unsecured obligation into random 1/D units over the fee grid.
inline BidSchedule random_bids(Rng& rng, const FinancialNetwork& net, const Discretization& disc) {
    BidMap entries;
    for (const Pair& pair : net.obligations()) {
        Rational units_q = net.unsecured(pair.from, pair.to) * disc.bid_denominator;
        const long units = units_q.get_num().get_si() / units_q.get_den().get_si();
        AtomMap& atoms = entries[pair];
        const bool lumped = rng.chance(0.4);
        const FeeNum lump_fee = static_cast<FeeNum>(rng.integer(0, disc.fee_denominator));
        for (long u = 0; u < units; ++u) {
            const FeeNum fee = lumped ? lump_fee : static_cast<FeeNum>(rng.integer(0, disc.fee_denominator));
            atoms[fee] += ratio(1, disc.bid_denominator);
        }
    }
    return make_schedule(net, disc, entries);
}

inline FeeAssignment random_fees(Rng& rng, const FinancialNetwork& net, const Discretization& disc) {
    FeeAssignment fees;
    for (const Pair& pair : net.obligations()) fees[pair] = static_cast<FeeNum>(rng.integer(0, disc.fee_denominator));
    return fees;
}

// Raises cash until everyone can pay everything at zero fees.
inline FinancialNetwork make_default_free(FinancialNetwork net) {
    const Rational collateral_in = net.collateral_level * (1 - net.rehypothecation_fee);
    for (std::size_t i = 0; i < net.node_count; ++i) {
        const Rational k = net.cash[i] + (collateral_in + (1 - net.collateral_level)) * net.total_claims(i) -
                           net.total_liabilities(i);
        if (k < 0) net.cash[i] -= k;
    }
    return net;
}

}  // namespace gen
