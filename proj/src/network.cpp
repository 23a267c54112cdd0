#include "bcclear/network.hpp"

#include "bcclear/error.hpp"

#include <sstream>

namespace bcclear {

std::string to_string(const Pair& pair) {
    return "(" + std::to_string(pair.from) + "," + std::to_string(pair.to) + ")";
}

Rational FinancialNetwork::total_liabilities(std::size_t i) const {
    Rational sum = 0;
    for (std::size_t k = 0; k < node_count; ++k) sum += liabilities(i, k);
    return sum;
}

Rational FinancialNetwork::total_claims(std::size_t i) const {
    Rational sum = 0;
    for (std::size_t k = 0; k < node_count; ++k) sum += liabilities(k, i);
    return sum;
}

Rational FinancialNetwork::unsecured(std::size_t i, std::size_t j) const {
    return (1 - collateral_level) * liabilities(i, j);
}

std::vector<Pair> FinancialNetwork::obligations() const {
    std::vector<Pair> out;
    for (std::size_t i = 0; i < node_count; ++i)
        for (std::size_t j = 0; j < node_count; ++j)
            if (liabilities(i, j) > 0) out.push_back({i, j});
    return out;
}

std::vector<Pair> FinancialNetwork::incoming_obligations(std::size_t i) const {
    std::vector<Pair> out;
    for (std::size_t j = 0; j < node_count; ++j)
        if (liabilities(j, i) > 0) out.push_back({j, i});
    return out;
}

FinancialNetwork FinancialNetwork::with_cash(std::vector<Rational> new_cash) const {
    FinancialNetwork copy = *this;
    copy.cash = std::move(new_cash);
    return copy;
}

std::vector<std::string> ValidationReport::messages() const {
    std::vector<std::string> out;
    out.reserve(violations.size());
    for (const auto& v : violations) out.push_back(v.rule + ": " + v.message);
    return out;
}

namespace {

bool in_unit_interval(const Rational& v) { return v >= 0 && v <= 1; }

}  // namespace

ValidationReport validate(const FinancialNetwork& network, const Discretization& disc) {
    ValidationReport report;
    auto add = [&](std::string rule, std::vector<std::size_t> idx, std::string msg) {
        report.violations.push_back({std::move(rule), std::move(idx), std::move(msg)});
    };

    const std::size_t n = network.node_count;
    if (n == 0) add("dimension", {}, "network has no nodes");
    if (network.cash.size() != n)
        add("dimension", {}, "cash has " + std::to_string(network.cash.size()) + " entries, expected " +
                                 std::to_string(n));
    if (network.liabilities.rows() != n || network.liabilities.cols() != n) {
        add("dimension", {}, "liability matrix is not " + std::to_string(n) + "x" + std::to_string(n));
        report.assumption1_ok = false;
        report.assumption2_ok = false;
        return report;
    }

    for (std::size_t i = 0; i < network.cash.size(); ++i)
        if (network.cash[i] < 0) add("nonnegative-cash", {i}, "x_" + std::to_string(i) + " is negative");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (network.liabilities(i, j) < 0)
                add("nonnegative-liability", {i, j}, "L[" + std::to_string(i) + "][" + std::to_string(j) + "] is negative");
        }
        if (network.liabilities(i, i) != 0)
            add("self-obligation", {i}, "L_ii must be 0 for node " + std::to_string(i));
    }
    if (network.has_society && network.total_liabilities(0) != 0)
        add("society-outgoing", {0}, "society node 0 must not owe anything");

    if (!in_unit_interval(network.collateral_level)) add("parameter-range", {}, "mu must lie in [0,1]");
    if (!in_unit_interval(network.recovery_rate)) add("parameter-range", {}, "alpha must lie in [0,1]");
    if (!in_unit_interval(network.rehypothecation_fee)) add("parameter-range", {}, "f_R must lie in [0,1]");
    if (network.block_capacity == 0) add("block-capacity", {}, "block capacity must be positive");
    if (disc.bid_denominator <= 0 || disc.fee_denominator <= 0)
        add("discretization", {}, "D and F must be positive integers");

    if (network.cash.size() == n) {
        const auto v0 = initial_cash_unchecked(network);
        for (std::size_t i = 0; i < n; ++i) {
            if (v0[i] < 0) {
                report.assumption1_ok = false;
                add("assumption1", {i}, "initial cash V_" + std::to_string(i) + "^0 = " + to_exact_string(v0[i]) +
                                            " is negative after posting margins");
            }
        }
    }

    if (disc.bid_denominator > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (network.liabilities(i, j) <= 0) continue;
                Rational units = disc.bid_denominator * network.unsecured(i, j);
                units.canonicalize();
                if (units.get_den() != 1) {
                    report.assumption2_ok = false;
                    add("assumption2", {i, j},
                        "D(1-mu)L[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + to_exact_string(units) +
                            " is not an integer");
                }
            }
        }
    }
    return report;
}

void require_admissible(const FinancialNetwork& network, const Discretization& disc) {
    const auto report = validate(network, disc);
    if (!report.admissible()) throw ValidationError("network is not admissible", report.messages());
}

Matrix<Rational> relative_liabilities(const FinancialNetwork& network) {
    const std::size_t n = network.node_count;
    Matrix<Rational> pi(n, n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        const Rational total = network.total_liabilities(i);
        if (total <= 0) continue;
        for (std::size_t j = 0; j < n; ++j) pi(i, j) = network.liabilities(i, j) / total;
    }
    return pi;
}

std::vector<Rational> initial_cash_unchecked(const FinancialNetwork& network) {
    const std::size_t n = network.node_count;
    std::vector<Rational> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational margin = 0;
        for (std::size_t j = 0; j < n; ++j)
            margin += (1 - network.rehypothecation_fee) * network.liabilities(j, i) - network.liabilities(i, j);
        v[i] = network.cash[i] + network.collateral_level * margin;
    }
    return v;
}

std::vector<Rational> initial_cash(const FinancialNetwork& network) {
    auto v = initial_cash_unchecked(network);
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < 0) bad.push_back("node " + std::to_string(i) + ": V^0 = " + to_exact_string(v[i]));
    if (!bad.empty()) throw ValidationError("initial cash is negative (margin posting default)", bad);
    return v;
}

}  // namespace bcclear
