#include "bcclear/limit.hpp"

#include "bcclear/error.hpp"
#include "bcclear/linear_solve.hpp"

#include <algorithm>
#include <cmath>

namespace bcclear {

namespace {

template <class S>
S convert(const Rational& v);
template <>
Rational convert<Rational>(const Rational& v) {
    return v;
}
template <>
double convert<double>(const Rational& v) {
    return to_double(v);
}

template <class S>
struct Edge {
    std::size_t payee;
    std::vector<FeeNum> fees;  // ascending
    std::vector<S> amounts;
    std::vector<S> discounts;  // 1 - fee/F
};

template <class S>
struct Payer {
    std::vector<FeeNum> fees;  // aggregated over payees, ascending
    std::vector<S> masses;
    S unsecured_total{};
    std::vector<Edge<S>> edges;
};

// Flattened form of the terminal equation; S is double for iteration, Rational for verification.
template <class S>
struct Model {
    int fee_den = 1;
    std::vector<S> base;  // x_i - Sum_j L_ij + Sum_j mu (1 - f_R) L_ji
    std::vector<Payer<S>> payers;

    Model(const FinancialNetwork& network, const BidSchedule& bids) : fee_den(bids.fee_denominator()) {
        const std::size_t n = network.node_count;
        base.resize(n);
        payers.resize(n);
        const Rational collateral_in = network.collateral_level * (1 - network.rehypothecation_fee);
        for (std::size_t i = 0; i < n; ++i)
            base[i] = convert<S>(network.cash[i] - network.total_liabilities(i) + collateral_in * network.total_claims(i));
        for (std::size_t i = 0; i < n; ++i) {
            AtomMap aggregated;
            Payer<S>& payer = payers[i];
            for (std::size_t j = 0; j < n; ++j) {
                const AtomMap& atoms = bids.at({i, j});
                if (atoms.empty()) continue;
                Edge<S> edge{j, {}, {}, {}};
                for (const auto& [fee, amount] : atoms) {
                    edge.fees.push_back(fee);
                    edge.amounts.push_back(convert<S>(amount));
                    edge.discounts.push_back(convert<S>(1 - ratio(fee, fee_den)));
                    aggregated[fee] += amount;
                }
                payer.edges.push_back(std::move(edge));
            }
            Rational total = 0;
            for (const auto& [fee, mass] : aggregated) {
                payer.fees.push_back(fee);
                payer.masses.push_back(convert<S>(mass));
                total += mass;
            }
            payer.unsecured_total = convert<S>(total);
        }
    }

    std::size_t size() const { return base.size(); }

    // Threshold index into payer.fees (or fees.size() meaning "fee 0 with no atom at 0"),
    // returned as fee numerator plus the strict tail above it.
    std::pair<FeeNum, S> threshold(std::size_t i, const S& k) const {
        const Payer<S>& p = payers[i];
        const S assets = k + p.unsecured_total;
        S strict = p.unsecured_total;
        std::size_t pos = 0;
        if (!p.fees.empty() && p.fees[0] == 0) {
            strict -= p.masses[0];
            pos = 1;
        }
        if (strict <= assets) return {0, strict};
        for (; pos < p.fees.size(); ++pos) {
            strict -= p.masses[pos];
            if (strict <= assets) return {p.fees[pos], strict};
        }
        return {fee_den, S(0)};
    }

    S mass_at(std::size_t i, FeeNum fee) const {
        const Payer<S>& p = payers[i];
        auto it = std::lower_bound(p.fees.begin(), p.fees.end(), fee);
        if (it == p.fees.end() || *it != fee) return S(0);
        return p.masses[static_cast<std::size_t>(it - p.fees.begin())];
    }

    std::vector<S> apply(const std::vector<S>& k) const {
        std::vector<S> out = base;
        for (std::size_t j = 0; j < size(); ++j) {
            const Payer<S>& p = payers[j];
            if (p.edges.empty()) continue;
            if (k[j] >= 0) {
                for (const auto& e : p.edges)
                    for (std::size_t a = 0; a < e.fees.size(); ++a) out[e.payee] += e.discounts[a] * e.amounts[a];
                continue;
            }
            const auto [f, strict] = threshold(j, k[j]);
            const S atom = mass_at(j, f);
            S surplus = k[j] + p.unsecured_total - strict;
            if (surplus < 0) surplus = 0;
            for (const auto& e : p.edges) {
                for (std::size_t a = 0; a < e.fees.size(); ++a) {
                    if (e.fees[a] > f) {
                        out[e.payee] += e.discounts[a] * e.amounts[a];
                    } else if (e.fees[a] == f && atom > 0) {
                        out[e.payee] += e.discounts[a] * e.amounts[a] / atom * surplus;
                    }
                }
            }
        }
        return out;
    }
};

template <class S>
std::vector<S> upper_start(const Model<S>& m) {
    std::vector<S> k = m.base;
    for (const auto& p : m.payers)
        for (const auto& e : p.edges)
            for (std::size_t a = 0; a < e.fees.size(); ++a) k[e.payee] += e.discounts[a] * e.amounts[a];
    return k;
}

struct Configuration {
    std::vector<bool> solvent;
    std::vector<FeeNum> thresholds;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

Configuration configuration_of(const Model<Rational>& m, const std::vector<Rational>& k) {
    Configuration c;
    for (std::size_t i = 0; i < m.size(); ++i) {
        c.solvent.push_back(k[i] >= 0);
        c.thresholds.push_back(k[i] >= 0 ? 0 : m.threshold(i, k[i]).first);
    }
    return c;
}

// K = c + M K with the solvency pattern and thresholds held fixed.
std::optional<std::vector<Rational>> solve_configuration(const Model<Rational>& m, const Configuration& c) {
    const std::size_t n = m.size();
    Matrix<Rational> a(n, n, Rational(0));
    std::vector<Rational> b = m.base;
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1;
    for (std::size_t j = 0; j < n; ++j) {
        const Payer<Rational>& p = m.payers[j];
        if (p.edges.empty()) continue;
        if (c.solvent[j]) {
            for (const auto& e : p.edges)
                for (std::size_t x = 0; x < e.fees.size(); ++x) b[e.payee] += e.discounts[x] * e.amounts[x];
            continue;
        }
        const FeeNum f = c.thresholds[j];
        Rational strict = 0;
        for (std::size_t x = 0; x < p.fees.size(); ++x)
            if (p.fees[x] > f) strict += p.masses[x];
        const Rational atom = m.mass_at(j, f);
        for (const auto& e : p.edges) {
            for (std::size_t x = 0; x < e.fees.size(); ++x) {
                if (e.fees[x] > f) {
                    b[e.payee] += e.discounts[x] * e.amounts[x];
                } else if (e.fees[x] == f && atom > 0) {
                    const Rational coef = e.discounts[x] * e.amounts[x] / atom;
                    b[e.payee] += coef * (p.unsecured_total - strict);
                    a(e.payee, j) -= coef;
                }
            }
        }
    }
    return solve_exact(std::move(a), std::move(b));
}

}  // namespace

std::vector<Rational> TerminalClearing::cash() const {
    std::vector<Rational> out;
    for (const auto& k : net_worths) out.push_back(positive_part(k));
    return out;
}

FeeNum threshold_fee_terminal(const Rational& net_worth, const FinancialNetwork& network, const BidSchedule& bids,
                              std::size_t payer) {
    if (net_worth >= 0) return 0;
    const Model<Rational> m(network, bids);
    return m.threshold(payer, net_worth).first;
}

std::vector<Rational> terminal_map(const std::vector<Rational>& net_worths, const FinancialNetwork& network,
                                   const BidSchedule& bids) {
    const Model<Rational> m(network, bids);
    if (net_worths.size() != m.size()) throw ValidationError("net worth vector has the wrong dimension");
    return m.apply(net_worths);
}

std::vector<Rational> terminal_upper_start(const FinancialNetwork& network, const BidSchedule& bids) {
    return upper_start(Model<Rational>(network, bids));
}

std::vector<Rational> terminal_lower_start(const FinancialNetwork& network) {
    const std::size_t n = network.node_count;
    std::vector<Rational> k(n);
    const Rational collateral_in = network.collateral_level * (1 - network.rehypothecation_fee);
    for (std::size_t i = 0; i < n; ++i)
        k[i] = network.cash[i] - network.total_liabilities(i) + collateral_in * network.total_claims(i);
    return k;
}

TerminalClearing solve_terminal(const FinancialNetwork& network, const BidSchedule& bids, Bound bound,
                                const TerminalOptions& options) {
    const Model<double> md(network, bids);
    const std::size_t n = md.size();
    std::vector<double> k = bound == Bound::Greatest ? upper_start(md) : md.base;

    TerminalClearing result;
    result.bound = bound;
    double residual = 0;
    bool converged = n == 0;
    for (std::size_t it = 1; it <= options.max_iter && !converged; ++it) {
        auto next = md.apply(k);
        residual = 0;
        for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(next[i] - k[i]));
        k = std::move(next);
        result.iterations = it;
        converged = residual <= options.tol;
    }
    if (!converged)
        throw ConvergenceError("terminal net worths did not converge within " + std::to_string(options.max_iter) +
                                   " iterations",
                               k, residual, result.iterations);
    result.residual = residual;
    for (double v : k) result.net_worths.push_back(from_double(v));

    const Model<Rational> mq(network, bids);
    if (options.exact_refinement) {
        std::vector<Rational> guess = result.net_worths;
        for (std::size_t attempt = 0; attempt <= n; ++attempt) {
            const Configuration config = configuration_of(mq, guess);
            auto solved = solve_configuration(mq, config);
            if (!solved) break;
            if (mq.apply(*solved) == *solved) {
                result.net_worths = std::move(*solved);
                result.exact = true;
                break;
            }
            guess = std::move(*solved);
        }
    }

    result.shares = Matrix<Rational>(n, n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        const Rational& ki = result.net_worths[i];
        result.solvent.push_back(ki >= 0);
        const FeeNum f = ki >= 0 ? 0 : mq.threshold(i, ki).first;
        result.thresholds.push_back(f);
        const Rational atom = mq.mass_at(i, f);
        if (atom <= 0) continue;
        for (const auto& e : mq.payers[i].edges)
            for (std::size_t x = 0; x < e.fees.size(); ++x)
                if (e.fees[x] == f) result.shares(i, e.payee) = e.discounts[x] * e.amounts[x] / atom;
    }
    return result;
}

bool uniqueness_check(const FinancialNetwork& network) {
    const Rational collateral_in = network.collateral_level * (1 - network.rehypothecation_fee);
    for (std::size_t i = 0; i < network.node_count; ++i)
        if (network.cash[i] + collateral_in * network.total_claims(i) < 0) return false;
    return true;
}

ConsistencyReport consistency_check(const ChainTrace& trace, const TerminalClearing& terminal, double tol) {
    ConsistencyReport report;
    const LimitingCash limit = limiting_cash(trace);
    report.limiting_cash = limit.cash;
    report.terminal_cash = terminal.cash();
    report.trace_exact = limit.exact;
    if (report.limiting_cash.size() != report.terminal_cash.size()) return report;
    for (std::size_t i = 0; i < report.limiting_cash.size(); ++i) {
        const double gap = to_double(abs_value(report.limiting_cash[i] - report.terminal_cash[i]));
        report.gaps.push_back(gap);
        report.max_gap = std::max(report.max_gap, gap);
    }
    report.ok = report.max_gap <= tol;
    return report;
}

Rational equity_accounting_gap(const FinancialNetwork& network, const BidSchedule& bids,
                               const TerminalClearing& terminal) {
    const std::size_t n = network.node_count;
    const int fee_den = bids.fee_denominator();
    Rational lhs = 0;
    Rational rhs = 0;
    Rational all_liabilities = 0;
    for (std::size_t i = 0; i < n; ++i) {
        lhs += positive_part(terminal.net_worths[i]);
        rhs += network.cash[i];
        all_liabilities += network.total_liabilities(i);
    }
    rhs -= network.collateral_level * network.rehypothecation_fee * all_liabilities;
    for (std::size_t i = 0; i < n; ++i) {
        const FeeNum f = terminal.thresholds[i];
        const Rational fee = ratio(f, fee_den);
        Rational at_or_below = 0;
        Rational g = 0;
        for (std::size_t j = 0; j < n; ++j) {
            for (const auto& [level, amount] : bids.at({i, j})) {
                if (level > f) {
                    g += ratio(level, fee_den) * amount;
                } else {
                    at_or_below += amount;
                }
            }
        }
        // Surplus paid at the threshold; solvent banks have f = 0 so it adds nothing.
        g += fee * (terminal.net_worths[i] + at_or_below);
        rhs -= g;
    }
    return lhs - rhs;
}

}  // namespace bcclear
