#include "bcclear/centralized.hpp"

#include "bcclear/error.hpp"
#include "bcclear/linear_solve.hpp"

#include <algorithm>
#include <cmath>

namespace bcclear {

const char* to_string(Bound bound) { return bound == Bound::Greatest ? "greatest" : "least"; }

namespace {

struct DoubleNetwork {
    std::size_t n;
    std::vector<double> cash;
    std::vector<double> pbar;
    Matrix<double> pi;
    double mu;
    double alpha;
};

DoubleNetwork to_double_network(const FinancialNetwork& network) {
    const std::size_t n = network.node_count;
    const auto pi = relative_liabilities(network);
    DoubleNetwork d{n, to_doubles(network.cash), {}, Matrix<double>(n, n, 0.0),
                    to_double(network.collateral_level), to_double(network.recovery_rate)};
    d.pbar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.pbar[i] = to_double(network.total_liabilities(i));
        for (std::size_t j = 0; j < n; ++j) d.pi(i, j) = to_double(pi(i, j));
    }
    return d;
}

std::vector<double> apply_map(const DoubleNetwork& d, const std::vector<double>& p) {
    std::vector<double> out(d.n);
    for (std::size_t i = 0; i < d.n; ++i) {
        double assets = d.cash[i];
        for (std::size_t j = 0; j < d.n; ++j) assets += d.pi(j, i) * p[j];
        const double unsecured = (1 - d.mu) * d.pbar[i];
        // Rounding must not push an exactly solvent bank into default: with alpha < 1
        // the map jumps there and the iteration would settle on a lower fixed point.
        const bool solvent = assets >= unsecured - 1e-12 * std::max(1.0, unsecured);
        out[i] = d.mu * d.pbar[i] + (solvent ? unsecured : d.alpha * assets);
    }
    return out;
}

// Default set from exact payments; ties at the boundary count as solvent.
std::vector<bool> classify(const FinancialNetwork& network, const Matrix<Rational>& pi,
                           const std::vector<Rational>& p) {
    const std::size_t n = network.node_count;
    std::vector<bool> defaulting(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        Rational assets = network.cash[i];
        for (std::size_t j = 0; j < n; ++j) assets += pi(j, i) * p[j];
        defaulting[i] = assets < (1 - network.collateral_level) * network.total_liabilities(i);
    }
    return defaulting;
}

std::optional<std::vector<Rational>> solve_configuration(const FinancialNetwork& network,
                                                         const Matrix<Rational>& pi,
                                                         const std::vector<bool>& defaulting) {
    const std::size_t n = network.node_count;
    Matrix<Rational> a(n, n, Rational(0));
    std::vector<Rational> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 1;
        const Rational pbar = network.total_liabilities(i);
        if (!defaulting[i]) {
            b[i] = pbar;
            continue;
        }
        b[i] = network.collateral_level * pbar + network.recovery_rate * network.cash[i];
        for (std::size_t j = 0; j < n; ++j) a(i, j) -= network.recovery_rate * pi(j, i);
    }
    return solve_exact(std::move(a), std::move(b));
}

}  // namespace

std::vector<double> centralized_map(const FinancialNetwork& network, const std::vector<double>& payments) {
    return apply_map(to_double_network(network), payments);
}

std::vector<Rational> net_worths_centralized(const FinancialNetwork& network, const std::vector<Rational>& payments) {
    const std::size_t n = network.node_count;
    if (payments.size() != n)
        throw ValidationError("payment vector has " + std::to_string(payments.size()) + " entries, expected " +
                              std::to_string(n));
    const auto pi = relative_liabilities(network);
    std::vector<Rational> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational v = network.cash[i] - network.total_liabilities(i);
        for (std::size_t j = 0; j < n; ++j) v += pi(j, i) * payments[j];
        k[i] = v;
    }
    return k;
}

CentralClearing clearing_payments(const FinancialNetwork& network, Bound bound, const ClearingOptions& options) {
    const auto d = to_double_network(network);
    std::vector<double> p(d.n);
    for (std::size_t i = 0; i < d.n; ++i) p[i] = bound == Bound::Greatest ? d.pbar[i] : d.mu * d.pbar[i];

    CentralClearing result;
    result.bound = bound;
    double residual = 0;
    bool converged = false;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        auto next = apply_map(d, p);
        residual = 0;
        for (std::size_t i = 0; i < d.n; ++i) residual = std::max(residual, std::abs(next[i] - p[i]));
        p = std::move(next);
        result.iterations = it;
        if (residual <= options.tol) {
            converged = true;
            break;
        }
    }
    if (d.n == 0) converged = true;
    if (!converged)
        throw ConvergenceError("centralized clearing did not converge within " + std::to_string(options.max_iter) +
                                   " iterations",
                               p, residual, result.iterations);
    result.residual = residual;

    result.payments.clear();
    for (double v : p) result.payments.push_back(from_double(v));

    if (options.exact_refinement) {
        const auto pi = relative_liabilities(network);
        if (bound == Bound::Greatest) {
            // Fictitious default sequence: default sets only grow, reaching the greatest vector in <= n rounds.
            std::vector<bool> defaulting(d.n, false);
            for (std::size_t round = 0; round <= d.n; ++round) {
                auto solved = solve_configuration(network, pi, defaulting);
                if (!solved) break;
                auto next = classify(network, pi, *solved);
                if (next == defaulting) {
                    result.payments = std::move(*solved);
                    result.exact = true;
                    break;
                }
                for (std::size_t i = 0; i < d.n; ++i) next[i] = next[i] || defaulting[i];
                defaulting = std::move(next);
            }
        } else {
            // From below, a tie that rounding reported as default is promoted on the next round.
            std::vector<Rational> guess = result.payments;
            for (std::size_t attempt = 0; attempt <= d.n; ++attempt) {
                const auto config = classify(network, pi, guess);
                auto solved = solve_configuration(network, pi, config);
                if (!solved) break;
                if (classify(network, pi, *solved) == config) {
                    result.payments = std::move(*solved);
                    result.exact = true;
                    break;
                }
                guess = std::move(*solved);
            }
        }
    }

    result.net_worths = net_worths_centralized(network, result.payments);
    const auto pi = relative_liabilities(network);
    result.defaulting = classify(network, pi, result.payments);
    return result;
}

}  // namespace bcclear
