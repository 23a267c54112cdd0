#pragma once

#include "bcclear/bids.hpp"
#include "bcclear/centralized.hpp"
#include "bcclear/engine.hpp"
#include "bcclear/matrix.hpp"
#include "bcclear/network.hpp"

#include <vector>

namespace bcclear {

struct TerminalOptions {
    double tol = 1e-10;
    std::size_t max_iter = 10'000;
    /// Re-solve the converged solvency/threshold configuration exactly.
    bool exact_refinement = true;
};

/// Terminal net worths of blockchain clearing with unbounded block capacity.
struct TerminalClearing {
    std::vector<Rational> net_worths;
    std::vector<FeeNum> thresholds;
    /// shares(i, j): fraction of i's surplus at its threshold fee credited to j, net of the fee.
    Matrix<Rational> shares;
    std::vector<bool> solvent;
    Bound bound = Bound::Greatest;
    std::size_t iterations = 0;
    double residual = 0;
    bool exact = false;

    std::vector<Rational> cash() const;
};

/// Smallest f in {0} ∪ atom fees of i with K_i + (1-mu) Sum_j L_ij >= strict
/// tail of i's outgoing bids above f. Equals 0 whenever K_i >= 0. Returns F when
/// no level is affordable, which admissible networks rule out.
FeeNum threshold_fee_terminal(const Rational& net_worth, const FinancialNetwork& network, const BidSchedule& bids,
                              std::size_t payer);

/// Right-hand side of the terminal fixed-point equation evaluated at K.
std::vector<Rational> terminal_map(const std::vector<Rational>& net_worths, const FinancialNetwork& network,
                                   const BidSchedule& bids);

/// Net worths when everyone pays in full (greatest start) and when only collateral arrives (least start).
std::vector<Rational> terminal_upper_start(const FinancialNetwork& network, const BidSchedule& bids);
std::vector<Rational> terminal_lower_start(const FinancialNetwork& network);

/// Monotone iteration of terminal_map from the upper or lower start.
TerminalClearing solve_terminal(const FinancialNetwork& network, const BidSchedule& bids, Bound bound,
                                const TerminalOptions& options = {});

/// x_i + mu (1 - f_R) Sum_j L_ji >= 0 for every i: greatest and least solutions agree.
bool uniqueness_check(const FinancialNetwork& network);

struct ConsistencyReport {
    std::vector<Rational> limiting_cash;
    std::vector<Rational> terminal_cash;
    std::vector<double> gaps;
    double max_gap = 0;
    bool trace_exact = false;
    bool ok = false;
};

/// Compares the chain's limiting cash with (K*)^+.
ConsistencyReport consistency_check(const ChainTrace& trace, const TerminalClearing& terminal, double tol);

/// Sum_i (K_i*)^+ against Sum_i x_i - mu f_R Sum_ij L_ij - Sum_i G_i(K_i*), where G_i is
/// the fee bank i pays to miners. Returns lhs - rhs.
Rational equity_accounting_gap(const FinancialNetwork& network, const BidSchedule& bids,
                               const TerminalClearing& terminal);

}  // namespace bcclear
