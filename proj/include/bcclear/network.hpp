#pragma once

#include "bcclear/matrix.hpp"
#include "bcclear/rational.hpp"

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace bcclear {

/// Ordered (payer, payee) pair of node indices.
struct Pair {
    std::size_t from = 0;
    std::size_t to = 0;

    friend auto operator<=>(const Pair&, const Pair&) = default;
};

std::string to_string(const Pair& pair);

/// Interbank obligations with collateral, recovery and fee parameters.
///
/// When `has_society` is set, node 0 is the external "society" node: it holds
/// claims on banks but owes nothing. It is otherwise an ordinary node.
struct FinancialNetwork {
    std::size_t node_count = 0;
    std::vector<Rational> cash;
    Matrix<Rational> liabilities;
    Rational collateral_level = 0;     // mu
    Rational recovery_rate = 1;        // alpha, centralized clearing only
    Rational rehypothecation_fee = 0;  // f_R
    std::size_t block_capacity = 1;
    bool has_society = false;

    /// Sum_k L_ik.
    Rational total_liabilities(std::size_t i) const;
    /// Sum_j L_ji.
    Rational total_claims(std::size_t i) const;
    /// (1 - mu) L_ij, the part of an obligation that must be bid for.
    Rational unsecured(std::size_t i, std::size_t j) const;

    /// Pairs with L_ij > 0, in (payer, payee) lexicographic order.
    std::vector<Pair> obligations() const;
    /// Pairs (j, i) with L_ji > 0, by payer.
    std::vector<Pair> incoming_obligations(std::size_t i) const;

    /// Copy with a different cash endowment vector.
    FinancialNetwork with_cash(std::vector<Rational> new_cash) const;
};

struct Discretization {
    long bid_denominator = 1;  // D
    int fee_denominator = 1;   // F
};

struct Violation {
    std::string rule;
    std::vector<std::size_t> indices;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool assumption1_ok = true;
    bool assumption2_ok = true;

    bool admissible() const noexcept { return violations.empty(); }
    std::vector<std::string> messages() const;
};

/// Structural checks plus the no-default-from-margins and bid-integrality assumptions.
ValidationReport validate(const FinancialNetwork& network, const Discretization& disc);

/// Throws ValidationError carrying the report's messages when not admissible.
void require_admissible(const FinancialNetwork& network, const Discretization& disc);

/// pi_ij = L_ij / Sum_k L_ik, rows of zeros for nodes without liabilities.
Matrix<Rational> relative_liabilities(const FinancialNetwork& network);

/// V_i^0 = x_i + mu Sum_j [(1 - f_R) L_ji - L_ij]. Throws ValidationError naming
/// the offending nodes when an entry is negative.
std::vector<Rational> initial_cash(const FinancialNetwork& network);

/// Same formula without the sign check.
std::vector<Rational> initial_cash_unchecked(const FinancialNetwork& network);

}  // namespace bcclear
