#pragma once

#include "bcclear/network.hpp"
#include "bcclear/rational.hpp"

#include <cstddef>
#include <vector>

namespace bcclear {

/// Which end of the fixed-point lattice an iteration starts from.
enum class Bound { Greatest, Least };

const char* to_string(Bound bound);

struct ClearingOptions {
    double tol = 1e-10;
    std::size_t max_iter = 10'000;
    /// Re-solve the converged default configuration exactly over the rationals.
    bool exact_refinement = true;
};

/// Clearing payments of the collateralized Eisenberg-Noe system with recovery.
struct CentralClearing {
    std::vector<Rational> payments;
    std::vector<Rational> net_worths;
    std::vector<bool> defaulting;
    Bound bound = Bound::Greatest;
    std::size_t iterations = 0;
    double residual = 0;
    bool exact = false;
};

/// Picard iteration of
///   p_i = mu pbar_i + (1-mu) pbar_i                 if assets_i >= (1-mu) pbar_i
///   p_i = mu pbar_i + alpha assets_i                otherwise,
/// with assets_i = x_i + Sum_j pi_ji p_j, started at pbar (greatest) or mu pbar (least).
CentralClearing clearing_payments(const FinancialNetwork& network, Bound bound, const ClearingOptions& options = {});

/// K_i = x_i + Sum_j pi_ji p_j - Sum_j L_ij.
std::vector<Rational> net_worths_centralized(const FinancialNetwork& network, const std::vector<Rational>& payments);

/// One application of the clearing map; exposed for tests.
std::vector<double> centralized_map(const FinancialNetwork& network, const std::vector<double>& payments);

}  // namespace bcclear
