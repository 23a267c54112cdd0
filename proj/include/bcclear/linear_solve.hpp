#pragma once

#include "bcclear/matrix.hpp"
#include "bcclear/rational.hpp"

#include <optional>
#include <vector>

namespace bcclear {

/// Solves A x = b exactly by Gaussian elimination; nullopt when A is singular.
std::optional<std::vector<Rational>> solve_exact(Matrix<Rational> a, std::vector<Rational> b);

}  // namespace bcclear
