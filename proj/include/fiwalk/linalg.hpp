#pragma once

// Small exact linear algebra over Q.

#include <vector>

#include "fiwalk/rational.hpp"

namespace fiwalk {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Solves A x = b for square nonsingular A by fraction-free (Bareiss)
/// elimination. Throws InvariantViolation if A is singular.
std::vector<Rational> solve_exact(const RationalMatrix& a, const std::vector<Rational>& b);

/// Basis of {x : A x = 0}, one vector per free column of the reduced row
/// echelon form (free entry set to 1).
std::vector<std::vector<Rational>> nullspace_exact(RationalMatrix a, std::size_t columns);

}  // namespace fiwalk
