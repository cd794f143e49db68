#pragma once

// Exact interpolation of sequences indexed by n: rational functions and
// polynomials with held-out validation points.

#include <string>
#include <utility>
#include <vector>

#include "fiwalk/rational.hpp"

namespace fiwalk {

enum class FitModel { RationalFunction, Polynomial };

struct FitReport {
  FitModel model = FitModel::RationalFunction;
  RationalFunction fitted;  // polynomials have denominator 1
  std::vector<long> train_n;
  std::vector<double> train_values;
  std::vector<long> validation_n;
  std::vector<double> validation_values;
  bool exact = false;
  double max_validation_error = 0;
  std::string note;

  /// Numerator degree for polynomial fits; -1 for the zero polynomial.
  int degree() const { return fitted.numerator_degree(); }
};

/// Smallest-denominator continued-fraction convergent h/k within tol of x, with
/// k at most max_den and |x - h/k| k^2 <= 1e-3 (an isolated convergent, not one
/// of a slowly converging run). Returns false if none exists.
bool rationalize(double x, Rational& out, double tol = 1e-11, long max_den = 10000000);

/// Searches (d_num, d_den) with both <= max_deg in increasing total degree and
/// returns the first model reproducing every point exactly. The last three
/// points are held out. Needs at least 2 max_deg + 3 points.
FitReport fit_rational(const std::vector<std::pair<long, Rational>>& points, int max_deg);

/// Floating-point data: values are rationalized, fitted exactly, and the model
/// is accepted when it reproduces every value within tol. Otherwise the note
/// reads "algebraic, not rational-fit".
FitReport fit_rational_real(const std::vector<std::pair<long, double>>& points, int max_deg,
                            double tol = 1e-8);

/// Minimal-degree interpolating polynomial; the last two points are held out.
/// Needs at least 5 points.
FitReport fit_polynomial(const std::vector<std::pair<long, Rational>>& points);
FitReport fit_polynomial_real(const std::vector<std::pair<long, double>>& points,
                              double tol = 1e-6);

}  // namespace fiwalk
