#pragma once

// Exact arithmetic primitives: GMP integers/rationals and integer-coefficient
// rational functions of one variable n.

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace fiwalk {

using Integer = mpz_class;
using Rational = mpq_class;

/// "p/q", or "p" when q == 1.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Parses "p/q", "p", or a finite decimal such as "0.25" into an exact
/// rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

double to_double(const Rational& q);

Integer falling_factorial(long n, long k);
Integer binomial(long n, long k);

/// Dense polynomial with rational coefficients, ascending degree.
/// Only used as a working type for gcd/reduction and interpolation.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return coeffs_.empty(); }
  const Rational& leading() const { return coeffs_.back(); }

  Rational evaluate(const Rational& x) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b);

  /// Euclidean division; divisor must be nonzero.
  static void divmod(const Polynomial& a, const Polynomial& b, Polynomial& quotient,
                     Polynomial& remainder);
  static Polynomial gcd(Polynomial a, Polynomial b);  // monic, or zero

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// num(n) / den(n) with integer coefficients in lowest terms: no common
/// polynomial factor, coefficients jointly primitive, positive leading
/// denominator coefficient. The zero function is 0/1.
class RationalFunction {
 public:
  RationalFunction();  // the constant 0
  RationalFunction(std::vector<Integer> numerator, std::vector<Integer> denominator);
  static RationalFunction constant(const Rational& c);
  static RationalFunction from_polynomials(const Polynomial& num, const Polynomial& den);

  const std::vector<Integer>& numerator() const { return num_; }
  const std::vector<Integer>& denominator() const { return den_; }
  int numerator_degree() const { return static_cast<int>(num_.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(den_.size()) - 1; }
  bool is_zero() const { return num_.empty(); }

  /// Throws std::domain_error when the denominator vanishes at n.
  Rational evaluate(long n) const;
  double evaluate_double(double n) const;

  /// Human-readable form in the variable n, e.g. "(n - 1)/(n - 2)".
  std::string to_string() const;

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  void reduce();
  std::vector<Integer> num_;
  std::vector<Integer> den_;
};

std::string polynomial_to_string(const std::vector<Integer>& coeffs);

}  // namespace fiwalk
