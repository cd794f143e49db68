#include "fiwalk/rational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fiwalk {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return std::invalid_argument("not a rational number: '" + s + "'"); };
  if (s.empty()) throw bad();
  auto is_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  auto strip_plus = [](std::string t) { return (!t.empty() && t[0] == '+') ? t.substr(1) : t; };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (!is_int(a) || !is_int(b)) throw bad();
    Integer den(strip_plus(b));
    if (den == 0) throw bad();
    Rational q(Integer(strip_plus(a)), den);
    q.canonicalize();
    return q;
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !is_int(whole) || !is_int(frac) || frac[0] == '-' || frac[0] == '+')
      throw bad();
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Rational q(Integer(whole) * scale + Integer(frac), scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  if (!is_int(s)) throw bad();
  return Rational(Integer(strip_plus(s)));
}

double to_double(const Rational& q) { return q.get_d(); }

Integer falling_factorial(long n, long k) {
  Integer r = 1;
  for (long i = 0; i < k; ++i) r *= (n - i);
  return r;
}

Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

void Polynomial::divmod(const Polynomial& a, const Polynomial& b, Polynomial& quotient,
                        Polynomial& remainder) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> r = a.coeffs_;
  std::vector<Rational> q(a.degree() >= b.degree() ? a.degree() - b.degree() + 1 : 0,
                          Rational(0));
  const int db = b.degree();
  for (int d = a.degree(); d >= db; --d) {
    if (r[d] == 0) continue;
    Rational f = r[d] / b.leading();
    q[d - db] = f;
    for (int i = 0; i <= db; ++i) r[d - db + i] -= f * b.coeffs_[i];
  }
  quotient = Polynomial(std::move(q));
  remainder = Polynomial(std::move(r));
}

Polynomial Polynomial::gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  Rational lead = a.leading();
  for (auto& c : a.coeffs_) c /= lead;
  return a;
}

// ---------------------------------------------------------------------------
// RationalFunction

namespace {

std::vector<Integer> trimmed(std::vector<Integer> v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

Polynomial to_poly(const std::vector<Integer>& v) {
  std::vector<Rational> c;
  c.reserve(v.size());
  for (const auto& z : v) c.emplace_back(z);
  return Polynomial(std::move(c));
}

}  // namespace

RationalFunction::RationalFunction() : den_{Integer(1)} {}

RationalFunction::RationalFunction(std::vector<Integer> numerator,
                                   std::vector<Integer> denominator)
    : num_(trimmed(std::move(numerator))), den_(trimmed(std::move(denominator))) {
  if (den_.empty()) throw std::domain_error("rational function with zero denominator");
  reduce();
}

RationalFunction RationalFunction::constant(const Rational& c) {
  return RationalFunction({c.get_num()}, {c.get_den()});
}

RationalFunction RationalFunction::from_polynomials(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
  // Clear rational coefficients with a common multiplier.
  Integer l = 1;
  for (const auto& c : num.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  for (const auto& c : den.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> n, d;
  for (const auto& c : num.coeffs()) n.emplace_back(Rational(c * l).get_num());
  for (const auto& c : den.coeffs()) d.emplace_back(Rational(c * l).get_num());
  return RationalFunction(std::move(n), std::move(d));
}

void RationalFunction::reduce() {
  if (num_.empty()) {
    den_ = {Integer(1)};
    return;
  }
  if (den_.size() > 1) {
    Polynomial pn = to_poly(num_), pd = to_poly(den_);
    Polynomial g = Polynomial::gcd(pn, pd);
    if (g.degree() > 0) {
      Polynomial qn, qd, rem;
      Polynomial::divmod(pn, g, qn, rem);
      Polynomial::divmod(pd, g, qd, rem);
      RationalFunction r = from_polynomials(qn, qd);
      num_ = std::move(r.num_);
      den_ = std::move(r.den_);
      return;
    }
  }
  Integer content = 0;
  for (const auto& c : num_) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
  for (const auto& c : den_) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
  if (den_.back() < 0) content = -content;
  for (auto& c : num_) c /= content;
  for (auto& c : den_) c /= content;
}

Rational RationalFunction::evaluate(long n) const {
  Integer x(n), a = 0, b = 0;
  for (auto it = num_.rbegin(); it != num_.rend(); ++it) a = a * x + *it;
  for (auto it = den_.rbegin(); it != den_.rend(); ++it) b = b * x + *it;
  if (b == 0)
    throw std::domain_error("rational function " + to_string() + " has a pole at n = " +
                            std::to_string(n));
  Rational q(a, b);
  q.canonicalize();
  return q;
}

double RationalFunction::evaluate_double(double n) const {
  double a = 0, b = 0;
  for (auto it = num_.rbegin(); it != num_.rend(); ++it) a = a * n + it->get_d();
  for (auto it = den_.rbegin(); it != den_.rend(); ++it) b = b * n + it->get_d();
  return a / b;
}

std::string polynomial_to_string(const std::vector<Integer>& coeffs) {
  if (coeffs.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int d = static_cast<int>(coeffs.size()) - 1; d >= 0; --d) {
    const Integer& c = coeffs[d];
    if (c == 0) continue;
    Integer mag = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (d == 0 || mag != 1) out << mag.get_str();
    if (d >= 1) out << "n";
    if (d >= 2) out << "^" << d;
  }
  return out.str();
}

std::string RationalFunction::to_string() const {
  std::string n = polynomial_to_string(num_);
  if (den_.size() == 1 && den_[0] == 1) return n;
  auto wrap = [](const std::vector<Integer>& p, const std::string& s) {
    int terms = 0;
    for (const auto& c : p) terms += (c != 0);
    return terms > 1 ? "(" + s + ")" : s;
  };
  return wrap(num_, n) + "/" + wrap(den_, polynomial_to_string(den_));
}

}  // namespace fiwalk
