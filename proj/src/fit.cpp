#include "fiwalk/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiwalk/errors.hpp"
#include "fiwalk/linalg.hpp"

namespace fiwalk {

namespace {

Rational power(long n, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= n;
  return r;
}

// Ascending rational coefficients to a reduced integer-coefficient function.
RationalFunction make_function(const std::vector<Rational>& num, const std::vector<Rational>& den) {
  Integer l = 1;
  for (const auto* v : {&num, &den})
    for (const auto& c : *v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  auto scale = [&](const std::vector<Rational>& v) {
    std::vector<Integer> out;
    for (const auto& c : v) out.push_back(Rational(c * l).get_num());
    return out;
  };
  return RationalFunction(scale(num), scale(den));
}

bool reproduces(const RationalFunction& f, const std::vector<std::pair<long, Rational>>& points) {
  for (const auto& [n, y] : points) {
    try {
      if (f.evaluate(n) != y) return false;
    } catch (const std::domain_error&) {
      return false;
    }
  }
  return true;
}

double validation_error(const RationalFunction& f,
                        const std::vector<std::pair<long, Rational>>& validation) {
  double worst = 0;
  for (const auto& [n, y] : validation) {
    double v;
    try {
      v = f.evaluate(n).get_d();
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, std::abs(v - y.get_d()));
  }
  return worst;
}

void fill_points(FitReport& r, const std::vector<std::pair<long, Rational>>& train,
                 const std::vector<std::pair<long, Rational>>& validation) {
  for (const auto& [n, y] : train) {
    r.train_n.push_back(n);
    r.train_values.push_back(y.get_d());
  }
  for (const auto& [n, y] : validation) {
    r.validation_n.push_back(n);
    r.validation_values.push_back(y.get_d());
  }
}

void fill_points(FitReport& r, const std::vector<std::pair<long, double>>& points,
                 std::size_t held_out) {
  const std::size_t split = points.size() - held_out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    (i < split ? r.train_n : r.validation_n).push_back(points[i].first);
    (i < split ? r.train_values : r.validation_values).push_back(points[i].second);
  }
}

// Rationalizes every value, or returns false.
bool rationalize_all(const std::vector<std::pair<long, double>>& points,
                     std::vector<std::pair<long, Rational>>& out) {
  out.clear();
  for (const auto& [n, y] : points) {
    Rational q;
    if (!rationalize(y, q)) return false;
    out.emplace_back(n, q);
  }
  return true;
}

double max_error(const RationalFunction& f, const std::vector<std::pair<long, double>>& points) {
  double worst = 0;
  for (const auto& [n, y] : points) {
    double v;
    try {
      v = f.evaluate(n).get_d();
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, std::abs(v - y));
  }
  return worst;
}

}  // namespace

bool rationalize(double x, Rational& out, double tol, long max_den) {
  if (!std::isfinite(x)) return false;
  const double scale = std::max(1.0, std::abs(x));
  // Convergents h/k of the continued fraction of x.
  Integer h_prev = 1, h = static_cast<long>(std::floor(x));
  Integer k_prev = 0, k = 1;
  double rest = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    Rational candidate(h, k);
    const double err = std::abs(candidate.get_d() - x);
    const double kd = k.get_d();
    if (err <= tol * scale && err * kd * kd <= 1e-3 * scale) {
      out = candidate;
      out.canonicalize();
      return true;
    }
    if (rest < 1e-300) break;
    const double inv = 1.0 / rest;
    const double a = std::floor(inv);
    if (a > static_cast<double>(max_den)) break;
    rest = inv - a;
    const Integer ai = static_cast<long>(a);
    Integer h_next = ai * h + h_prev, k_next = ai * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return false;
}

FitReport fit_rational(const std::vector<std::pair<long, Rational>>& points, int max_deg) {
  if (max_deg < 0) throw DomainError("max_deg must be nonnegative");
  if (points.size() < static_cast<std::size_t>(2 * max_deg + 3))
    throw DomainError("fit_rational needs at least " + std::to_string(2 * max_deg + 3) +
                      " points, got " + std::to_string(points.size()));
  const std::vector<std::pair<long, Rational>> train(points.begin(), points.end() - 3);
  const std::vector<std::pair<long, Rational>> validation(points.end() - 3, points.end());

  FitReport best;
  best.model = FitModel::RationalFunction;
  best.max_validation_error = std::numeric_limits<double>::infinity();
  fill_points(best, train, validation);

  for (int total = 0; total <= 2 * max_deg; ++total) {
    for (int dn = std::min(total, max_deg); dn >= 0 && total - dn <= max_deg; --dn) {
      const int dd = total - dn;
      const std::size_t cols = static_cast<std::size_t>(dn + dd + 2);
      RationalMatrix a;
      for (const auto& [n, y] : train) {
        std::vector<Rational> row(cols);
        for (int i = 0; i <= dn; ++i) row[i] = power(n, i);
        for (int j = 0; j <= dd; ++j) row[dn + 1 + j] = -y * power(n, j);
        a.push_back(std::move(row));
      }
      for (const auto& v : nullspace_exact(a, cols)) {
        std::vector<Rational> num(v.begin(), v.begin() + dn + 1), den(v.begin() + dn + 1, v.end());
        if (std::all_of(den.begin(), den.end(), [](const Rational& c) { return c == 0; })) continue;
        RationalFunction f = make_function(num, den);
        if (!reproduces(f, train)) continue;
        const double err = validation_error(f, validation);
        if (reproduces(f, validation)) {
          best.fitted = f;
          best.exact = true;
          best.max_validation_error = 0;
          return best;
        }
        if (err < best.max_validation_error) {
          best.fitted = f;
          best.max_validation_error = err;
        }
      }
    }
  }
  best.note = "no rational function with degrees <= " + std::to_string(max_deg) +
              " reproduces the data";
  return best;
}

FitReport fit_rational_real(const std::vector<std::pair<long, double>>& points, int max_deg,
                            double tol) {
  if (points.size() < static_cast<std::size_t>(2 * max_deg + 3))
    throw DomainError("fit_rational needs at least " + std::to_string(2 * max_deg + 3) +
                      " points, got " + std::to_string(points.size()));
  std::vector<std::pair<long, Rational>> exact;
  FitReport r;
  if (rationalize_all(points, exact)) {
    r = fit_rational(exact, max_deg);
    r.train_n.clear();
    r.train_values.clear();
    r.validation_n.clear();
    r.validation_values.clear();
    if (r.exact) {
      const std::vector<std::pair<long, double>> validation(points.end() - 3, points.end());
      r.max_validation_error = max_error(r.fitted, validation);
      r.exact = max_error(r.fitted, points) <= tol;
    }
  }
  r.model = FitModel::RationalFunction;
  fill_points(r, points, 3);
  if (!r.exact) r.note = "algebraic, not rational-fit";
  return r;
}

FitReport fit_polynomial(const std::vector<std::pair<long, Rational>>& points) {
  if (points.size() < 5)
    throw DomainError("fit_polynomial needs at least 5 points, got " +
                      std::to_string(points.size()));
  const std::vector<std::pair<long, Rational>> train(points.begin(), points.end() - 2);
  const std::vector<std::pair<long, Rational>> validation(points.end() - 2, points.end());
  FitReport r;
  r.model = FitModel::Polynomial;
  fill_points(r, train, validation);

  // Newton form through the first d+1 training points, for increasing d.
  std::vector<Rational> diff;
  for (const auto& p : train) diff.push_back(p.second);
  Polynomial interpolant;
  Polynomial basis(std::vector<Rational>{Rational(1)});
  for (std::size_t d = 0; d < train.size(); ++d) {
    if (d > 0)
      for (std::size_t i = train.size() - 1; i >= d; --i)
        diff[i] = (diff[i] - diff[i - 1]) / (train[i].first - train[i - d].first);
    interpolant = interpolant + Polynomial({diff[d]}) * basis;
    basis = basis * Polynomial({Rational(-train[d].first), Rational(1)});
    RationalFunction f = RationalFunction::from_polynomials(interpolant, Polynomial({Rational(1)}));
    if (reproduces(f, train) && reproduces(f, validation)) {
      r.fitted = f;
      r.exact = true;
      r.max_validation_error = 0;
      return r;
    }
    r.fitted = f;
  }
  r.max_validation_error = validation_error(r.fitted, validation);
  r.note = "no polynomial through the training points reproduces the validation points";
  return r;
}

FitReport fit_polynomial_real(const std::vector<std::pair<long, double>>& points, double tol) {
  if (points.size() < 5)
    throw DomainError("fit_polynomial needs at least 5 points, got " +
                      std::to_string(points.size()));
  std::vector<std::pair<long, Rational>> exact;
  FitReport r;
  if (rationalize_all(points, exact)) {
    r = fit_polynomial(exact);
    r.train_n.clear();
    r.train_values.clear();
    r.validation_n.clear();
    r.validation_values.clear();
    if (r.exact) {
      const std::vector<std::pair<long, double>> validation(points.end() - 2, points.end());
      r.max_validation_error = max_error(r.fitted, validation);
      r.exact = max_error(r.fitted, points) <= tol;
    }
  } else {
    r.note = "values are not rational within tolerance";
  }
  r.model = FitModel::Polynomial;
  fill_points(r, points, 2);
  return r;
}

}  // namespace fiwalk
