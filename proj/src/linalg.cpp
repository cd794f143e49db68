#include "fiwalk/linalg.hpp"

#include "fiwalk/errors.hpp"

namespace fiwalk {

std::vector<Rational> solve_exact(const RationalMatrix& a, const std::vector<Rational>& b) {
  const std::size_t m = a.size();
  if (b.size() != m) throw DomainError("solve_exact: dimension mismatch");
  if (m == 0) return {};

  // Clear denominators row by row, then work over Z on [A | b].
  std::vector<std::vector<Integer>> z(m, std::vector<Integer>(m + 1));
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != m) throw DomainError("solve_exact: matrix is not square");
    Integer l = b[i].get_den();
    for (const auto& x : a[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    for (std::size_t j = 0; j < m; ++j) z[i][j] = Rational(a[i][j] * l).get_num();
    z[i][m] = Rational(b[i] * l).get_num();
  }

  Integer prev = 1;
  for (std::size_t p = 0; p < m; ++p) {
    std::size_t pivot = p;
    while (pivot < m && z[pivot][p] == 0) ++pivot;
    if (pivot == m) throw InvariantViolation("singular linear system");
    if (pivot != p) std::swap(z[pivot], z[p]);
    for (std::size_t i = p + 1; i < m; ++i) {
      for (std::size_t j = p + 1; j <= m; ++j) {
        z[i][j] = z[p][p] * z[i][j] - z[i][p] * z[p][j];
        mpz_divexact(z[i][j].get_mpz_t(), z[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      z[i][p] = 0;
    }
    prev = z[p][p];
  }

  std::vector<Rational> x(m);
  for (std::size_t i = m; i-- > 0;) {
    Rational s = z[i][m];
    for (std::size_t j = i + 1; j < m; ++j) s -= z[i][j] * x[j];
    x[i] = s / z[i][i];
  }
  return x;
}

std::vector<std::vector<Rational>> nullspace_exact(RationalMatrix a, std::size_t columns) {
  const std::size_t rows = a.size();
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < columns && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    const Rational inv = 1 / a[r][c];
    for (std::size_t j = c; j < columns; ++j) a[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = c; j < columns; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  std::vector<bool> is_pivot(columns, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < columns; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(columns, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace fiwalk
