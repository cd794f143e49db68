#include "fiwalk/hitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fiwalk/errors.hpp"
#include "fiwalk/linalg.hpp"

namespace fiwalk {

std::vector<Rational> expected_hitting_times(const Chain& chain, const std::vector<int>& target) {
  const std::size_t m = chain.size();
  if (target.empty()) throw DomainError("hitting target is empty");
  std::vector<bool> in_target(m, false);
  for (int a : target) {
    if (a < 0 || a >= static_cast<int>(m)) throw DomainError("hitting target out of range");
    in_target[a] = true;
  }
  std::vector<int> rest, slot(m, -1);
  for (std::size_t x = 0; x < m; ++x)
    if (!in_target[x]) {
      slot[x] = static_cast<int>(rest.size());
      rest.push_back(static_cast<int>(x));
    }
  RationalMatrix a(rest.size(), std::vector<Rational>(rest.size(), Rational(0)));
  for (std::size_t i = 0; i < rest.size(); ++i) {
    a[i][i] = 1;
    for (const auto& [y, p] : chain.rows()[rest[i]])
      if (slot[y] >= 0) a[i][slot[y]] -= p;
  }
  auto q = solve_exact(a, std::vector<Rational>(rest.size(), Rational(1)));
  std::vector<Rational> out(m, Rational(0));
  for (std::size_t i = 0; i < rest.size(); ++i) out[rest[i]] = q[i];
  return out;
}

namespace {

class HittingSearch {
 public:
  HittingSearch(const Chain& chain, const Rational& alpha) : chain_(chain), alpha_(alpha) {
    const std::size_t m = chain.size();
    p_ = Eigen::MatrixXd::Zero(static_cast<long>(m), static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (const auto& [j, v] : chain.rows()[i]) p_(i, j) = v.get_d();
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), 0);
    const auto& pi = chain.stationary();
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return pi[a] > pi[b]; });
    suffix_.assign(m + 1, Rational(0));
    for (std::size_t i = m; i-- > 0;) suffix_[i] = suffix_[i + 1] + pi[order_[i]];
    included_.assign(m, false);
  }

  void run() {
    search(0, Rational(0), std::numeric_limits<double>::infinity());
  }

  double best() const { return best_; }
  std::size_t leaves() const { return leaves_; }

  std::vector<std::vector<int>> candidates() const {
    std::vector<std::vector<int>> out;
    for (const auto& [value, set] : candidates_)
      if (value >= best_ - tolerance()) out.push_back(set);
    return out;
  }

 private:
  double tolerance() const { return 1e-9 * std::max(1.0, std::abs(best_)); }

  // max_x E_x[tau_S] for the currently included set S, in floating point.
  double worst_start_value() const {
    std::vector<int> rest;
    for (std::size_t x = 0; x < included_.size(); ++x)
      if (!included_[x]) rest.push_back(static_cast<int>(x));
    if (rest.empty()) return 0;
    const long r = static_cast<long>(rest.size());
    Eigen::MatrixXd a(r, r);
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < r; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - p_(rest[i], rest[j]);
    Eigen::VectorXd q = a.partialPivLu().solve(Eigen::VectorXd::Ones(r));
    return q.maxCoeff();
  }

  void search(std::size_t pos, const Rational& mass, double bound) {
    if (mass >= alpha_) {
      ++leaves_;
      if (bound >= best_ - tolerance()) {
        std::vector<int> set;
        for (std::size_t x = 0; x < included_.size(); ++x)
          if (included_[x]) set.push_back(static_cast<int>(x));
        candidates_.emplace_back(bound, std::move(set));
        if (bound > best_) {
          best_ = bound;
          std::erase_if(candidates_, [&](const auto& c) { return c.first < best_ - tolerance(); });
        }
      }
      return;
    }
    if (pos == order_.size() || mass + suffix_[pos] < alpha_) return;
    if (bound < best_ - tolerance()) return;

    const int x = order_[pos];
    included_[x] = true;
    const double with_x = worst_start_value();
    search(pos + 1, mass + chain_.stationary()[x], with_x);
    included_[x] = false;
    search(pos + 1, mass, bound);
  }

  const Chain& chain_;
  Rational alpha_;
  Eigen::MatrixXd p_;
  std::vector<int> order_;
  std::vector<Rational> suffix_;
  std::vector<bool> included_;
  double best_ = -1;
  std::size_t leaves_ = 0;
  std::vector<std::pair<double, std::vector<int>>> candidates_;
};

}  // namespace

HittingReport large_set_hitting_time(const Chain& chain, const Rational& alpha, std::size_t cap) {
  if (alpha <= 0 || alpha >= Rational(1, 2)) throw DomainError("alpha must lie in (0, 1/2)");
  if (chain.size() > cap)
    throw DomainError("large-set hitting search refused: " + std::to_string(chain.size()) +
                      " states exceed the cap of " + std::to_string(cap) +
                      "; use the quotient chain");
  HittingSearch search(chain, alpha);
  search.run();

  HittingReport report;
  report.alpha = alpha;
  report.minimal_sets_visited = search.leaves();
  bool first = true;
  for (const auto& set : search.candidates()) {
    const auto q = expected_hitting_times(chain, set);
    const auto it = std::max_element(q.begin(), q.end());
    if (first || *it > report.t_hit) {
      first = false;
      report.t_hit = *it;
      report.argmax_set = set;
      report.argmax_start = static_cast<int>(it - q.begin());
    }
  }
  if (first) throw InvariantViolation("no qualifying set found for alpha " + to_string(alpha));
  report.argmax_mass = 0;
  for (int a : report.argmax_set) report.argmax_mass += chain.stationary()[a];
  return report;
}

PeresSousiReport peres_sousi_ratio(long t_mix, const Rational& epsilon, const HittingReport& hit) {
  PeresSousiReport r;
  r.alpha = hit.alpha;
  r.epsilon = epsilon;
  r.t_mix = t_mix;
  r.t_hit = hit.t_hit;
  if (hit.t_hit == 0) {
    r.ratio = t_mix == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.note = t_mix == 0 ? "t_mix and t_hit both 0" : "degenerate: t_hit = 0 with t_mix > 0";
  } else {
    r.ratio = static_cast<double>(t_mix) / hit.t_hit.get_d();
    if (t_mix == 0) r.note = "chain is mixed at t = 0";
  }
  r.finite_positive = std::isfinite(r.ratio) && r.ratio > 0;
  return r;
}

PeresSousiReport peres_sousi_ratio(const Chain& chain, const Rational& alpha,
                                   const Rational& epsilon, int start, std::size_t cap) {
  if (alpha <= 0 || alpha >= Rational(1, 4)) throw DomainError("alpha must lie in (0, 1/4)");
  const long t_mix = start >= 0 ? mixing_time(chain, start, epsilon)
                                 : worst_case_mixing_time(chain, epsilon);
  return peres_sousi_ratio(t_mix, epsilon, large_set_hitting_time(chain, alpha, cap));
}

}  // namespace fiwalk
