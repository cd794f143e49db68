#include "fiwalk/chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "dense_eigen.hpp"
#include "fiwalk/errors.hpp"

namespace fiwalk {

namespace {

const Rational* find_entry(const SparseRow& row, int col) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const std::pair<int, Rational>& e, int c) { return e.first < c; });
  return (it != row.end() && it->first == col) ? &it->second : nullptr;
}

}  // namespace

Chain::Chain(std::vector<std::string> states, std::vector<SparseRow> rows,
             std::vector<Rational> stationary, Rational laziness, bool transitive)
    : states_(std::move(states)),
      rows_(std::move(rows)),
      stationary_(std::move(stationary)),
      laziness_(std::move(laziness)),
      transitive_(transitive) {
  const std::size_t m = states_.size();
  if (m == 0) throw DomainError("chain with no states");
  if (rows_.size() != m || stationary_.size() != m)
    throw DomainError("chain: states, rows and stationary vector differ in length");
  if (laziness_ < 0 || laziness_ >= 1) throw DomainError("laziness must lie in [0, 1)");

  for (std::size_t i = 0; i < m; ++i) {
    auto& row = rows_[i];
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Rational sum = 0;
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (row[e].first < 0 || row[e].first >= static_cast<int>(m))
        throw DomainError("chain: column index out of range in row " + std::to_string(i));
      if (e > 0 && row[e].first == row[e - 1].first)
        throw DomainError("chain: duplicate column in row " + std::to_string(i));
      if (row[e].second < 0) throw InvariantViolation("negative transition probability");
      sum += row[e].second;
    }
    // Drop explicit zeros so the support graph is exact.
    row.erase(std::remove_if(row.begin(), row.end(), [](const auto& e) { return e.second == 0; }),
              row.end());
    if (sum != 1)
      throw InvariantViolation("row " + states_[i] + " sums to " + to_string(sum) + ", not 1");
  }

  Rational total = 0;
  for (const auto& p : stationary_) {
    if (p <= 0) throw InvariantViolation("stationary distribution has a nonpositive entry");
    total += p;
  }
  if (total != 1) throw InvariantViolation("stationary distribution sums to " + to_string(total));

  std::vector<Rational> image(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [j, p] : rows_[i]) image[j] += stationary_[i] * p;
  for (std::size_t j = 0; j < m; ++j)
    if (image[j] != stationary_[j])
      throw InvariantViolation("stationary vector is not fixed by P at state " + states_[j]);

  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [j, p] : rows_[i]) {
      const Rational* back = find_entry(rows_[j], static_cast<int>(i));
      Rational rhs = back ? stationary_[j] * *back : Rational(0);
      if (stationary_[i] * p != rhs)
        throw InvariantViolation("detailed balance fails between " + states_[i] + " and " +
                                 states_[j]);
    }

  denominator_ = 1;
  for (const auto& row : rows_)
    for (const auto& e : row)
      mpz_lcm(denominator_.get_mpz_t(), denominator_.get_mpz_t(), e.second.get_den_mpz_t());
  integer_rows_.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [j, p] : rows_[i])
      integer_rows_[i].emplace_back(j, Rational(p * denominator_).get_num());

  pi_den_ = 1;
  for (const auto& p : stationary_)
    mpz_lcm(pi_den_.get_mpz_t(), pi_den_.get_mpz_t(), p.get_den_mpz_t());
  for (const auto& p : stationary_) pi_num_.push_back(Rational(p * pi_den_).get_num());
}

Chain Chain::from_rows(std::vector<std::string> states, std::vector<SparseRow> rows,
                       Rational laziness, bool transitive) {
  const std::size_t m = states.size();
  if (rows.size() != m) throw DomainError("chain: states and rows differ in length");
  for (auto& row : rows)
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Rational> weight(m, Rational(0));
  std::vector<bool> reached(m, false);
  std::queue<int> frontier;
  weight[0] = 1;
  reached[0] = true;
  frontier.push(0);
  while (!frontier.empty()) {
    int x = frontier.front();
    frontier.pop();
    for (const auto& [y, p] : rows[x]) {
      if (p == 0 || reached[y]) continue;
      const Rational* back = find_entry(rows[y], x);
      if (!back || *back == 0)
        throw InvariantViolation("chain is not reversible: " + states[x] + " -> " + states[y] +
                                 " has no reverse transition");
      weight[y] = weight[x] * p / *back;
      reached[y] = true;
      frontier.push(y);
    }
  }
  if (std::find(reached.begin(), reached.end(), false) != reached.end())
    throw DomainError("chain is reducible");
  Rational total = 0;
  for (const auto& w : weight) total += w;
  for (auto& w : weight) w /= total;
  return Chain(std::move(states), std::move(rows), std::move(weight), std::move(laziness),
               transitive);
}

Rational Chain::entry(int i, int j) const {
  const Rational* p = find_entry(rows_[i], j);
  return p ? *p : Rational(0);
}

bool Chain::support_bipartite() const {
  std::vector<int> colour(size(), -1);
  for (std::size_t s = 0; s < size(); ++s) {
    if (colour[s] != -1) continue;
    colour[s] = 0;
    std::queue<int> frontier;
    frontier.push(static_cast<int>(s));
    while (!frontier.empty()) {
      int x = frontier.front();
      frontier.pop();
      for (const auto& [y, p] : rows_[x]) {
        if (colour[y] == -1) {
          colour[y] = 1 - colour[x];
          frontier.push(y);
        } else if (colour[y] == colour[x]) {
          return false;
        }
      }
    }
  }
  return true;
}

Chain build_simple_walk(const GraphInstance& instance, const Rational& laziness) {
  if (laziness < 0 || laziness >= 1) throw DomainError("laziness must lie in [0, 1)");
  const std::size_t m = instance.size();
  std::vector<std::string> states;
  std::vector<SparseRow> rows(m);
  const Rational step = 1 - laziness;
  for (std::size_t v = 0; v < m; ++v) {
    states.push_back(tuple_to_string(instance.vertices()[v]));
    for (const auto& nb : instance.neighbors(v))
      rows[v].emplace_back(nb.vertex,
                           Rational(step * instance.weights()[nb.orbit] / instance.degree_weight()));
    if (laziness > 0) rows[v].emplace_back(static_cast<int>(v), laziness);
  }
  std::vector<Rational> uniform(m, Rational(1, static_cast<unsigned long>(m)));
  return Chain(std::move(states), std::move(rows), std::move(uniform), laziness, true);
}

Rational tv_distance(const std::vector<Rational>& mu, const std::vector<Rational>& nu) {
  if (mu.size() != nu.size()) throw DomainError("tv_distance: distributions differ in length");
  Rational sum = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) sum += abs(mu[i] - nu[i]);
  return sum / 2;
}

// ---------------------------------------------------------------------------
// Exact evolution

DistributionEvolution::DistributionEvolution(const Chain& chain, int start)
    : chain_(&chain), v_(chain.size(), Integer(0)), scale_(1) {
  if (start < 0 || start >= static_cast<int>(chain.size()))
    throw DomainError("start state out of range");
  v_[start] = 1;
}

void DistributionEvolution::step() {
  std::vector<Integer> next(v_.size(), Integer(0));
  const auto& rows = chain_->integer_rows();
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (v_[i] == 0) continue;
    for (const auto& [j, a] : rows[i]) mpz_addmul(next[j].get_mpz_t(), v_[i].get_mpz_t(), a.get_mpz_t());
  }
  v_ = std::move(next);
  scale_ *= chain_->common_denominator();
  ++t_;
}

Rational DistributionEvolution::probability(int state) const {
  Rational q(v_[state], scale_);
  q.canonicalize();
  return q;
}

std::vector<Rational> DistributionEvolution::distribution() const {
  std::vector<Rational> out;
  out.reserve(v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) out.push_back(probability(static_cast<int>(i)));
  return out;
}

Integer DistributionEvolution::l1_numerator() const {
  const auto& p = chain_->stationary_numerators();
  const Integer& q = chain_->stationary_denominator();
  Integer sum = 0, term;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    term = v_[i] * q - p[i] * scale_;
    sum += abs(term);
  }
  return sum;
}

Rational DistributionEvolution::tv_to_stationary() const {
  Rational d(l1_numerator(), 2 * chain_->stationary_denominator() * scale_);
  d.canonicalize();
  return d;
}

bool DistributionEvolution::within(const Rational& eps) const {
  // sum / (2 Q D^t) <= a / b  <=>  b * sum <= 2 a Q D^t
  return eps.get_den() * l1_numerator() <=
         2 * eps.get_num() * chain_->stationary_denominator() * scale_;
}

namespace {

void require_aperiodic(const Chain& chain) {
  if (chain.laziness() == 0 && chain.size() > 1 && chain.support_bipartite())
    throw DomainError("chain is periodic (bipartite support); mixing times are undefined");
}

}  // namespace

MixingProfile mixing_profile(const Chain& chain, int start, long horizon) {
  MixingProfile profile;
  profile.start_state = start;
  profile.horizon = horizon;
  DistributionEvolution evo(chain, start);
  profile.distances.push_back(evo.tv_to_stationary());
  for (long t = 1; t <= horizon; ++t) {
    evo.step();
    profile.distances.push_back(evo.tv_to_stationary());
  }
  return profile;
}

std::vector<long> mixing_times(const Chain& chain, int start, const std::vector<Rational>& epsilons,
                               long horizon) {
  for (const auto& e : epsilons)
    if (e <= 0 || e >= 1) throw DomainError("epsilon must lie in (0, 1)");
  require_aperiodic(chain);
  std::vector<long> out(epsilons.size(), -1);
  std::size_t remaining = epsilons.size();
  DistributionEvolution evo(chain, start);
  while (remaining > 0) {
    for (std::size_t i = 0; i < epsilons.size(); ++i)
      if (out[i] < 0 && evo.within(epsilons[i])) {
        out[i] = evo.time();
        --remaining;
      }
    if (remaining == 0) break;
    if (evo.time() >= horizon)
      throw DomainError("mixing horizon of " + std::to_string(horizon) +
                        " steps exhausted without reaching epsilon");
    evo.step();
  }
  return out;
}

long mixing_time(const Chain& chain, int start, const Rational& epsilon, long horizon) {
  return mixing_times(chain, start, {epsilon}, horizon).front();
}

long worst_case_mixing_time(const Chain& chain, const Rational& epsilon, long horizon) {
  if (chain.transitive()) return mixing_time(chain, 0, epsilon, horizon);
  long worst = 0;
  for (std::size_t s = 0; s < chain.size(); ++s)
    worst = std::max(worst, mixing_time(chain, static_cast<int>(s), epsilon, horizon));
  return worst;
}

// ---------------------------------------------------------------------------
// Spectra

long long Spectrum::dimension() const {
  long long d = 0;
  for (auto m : multiplicities) d += m;
  return d;
}

std::vector<double> symmetric_eigenvalues(const Chain& chain) {
  const std::size_t m = chain.size();
  if (m > kDenseSpectrumCap)
    throw DomainError("dense spectrum requested for " + std::to_string(m) +
                      " states (cap " + std::to_string(kDenseSpectrumCap) + ")");
  std::vector<double> root_pi(m);
  for (std::size_t i = 0; i < m; ++i) root_pi[i] = std::sqrt(chain.stationary()[i].get_d());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<long>(m), static_cast<long>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [j, p] : chain.rows()[i]) s(i, j) = root_pi[i] * p.get_d() / root_pi[j];
  // Average with the transpose to remove rounding asymmetry.
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  const Eigen::VectorXd ev = detail::symmetric_eigen(sym, false).values;
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  std::sort(values.rbegin(), values.rend());
  return values;
}

Spectrum cluster_eigenvalues(const std::vector<double>& values, const std::vector<double>& weights,
                             double tol) {
  Spectrum s;
  s.cluster_tolerance = tol;
  std::size_t i = 0;
  while (i < values.size()) {
    double sum = 0, weight = 0;
    std::size_t j = i;
    do {
      sum += values[j] * weights[j];
      weight += weights[j];
      ++j;
    } while (j < values.size() && values[j - 1] - values[j] <= tol);
    double mean = 0;
    for (std::size_t t = i; t < j; ++t) mean += values[t];
    s.eigenvalues.push_back(weight > 0 ? sum / weight : mean / static_cast<double>(j - i));
    s.multiplicities.push_back(std::llround(weight));
    i = j;
  }
  return s;
}

Spectrum spectrum(const Chain& chain, double tol) {
  auto values = symmetric_eigenvalues(chain);
  Spectrum s = cluster_eigenvalues(values, std::vector<double>(values.size(), 1.0), tol);
  if (std::abs(s.eigenvalues.front() - 1.0) > 10 * tol)
    throw InvariantViolation("leading eigenvalue " + std::to_string(s.eigenvalues.front()) +
                             " is not 1");
  return s;
}

double second_eigenvalue_abs(const Spectrum& s) {
  if (s.dimension() <= 1) throw DomainError("spectrum of a single-state chain has no gap");
  double lambda = s.multiplicities.front() > 1 ? std::abs(s.eigenvalues.front()) : 0.0;
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i)
    lambda = std::max(lambda, std::abs(s.eigenvalues[i]));
  return std::min(lambda, 1.0);
}

double relaxation_time(const Spectrum& s) {
  double lambda = second_eigenvalue_abs(s);
  if (lambda >= 1.0 - 0.5 * s.cluster_tolerance) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - lambda);
}

bool bipartite_test(const Spectrum& s, double tol) {
  const std::size_t m = s.eigenvalues.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t mirror = m - 1 - i;
    if (std::abs(s.eigenvalues[i] + s.eigenvalues[mirror]) > tol) return false;
    if (s.multiplicities[i] != s.multiplicities[mirror]) return false;
  }
  return true;
}

MixingBoundsReport mixing_bounds(double t_rel, const Rational& pi_min, long t_mix,
                                 const Rational& epsilon) {
  MixingBoundsReport r;
  r.epsilon = epsilon;
  r.t_rel = t_rel;
  r.pi_min = pi_min;
  r.t_mix = t_mix;
  const double eps = epsilon.get_d();
  r.lower = (t_rel - 1.0) * std::log(1.0 / (2.0 * eps));
  r.upper = t_rel * std::log(1.0 / (eps * pi_min.get_d()));
  const double slack = 1e-9 * std::max(1.0, std::abs(r.upper));
  r.holds = r.lower <= static_cast<double>(t_mix) + slack &&
            static_cast<double>(t_mix) <= r.upper + slack;
  return r;
}

MixingBoundsReport verify_mixing_bounds(const Chain& chain, const Rational& epsilon) {
  const double t_rel = relaxation_time(spectrum(chain));
  const long t_mix = worst_case_mixing_time(chain, epsilon);
  const Rational pi_min = *std::min_element(chain.stationary().begin(), chain.stationary().end());
  MixingBoundsReport r = mixing_bounds(t_rel, pi_min, t_mix, epsilon);
  if (!r.holds)
    throw InvariantViolation("mixing-time sandwich fails: lower " + std::to_string(r.lower) +
                             ", t_mix " + std::to_string(t_mix) + ", upper " +
                             std::to_string(r.upper));
  return r;
}

}  // namespace fiwalk
