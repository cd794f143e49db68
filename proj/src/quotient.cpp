#include "fiwalk/quotient.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dense_eigen.hpp"
#include "fiwalk/errors.hpp"

namespace fiwalk {

int QuotientChain::disjoint_index() const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].pattern.num_matches() == 0) return static_cast<int>(i);
  throw InvariantViolation("quotient has no disjoint-labels state");
}

Tuple root_vertex(const FamilySpec& spec, int n) {
  if (n < spec.n_min())
    throw DomainError("n = " + std::to_string(n) + " is below n_min = " +
                      std::to_string(spec.n_min()) + " for " + spec.name());
  Tuple t(spec.k());
  std::iota(t.begin(), t.end(), 1);
  return canonical_tuple(spec, t);
}

std::vector<PairPattern> realizable_patterns(const FamilySpec& spec, int n) {
  PatternCanonicalizer patterns(spec.symmetry());
  std::vector<PairPattern> out;
  for (auto& p : patterns.all_canonical_patterns())
    if (n >= 2 * spec.k() - p.num_matches()) out.push_back(p);
  return out;
}

Integer class_size(const FamilySpec& spec, PatternCanonicalizer& patterns, const PairPattern& s,
                   int n) {
  const int k = spec.k();
  Integer tuples = Integer(static_cast<unsigned long>(patterns.orbit_size(s))) *
                   falling_factorial(n - k, k - s.num_matches());
  const Integer order(static_cast<unsigned long>(spec.symmetry().order()));
  if (tuples % order != 0) throw InvariantViolation("class count is not divisible by |H|");
  return tuples / order;
}

namespace {

// Lexicographically smallest tuple y with between(y, root) == p: matched
// coordinates take root labels, the rest take k+1, k+2, ... in order.
Tuple smallest_realization(const PairPattern& p, const Tuple& root) {
  const int k = p.k_left();
  Tuple y(k);
  int next = k + 1;
  for (int i = 0; i < k; ++i) y[i] = p.right_of(i) >= 0 ? root[p.right_of(i)] : next++;
  return y;
}

}  // namespace

QuotientChain build_orbit_walk(const FamilySpec& spec, int n, const Rational& laziness) {
  if (laziness < 0 || laziness >= 1) throw DomainError("laziness must lie in [0, 1)");
  const Tuple standard = root_vertex(spec, n);

  PatternCanonicalizer patterns(spec.symmetry());
  TupleCanonicalizer tuples(spec.symmetry());
  const auto weights = orbit_weights(spec, n);

  std::vector<OrbitState> states;
  std::map<PairPattern, int> index_of;
  for (auto& p : realizable_patterns(spec, n)) {
    OrbitState s;
    s.pattern = p;
    s.class_size = class_size(spec, patterns, p, n);
    Tuple best;
    for (const auto& member : patterns.orbit(p)) {
      Tuple y = tuples.canonical(smallest_realization(member, standard));
      if (best.empty() || y < best) best = y;
    }
    s.representative = best;
    index_of.emplace(p, static_cast<int>(states.size()));
    states.push_back(std::move(s));
  }
  const PairPattern identity = patterns.canonical(PairPattern::identity(spec.k()));
  if (!(states.front().pattern == identity))
    throw InvariantViolation("identity pattern is not the first quotient state");
  Integer num_vertices = 0;
  for (const auto& s : states) num_vertices += s.class_size;
  if (num_vertices != spec.vertex_count(n))
    throw InvariantViolation("class sizes sum to " + num_vertices.get_str() + ", expected " +
                             spec.vertex_count(n).get_str());

  const std::size_t m = states.size();
  std::vector<std::map<int, Rational>> raw(m);
  std::optional<Rational> degree;
  for (std::size_t a = 0; a < m; ++a) {
    Rational total = 0;
    for_each_neighbor(spec, patterns, tuples, n, states[a].representative,
                      [&](const Tuple& z, std::size_t e) {
                        if (weights[e] == 0) return;
                        const PairPattern& c = patterns.canonical(PairPattern::between(z, standard));
                        auto it = index_of.find(c);
                        if (it == index_of.end())
                          throw InvariantViolation("neighbor pattern " + c.to_string() +
                                                   " is not a quotient state");
                        raw[a][it->second] += weights[e];
                        total += weights[e];
                      });
    if (degree && *degree != total)
      throw InvariantViolation("instance is not regular: representatives have total weight " +
                               to_string(*degree) + " and " + to_string(total));
    degree = total;
  }
  if (!degree || *degree == 0) throw DomainError("instance has no edges at n = " + std::to_string(n));

  std::vector<std::string> labels;
  std::vector<SparseRow> rows(m);
  std::vector<Rational> pi;
  const Rational step = 1 - laziness;
  for (std::size_t a = 0; a < m; ++a) {
    labels.push_back(states[a].pattern.to_string());
    if (laziness > 0) raw[a][static_cast<int>(a)] += laziness * *degree / step;
    for (const auto& [b, w] : raw[a]) rows[a].emplace_back(b, Rational(step * w / *degree));
    Rational mass(states[a].class_size, num_vertices);
    mass.canonicalize();
    pi.push_back(mass);
  }
  return QuotientChain{Chain(std::move(labels), std::move(rows), std::move(pi), laziness, false),
                       n, std::move(states), 0, num_vertices, *degree};
}

LumpingReport verify_lumping(const FamilySpec& spec, int n, long t_max, const Rational& laziness,
                             std::size_t cap) {
  const GraphInstance g = instantiate_graph(spec, n, cap);
  const Chain full = build_simple_walk(g, laziness);
  const QuotientChain q = build_orbit_walk(spec, n, laziness);

  LumpingReport r;
  r.n = n;
  r.t_max = t_max;
  r.full_states = full.size();
  r.quotient_states = q.states.size();

  Tuple standard(spec.k());
  std::iota(standard.begin(), standard.end(), 1);
  PatternCanonicalizer patterns(spec.symmetry());
  std::map<PairPattern, Integer> counted;
  for (const auto& y : g.vertices()) counted[patterns.canonical(PairPattern::between(y, standard))] += 1;
  r.class_sizes_match = counted.size() == q.states.size();
  for (const auto& s : q.states) {
    auto it = counted.find(s.pattern);
    if (it == counted.end() || it->second != s.class_size) r.class_sizes_match = false;
  }
  if (!r.class_sizes_match)
    throw InvariantViolation("closed-form class sizes disagree with enumeration at n = " +
                             std::to_string(n));

  std::vector<int> rep_index;
  for (const auto& s : q.states) {
    int idx = g.index_of(s.representative);
    if (idx < 0) throw InvariantViolation("representative " + tuple_to_string(s.representative) +
                                          " is not a vertex");
    rep_index.push_back(idx);
  }
  const int x = g.index_of(root_vertex(spec, n));
  DistributionEvolution lhs(q.base, q.root_index), rhs(full, x);
  r.max_discrepancy = 0;
  for (long t = 0;; ++t) {
    for (std::size_t s = 0; s < q.states.size(); ++s) {
      Rational d = abs(lhs.probability(static_cast<int>(s)) -
                       q.states[s].class_size * rhs.probability(rep_index[s]));
      if (d > r.max_discrepancy) r.max_discrepancy = d;
    }
    if (t == t_max) break;
    lhs.step();
    rhs.step();
  }
  if (r.max_discrepancy != 0)
    throw InvariantViolation("lumping identity fails at n = " + std::to_string(n) +
                             " with discrepancy " + to_string(r.max_discrepancy));
  return r;
}

StabilityReport verify_state_stability(const FamilySpec& spec, int n_lo, int n_hi) {
  if (n_lo < spec.n_min() || n_hi <= n_lo)
    throw DomainError("state stability needs n_min <= n_lo < n_hi");
  StabilityReport r;
  r.n_lo = n_lo;
  r.n_hi = n_hi;
  const auto reference = realizable_patterns(spec, n_lo);
  r.state_count = reference.size();
  for (int n = n_lo + 1; n <= n_hi; ++n) {
    auto current = realizable_patterns(spec, n);
    if (current != reference) {
      r.stable = false;
      r.first_disagreement = n;
      r.detail = "state count " + std::to_string(reference.size()) + " at n = " +
                 std::to_string(n_lo) + " but " + std::to_string(current.size()) + " at n = " +
                 std::to_string(n);
      break;
    }
  }
  return r;
}

LimitingStationaryReport limiting_stationary(const FamilySpec& spec, std::vector<int> probes) {
  if (probes.empty()) throw DomainError("limiting_stationary needs at least one probe");
  std::sort(probes.begin(), probes.end());
  LimitingStationaryReport r;
  r.probes = probes;
  r.fitted_constant = 0;
  for (int n : probes) {
    QuotientChain q = build_orbit_walk(spec, n);
    std::vector<PairPattern> states;
    for (const auto& s : q.states) states.push_back(s.pattern);
    if (r.states.empty()) {
      r.states = states;
    } else if (states != r.states) {
      throw DomainError("quotient state set changes between probes at n = " + std::to_string(n));
    }
    r.stationary.push_back(q.base.stationary());
    Rational mass = q.base.stationary()[q.disjoint_index()];
    if (!r.disjoint_mass.empty() && mass <= r.disjoint_mass.back()) {
      r.monotone = false;
      r.detail = "disjoint-labels mass does not increase at n = " + std::to_string(n);
    }
    r.disjoint_mass.push_back(mass);
    Rational c = n * (1 - mass);
    if (c > r.fitted_constant) r.fitted_constant = c;
  }
  r.declared_limit.assign(r.states.size(), Rational(0));
  for (std::size_t i = 0; i < r.states.size(); ++i)
    if (r.states[i].num_matches() == 0) r.declared_limit[i] = 1;
  r.bound_holds = r.fitted_constant <= spec.k() * spec.k();
  if (!r.bound_holds && r.detail.empty())
    r.detail = "fitted constant " + to_string(r.fitted_constant) + " exceeds k^2";
  return r;
}

Spectrum lifted_spectrum(const QuotientChain& q, double tol) {
  const Chain& c = q.base;
  const long m = static_cast<long>(c.size());
  std::vector<double> root_pi(m);
  for (long i = 0; i < m; ++i) root_pi[i] = std::sqrt(c.stationary()[i].get_d());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
  for (long i = 0; i < m; ++i)
    for (const auto& [j, p] : c.rows()[i]) s(i, j) = root_pi[i] * p.get_d() / root_pi[j];
  const detail::SymmetricEigen solver = detail::symmetric_eigen(0.5 * (s + s.transpose()), true);

  const double vertices = q.num_vertices.get_d();
  std::vector<std::pair<double, double>> pairs;
  for (long k = 0; k < m; ++k) {
    const double v = solver.vectors(q.root_index, k);
    pairs.emplace_back(solver.values(k), vertices * v * v);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> values, weights;
  for (const auto& [v, w] : pairs) {
    values.push_back(v);
    weights.push_back(w);
  }
  Spectrum out = cluster_eigenvalues(values, weights, tol);

  // Recompute the raw weight per cluster to test integrality.
  std::size_t i = 0;
  for (std::size_t c_idx = 0; c_idx < out.eigenvalues.size(); ++c_idx) {
    double w = 0;
    std::size_t j = i;
    do {
      w += weights[j];
      ++j;
    } while (j < values.size() && values[j - 1] - values[j] <= tol);
    if (std::abs(w - std::round(w)) > 1e-6 * std::max(1.0, w) || std::round(w) < 1)
      throw InvariantViolation("lifted multiplicity " + std::to_string(w) + " of eigenvalue " +
                               std::to_string(out.eigenvalues[c_idx]) + " is not a positive integer");
    i = j;
  }
  if (out.dimension() != static_cast<long long>(std::llround(vertices)))
    throw InvariantViolation("lifted multiplicities sum to " + std::to_string(out.dimension()) +
                             ", expected " + q.num_vertices.get_str());
  if (std::abs(out.eigenvalues.front() - 1.0) > 10 * tol || out.multiplicities.front() != 1)
    throw InvariantViolation("leading lifted eigenvalue is not a simple 1");
  return out;
}

std::string quotient_to_json(const QuotientChain& q, const std::string& family_label) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["family"] = family_label;
  doc["n"] = q.n;
  doc["laziness"] = to_string(q.base.laziness());
  doc["num_vertices"] = q.num_vertices.get_str();
  ordered_json states = ordered_json::array();
  for (std::size_t i = 0; i < q.states.size(); ++i) {
    const auto& s = q.states[i];
    ordered_json matches = ordered_json::array();
    for (auto [a, b] : s.pattern.matches()) matches.push_back({a, b});
    states.push_back({{"index", i},
                      {"pattern", s.pattern.to_string()},
                      {"matches", matches},
                      {"class_size", s.class_size.get_str()},
                      {"representative", s.representative},
                      {"stationary", to_string(q.base.stationary()[i])}});
  }
  doc["states"] = states;
  ordered_json matrix = ordered_json::array();
  for (std::size_t i = 0; i < q.states.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < q.states.size(); ++j)
      row.push_back(to_string(q.base.entry(static_cast<int>(i), static_cast<int>(j))));
    matrix.push_back(row);
  }
  doc["transition"] = matrix;
  return doc.dump(2) + "\n";
}

}  // namespace fiwalk
