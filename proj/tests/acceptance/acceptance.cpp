// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fiwalk/errors.hpp"
#include "fiwalk/hitting.hpp"
#include "fiwalk/quotient.hpp"
#include "fiwalk/stabilization.hpp"

using namespace fiwalk;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Family {
  std::string label;
  std::string name;
  std::vector<long> params;
  FamilySpec spec() const { return builtin_family(name, params); }
};

const std::vector<Family>& builtins() {
  static const std::vector<Family> f = {
      {"complete", "complete", {}},
      {"kneser-2", "kneser", {2}},
      {"johnson-2", "johnson", {2}},
      {"ordered-pair-weighted", "ordered-pair-weighted", {}},
      {"triple-replace-one", "triple-replace-one", {}},
      {"triple-permute-or-replace", "triple-permute-or-replace", {}},
      {"shift-register-3", "shift-register", {3}},
      {"triple-weighted", "triple-weighted", {}},
  };
  return f;
}

double floor_of(const std::string& name) {
  for (const auto& b : builtin_catalog())
    if (b.name == name) return b.product_floor;
  return kDefaultProductFloor;
}

SweepConfig sweep_config(int lo, int hi) {
  SweepConfig c;
  c.n_lo = lo;
  c.n_hi = hi;
  c.epsilons = {Rational(1, 4), Rational(1, 100)};
  c.alphas = {Rational(1, 8)};
  return c;
}

// Family sweeps over n = 10..40, shared by criteria 5, 7, 8, 10, 11, 12 and 13.
struct TailSweep {
  Family family;
  std::vector<SweepRecord> records;
  Verdict verdict;
};

const std::vector<TailSweep>& tail_sweeps() {
  static const std::vector<TailSweep> sweeps = [] {
    std::vector<TailSweep> out;
    const SweepConfig c = sweep_config(10, 40);
    for (const auto& f : builtins()) {
      const FamilySpec spec = f.spec();
      auto records = sweep(spec, c);
      Verdict v = build_verdict(f.label, records, c, floor_of(f.name), 2 * spec.k());
      out.push_back({f, std::move(records), std::move(v)});
    }
    return out;
  }();
  return sweeps;
}

const std::vector<SweepRecord>& complete_sweep() {
  static const std::vector<SweepRecord> r = sweep(builtin_family("complete", {}), sweep_config(3, 40));
  return r;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

// Full chains built for criteria 2 and 3, reused by the sandwich check.
std::vector<std::pair<std::string, Chain>>& full_chains() {
  static std::vector<std::pair<std::string, Chain>> chains;
  return chains;
}

Outcome criterion_1() {
  Outcome o;
  std::vector<std::pair<long, double>> pts;
  std::vector<std::string> rel_bad, mix_bad;
  for (const auto& r : complete_sweep()) {
    if (r.n < 5) continue;
    pts.emplace_back(r.n, r.t_rel);
    Rational q;
    if (!rationalize(r.t_rel, q) || q != Rational(r.n - 1, r.n - 2)) rel_bad.push_back(std::to_string(r.n));
    if (r.n >= 9 && (r.t_mix_at(Rational(1, 4)) != 1 || r.t_mix_at(Rational(1, 100)) != 1))
      mix_bad.push_back(std::to_string(r.n) + ":" + std::to_string(r.t_mix_at(Rational(1, 100))));
  }
  const FitReport fit = fit_rational_real(pts, 2);
  const bool fit_ok = fit.exact && fit.fitted == RationalFunction({-1, 1}, {-2, 1});
  std::ostringstream d;
  d << "t_rel fit " << fit.fitted.to_string() << (fit_ok ? " exact" : " WRONG");
  if (!rel_bad.empty()) d << ", t_rel off at n = " << join(rel_bad);
  if (mix_bad.empty())
    d << ", t_mix(1/4) = t_mix(1/100) = 1 for n = 9..40";
  else
    d << ", t_mix(1/100) != 1 at " << mix_bad.size() << " n in 9..40 (n:t_mix " << mix_bad.front()
      << " .. " << mix_bad.back() << "; one step leaves TV distance 1/n, so it needs n >= 100)";
  o.pass = fit_ok && rel_bad.empty() && mix_bad.empty();
  o.detail = d.str();
  return o;
}

Outcome criterion_2() {
  Outcome o;
  GraphInstance g = instantiate_graph(builtin_family("kneser", {2}), 5);
  Chain walk = build_simple_walk(g);
  const Spectrum s = spectrum(walk);

  // Oracle: dense eigendecomposition of the normalized adjacency of the
  // Petersen graph, built directly from disjointness of 2-subsets of {1..5}.
  std::vector<std::pair<int, int>> pairs;
  for (int a = 1; a <= 5; ++a)
    for (int b = a + 1; b <= 5; ++b) pairs.emplace_back(a, b);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const auto [a, b] = pairs[i];
      const auto [c, d] = pairs[j];
      if (a != c && a != d && b != c && b != d) m(i, j) = 1.0 / 3.0;
    }
  const Eigen::VectorXd oracle = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();

  const std::vector<double> expected_values{1.0, 1.0 / 3.0, -2.0 / 3.0};
  const std::vector<long long> expected_mult{1, 5, 4};
  bool ok = s.distinct() == 3;
  for (std::size_t i = 0; ok && i < 3; ++i)
    ok = std::abs(s.eigenvalues[i] - expected_values[i]) <= 1e-9 && s.multiplicities[i] == expected_mult[i];
  std::vector<double> ours;
  for (std::size_t i = 0; i < s.distinct(); ++i)
    for (long long j = 0; j < s.multiplicities[i]; ++j) ours.push_back(s.eigenvalues[i]);
  std::sort(ours.begin(), ours.end());
  bool oracle_ok = static_cast<long>(ours.size()) == oracle.size();
  for (std::size_t i = 0; oracle_ok && i < ours.size(); ++i)
    oracle_ok = std::abs(ours[i] - oracle(static_cast<Eigen::Index>(i))) <= 1e-9;
  const double t_rel = relaxation_time(s);
  o.pass = ok && oracle_ok && std::abs(t_rel - 3.0) <= 1e-9;
  std::ostringstream d;
  d << "spectrum";
  for (std::size_t i = 0; i < s.distinct(); ++i)
    d << " " << format_real(s.eigenvalues[i]) << " (x" << s.multiplicities[i] << ")";
  d << ", oracle " << (oracle_ok ? "agrees" : "DISAGREES") << ", t_rel " << format_real(t_rel);
  o.detail = d.str();
  full_chains().emplace_back("petersen", std::move(walk));
  return o;
}

struct Pair {
  Family family;
  int lo, hi;
};

const std::vector<Pair>& lumping_pairs() {
  static const std::vector<Pair> p = {
      {{"kneser-2", "kneser", {2}}, 5, 12},
      {{"complete", "complete", {}}, 5, 30},
      {{"triple-replace-one", "triple-replace-one", {}}, 7, 9},
  };
  return p;
}

Outcome criterion_3() {
  Outcome o;
  std::size_t compared = 0;
  std::vector<std::string> bad;
  for (const auto& p : lumping_pairs()) {
    const FamilySpec spec = p.family.spec();
    for (int n = p.lo; n <= p.hi; ++n) {
      GraphInstance g = instantiate_graph(spec, n);
      Chain full = build_simple_walk(g);
      const QuotientChain q = build_orbit_walk(spec, n);
      const int x = g.index_of(root_vertex(spec, n));
      for (const Rational& e : {Rational(1, 4), Rational(1, 10), Rational(1, 100)}) {
        ++compared;
        const long a = mixing_time(full, x, e), b = mixing_time(q.base, q.root_index, e);
        if (a != b)
          bad.push_back(p.family.label + " n = " + std::to_string(n) + " eps " + e.get_str() +
                        ": " + std::to_string(a) + " vs " + std::to_string(b));
      }
      full_chains().emplace_back(p.family.label + " n = " + std::to_string(n), std::move(full));
    }
  }
  o.pass = bad.empty();
  o.detail = std::to_string(compared) + " (family, n, eps) comparisons";
  if (!bad.empty()) o.detail += ", mismatches: " + join(bad);
  return o;
}

Outcome criterion_4() {
  Outcome o;
  std::size_t checked = 0;
  std::vector<std::string> bad;
  for (const auto& p : lumping_pairs()) {
    const FamilySpec spec = p.family.spec();
    for (int n = p.lo; n <= p.hi; ++n) {
      const LumpingReport r = verify_lumping(spec, n, 50);
      ++checked;
      if (r.max_discrepancy != 0 || !r.class_sizes_match)
        bad.push_back(p.family.label + " n = " + std::to_string(n) + " discrepancy " +
                      r.max_discrepancy.get_str());
    }
  }
  o.pass = bad.empty();
  o.detail = std::to_string(checked) + " instances, t <= 50, max discrepancy " +
             (bad.empty() ? std::string("0") : join(bad));
  return o;
}

Outcome criterion_5() {
  Outcome o;
  std::vector<std::string> parts;
  for (const auto& s : tail_sweeps()) {
    const FamilySpec spec = s.family.spec();
    const StabilityReport st = verify_state_stability(spec, 10, 40);
    const QuotientFitReport fits = fit_quotient_entries(s.records, 2 * spec.k());
    const bool ok = st.stable && s.verdict.quotient_states_stable && fits.all_exact();
    o.pass = o.pass && ok;
    parts.push_back(s.family.label + " " + std::to_string(s.records.front().quotient_states) +
                    " states, " + std::to_string(fits.exact) + "/" + std::to_string(fits.entries) +
                    " entries exact" + (ok ? "" : " FAIL"));
  }
  o.detail = "n = 10..40, degree <= 2k, last 3 n held out: " + join(parts, "; ");
  return o;
}

Outcome criterion_6() {
  Outcome o;
  std::vector<int> probes;
  for (int n = 5; n <= 40; ++n) probes.push_back(n);
  const LimitingStationaryReport r = limiting_stationary(builtin_family("kneser", {2}), probes);
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const long n = probes[i];
    Rational expected((n - 2) * (n - 3), n * (n - 1));
    expected.canonicalize();
    if (r.disjoint_mass[i] != expected) bad.push_back(std::to_string(n));
  }
  bool indicator_ok = r.declared_limit.size() == r.states.size();
  for (std::size_t i = 0; indicator_ok && i < r.states.size(); ++i)
    indicator_ok = r.declared_limit[i] == (r.states[i].num_matches() == 0 ? 1 : 0);
  const Rational& last = r.disjoint_mass.back();
  const bool above = last > Rational(9, 10);
  o.pass = bad.empty() && indicator_ok && above;
  o.detail = "disjoint mass equals (n-2)(n-3)/(n(n-1)) at n = 5..40" +
             std::string(bad.empty() ? "" : " except " + join(bad)) + ", mass(40) = " +
             last.get_str() + (above ? " > 0.9" : " <= 0.9") + ", limit indicator " +
             (indicator_ok ? "correct" : "WRONG");
  return o;
}

Chain six_cycle() {
  std::vector<std::string> names;
  std::vector<SparseRow> rows(6);
  for (int i = 0; i < 6; ++i) {
    names.push_back(std::to_string(i));
    rows[i] = {{(i + 5) % 6, Rational(1, 2)}, {(i + 1) % 6, Rational(1, 2)}};
    std::sort(rows[i].begin(), rows[i].end());
  }
  return Chain::from_rows(names, rows);
}

Outcome criterion_7() {
  Outcome o;
  std::size_t checked = 0;
  std::vector<std::string> bad;
  for (const auto& f : builtins()) {
    const FamilySpec spec = f.spec();
    for (int n = spec.n_min(); n < 10; ++n) {
      ++checked;
      if (bipartite_test(lifted_spectrum(build_orbit_walk(spec, n))))
        bad.push_back(f.label + " n = " + std::to_string(n));
    }
  }
  for (const auto& s : tail_sweeps())
    for (const auto& r : s.records) {
      ++checked;
      if (r.bipartite) bad.push_back(s.family.label + " n = " + std::to_string(r.n));
    }
  Chain cycle = six_cycle();
  const bool cycle_bipartite = bipartite_test(spectrum(cycle));
  full_chains().emplace_back("6-cycle", std::move(cycle));
  o.pass = bad.empty() && cycle_bipartite;
  o.detail = std::to_string(checked) + " (family, n) pairs from n_min to 40 non-bipartite" +
             (bad.empty() ? "" : " except " + join(bad)) + ", 6-cycle " +
             (cycle_bipartite ? "bipartite" : "NOT bipartite");
  return o;
}

Outcome criterion_8() {
  Outcome o;
  SweepConfig c = sweep_config(6, 14);
  std::vector<std::pair<long, Rational>> pts;
  for (const auto& r : sweep(builtin_family("kneser", {2}), c)) {
    std::size_t best = 1;
    for (std::size_t i = 1; i < r.spectrum.distinct(); ++i)
      if (std::abs(r.spectrum.eigenvalues[i]) > std::abs(r.spectrum.eigenvalues[best])) best = i;
    pts.emplace_back(r.n, Rational(static_cast<long>(r.spectrum.multiplicities[best])));
  }
  const FitReport k = fit_polynomial(pts);
  const bool kneser_ok = k.exact && k.fitted == RationalFunction({-1, 1}, {1}) &&
                         k.validation_n.size() == 2;
  std::vector<std::string> parts;
  bool all_grow = true;
  for (const auto& s : tail_sweeps()) {
    const auto& m = s.verdict.stabilization.second_branch_multiplicity;
    const bool grows = m.has_value() && m->exact && m->degree() >= 1;
    all_grow = all_grow && grows;
    parts.push_back(s.family.label + " " + (m ? m->fitted.to_string() : std::string("none")));
  }
  o.pass = kneser_ok && all_grow;
  o.detail = "kneser-2 n = 6..14 fit " + k.fitted.to_string() + (kneser_ok ? " exact" : " WRONG") +
             " (validated at " + std::to_string(k.validation_n.size()) + " n); " + join(parts, ", ");
  return o;
}

Outcome criterion_9() {
  Outcome o;
  std::vector<std::string> bad;
  // Oracle: KG(n,2) walk eigenvalues 1, -(n-3)/C(n-2,2), 1/C(n-2,2); K_n walk 1, -1/(n-1).
  for (const auto& r : sweep(builtin_family("kneser", {2}), sweep_config(5, 40))) {
    const double c = (r.n - 2.0) * (r.n - 3.0) / 2.0;
    std::vector<double> expected{1.0, 1.0 / c, -(r.n - 3.0) / c};
    std::sort(expected.rbegin(), expected.rend());
    bool ok = r.num_distinct_eigs == 3;
    for (std::size_t i = 0; ok && i < 3; ++i) ok = std::abs(r.spectrum.eigenvalues[i] - expected[i]) <= 1e-9;
    if (!ok) bad.push_back("kneser-2 n = " + std::to_string(r.n));
  }
  for (const auto& r : complete_sweep()) {
    const bool ok = r.num_distinct_eigs == 2 && std::abs(r.spectrum.eigenvalues[1] + 1.0 / (r.n - 1.0)) <= 1e-9;
    if (!ok) bad.push_back("complete n = " + std::to_string(r.n));
  }
  o.pass = bad.empty();
  o.detail = "kneser-2 has 3 distinct eigenvalues for n = 5..40, complete has 2 for n = 3..40" +
             std::string(bad.empty() ? "" : "; mismatches: " + join(bad));
  return o;
}

Outcome criterion_10() {
  Outcome o;
  std::size_t checked = 0;
  std::vector<std::string> bad;
  auto record_checks = [&](const std::string& label, const std::vector<SweepRecord>& records) {
    for (const auto& r : records) {
      checked += 2;
      for (const auto& v : r.bound_violations) bad.push_back(label + " " + v);
    }
  };
  record_checks("complete", complete_sweep());
  for (const auto& s : tail_sweeps()) record_checks(s.family.label, s.records);
  for (const auto& [label, chain] : full_chains()) {
    if (chain.support_bipartite()) continue;  // t_mix is infinite on a periodic chain
    for (const Rational& e : {Rational(1, 4), Rational(1, 100)}) {
      ++checked;
      try {
        verify_mixing_bounds(chain, e);
      } catch (const InvariantViolation& ex) {
        bad.push_back(label + ": " + ex.what());
      }
    }
  }
  o.pass = bad.empty();
  o.detail = std::to_string(checked) + " (chain, eps) sandwiches at eps 1/4 and 1/100" +
             std::string(bad.empty() ? " hold" : "; violations: " + join(bad));
  return o;
}

Chain random_chain(std::mt19937_64& rng, int m) {
  std::uniform_int_distribution<int> weight(1, 9);
  std::bernoulli_distribution edge(0.4);
  std::vector<std::vector<int>> w(m, std::vector<int>(m, 0));
  for (int i = 1; i < m; ++i) {
    const int p = std::uniform_int_distribution<int>(0, i - 1)(rng);
    w[i][p] = w[p][i] = weight(rng);
  }
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      if (edge(rng)) w[i][j] = w[j][i] = weight(rng);
  std::vector<std::string> names;
  std::vector<SparseRow> rows(m);
  for (int i = 0; i < m; ++i) {
    names.push_back(std::to_string(i));
    long total = 0;
    for (int j = 0; j < m; ++j) total += w[i][j];
    for (int j = 0; j < m; ++j)
      if (w[i][j] > 0) {
        Rational p(w[i][j], total);
        p.canonicalize();
        rows[i].emplace_back(j, p);
      }
  }
  return Chain::from_rows(names, rows);
}

Outcome criterion_11() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::size_t residual_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Chain c = random_chain(rng, std::uniform_int_distribution<int>(2, 10)(rng));
    std::vector<int> target(c.size());
    std::iota(target.begin(), target.end(), 0);
    std::shuffle(target.begin(), target.end(), rng);
    target.resize(std::uniform_int_distribution<std::size_t>(1, c.size())(rng));
    std::sort(target.begin(), target.end());
    const auto h = expected_hitting_times(c, target);
    for (std::size_t x = 0; x < c.size(); ++x) {
      Rational residual = h[x];
      if (!std::binary_search(target.begin(), target.end(), static_cast<int>(x))) {
        residual -= 1;
        for (const auto& [y, p] : c.rows()[x]) residual -= p * h[y];
      }
      if (residual != 0) ++residual_failures;
    }
  }
  std::vector<std::string> kn_bad;
  for (int n = 5; n <= 30; ++n) {
    const QuotientChain q = build_orbit_walk(builtin_family("complete", {}), n);
    const auto h = expected_hitting_times(q.base, {q.root_index});
    if (h[1] != n - 1) kn_bad.push_back(std::to_string(n));
  }
  std::vector<std::string> windows;
  bool windows_ok = true;
  for (const auto& s : tail_sweeps()) {
    const HittingWindowReport w = peres_sousi_window(s.records, Rational(1, 8), Rational(1, 4));
    windows_ok = windows_ok && w.ok;
    windows.push_back(s.family.label + " " + format_real(std::round(w.window * 100) / 100));
  }
  o.pass = residual_failures == 0 && kn_bad.empty() && windows_ok;
  o.detail = std::to_string(residual_failures) + " nonzero first-step residuals in 100 cases, K_n E[tau_root] = n-1 for n = 5..30" +
             std::string(kn_bad.empty() ? "" : " except " + join(kn_bad)) +
             ", t_mix(1/4)/t_hit(1/8) max/min over n = 10..40: " + join(windows);
  return o;
}

Outcome criterion_12() {
  Outcome o;
  std::vector<std::string> parts;
  for (const auto& s : tail_sweeps()) {
    const auto& p = s.verdict.product;
    const bool ok = p.violations.empty() && p.product_condition_failed && !s.verdict.cutoff_flag;
    o.pass = o.pass && ok;
    std::ostringstream d;
    d << s.family.label << " min r " << format_real(std::round(p.tail_min_r * 1000) / 1000)
      << " >= " << p.floor;
    if (!ok) d << " FAIL(" << join(p.violations) << (s.verdict.cutoff_flag ? " cutoff_flag" : "") << ")";
    parts.push_back(d.str());
  }
  o.detail = "t_mix/t_rel <= log(4|V|) at n = 10..40, product_condition_failed and no cutoff flag: " +
             join(parts, ", ");
  return o;
}

Outcome criterion_13() {
  Outcome o;
  std::vector<std::string> parts;
  const std::vector<std::string> unweighted{"kneser-2", "triple-replace-one",
                                            "triple-permute-or-replace", "shift-register-3"};
  for (const auto& s : tail_sweeps()) {
    if (std::find(unweighted.begin(), unweighted.end(), s.family.label) == unweighted.end()) continue;
    const int tail_start = s.records[s.records.size() / 2].n;
    bool constant = true;
    std::string ranges;
    for (const Rational& e : {Rational(1, 4), Rational(1, 100)}) {
      long lo = -1, hi = -1;
      for (std::size_t i = s.records.size() / 2; i < s.records.size(); ++i) {
        const long t = s.records[i].t_mix_at(e);
        lo = lo < 0 ? t : std::min(lo, t);
        hi = std::max(hi, t);
      }
      constant = constant && lo == hi;
      ranges += (ranges.empty() ? "" : ", ") + std::string("eps ") + e.get_str() + " " +
                std::to_string(lo) + (lo == hi ? "" : ".." + std::to_string(hi));
    }
    o.pass = o.pass && constant;
    parts.push_back(s.family.label + " " + (constant ? "constant" : "NOT constant") + " on n = " +
                    std::to_string(tail_start) + "..40 (" + ranges + ")");
  }
  for (const char* name : {"ordered-pair-weighted", "triple-weighted"}) {
    const GrowthReport g = mixing_growth(builtin_family(name, {}), {25, 30, 35, 40}, Rational(1, 4));
    o.pass = o.pass && g.within;
    const auto [mn, mx] = std::minmax_element(g.ratio.begin(), g.ratio.end());
    std::ostringstream d;
    d << name << " t_mix(2n)/t_mix(n) on n = 25..40 in [" << std::setprecision(3) << *mn << ", "
      << *mx << "]" << (g.within ? "" : " OUTSIDE [1.6, 2.4]");
    parts.push_back(d.str());
  }
  o.detail = join(parts, "; ");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      criterion_1, criterion_2,  criterion_3,  criterion_4,  criterion_5,  criterion_6, criterion_7,
      criterion_8, criterion_9,  criterion_10, criterion_11, criterion_12, criterion_13};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << (i + 1) << (o.pass ? " PASS: " : " FAIL: ") << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << " of " << criteria.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
