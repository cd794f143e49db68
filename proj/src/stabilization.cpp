#include "fiwalk/stabilization.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "fiwalk/errors.hpp"
#include "fiwalk/quotient.hpp"

namespace fiwalk {

std::vector<Rational> SweepConfig::all_epsilons() const {
  std::set<Rational> all(epsilons.begin(), epsilons.end());
  for (const auto& e : cutoff_grid) {
    all.insert(e);
    all.insert(1 - e);
  }
  all.insert(product_epsilon);
  return {all.begin(), all.end()};
}

long SweepRecord::t_mix_at(const Rational& eps) const {
  auto it = t_mix.find(eps);
  if (it == t_mix.end())
    throw DomainError("t_mix(" + to_string(eps) + ") was not swept at n = " + std::to_string(n));
  return it->second;
}

const HittingReport& SweepRecord::t_hit_at(const Rational& alpha) const {
  auto it = t_hit.find(alpha);
  if (it == t_hit.end())
    throw DomainError("t_hit(" + to_string(alpha) + ") was not swept at n = " + std::to_string(n));
  return it->second;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FIWALK_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream out;
  out << std::setprecision(15) << x;
  return out.str();
}

namespace {

std::size_t tail_start(std::size_t count) { return count / 2; }

bool same_spectrum(const Spectrum& a, const Spectrum& b, double tol) {
  if (a.distinct() != b.distinct()) return false;
  for (std::size_t i = 0; i < a.distinct(); ++i)
    if (std::abs(a.eigenvalues[i] - b.eigenvalues[i]) > tol ||
        a.multiplicities[i] != b.multiplicities[i])
      return false;
  return true;
}

void check_against_full_graph(const FamilySpec& spec, const SweepConfig& config,
                              const std::vector<Rational>& eps, SweepRecord& r) {
  const GraphInstance g = instantiate_graph(spec, r.n, config.cap_states);
  const Chain full = build_simple_walk(g, config.laziness);
  const Spectrum fs = spectrum(full);
  if (!same_spectrum(fs, r.spectrum, 1e-6))
    throw InvariantViolation("full-graph spectrum (" + std::to_string(fs.distinct()) +
                             " distinct values) differs from the lifted quotient spectrum (" +
                             std::to_string(r.spectrum.distinct()) + ")");
  if (bipartite_test(fs) != r.bipartite)
    throw InvariantViolation("bipartite test differs between full chain and quotient");
  const int x = g.index_of(root_vertex(spec, r.n));
  const auto full_times = mixing_times(full, x, eps);
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (full_times[i] != r.t_mix.at(eps[i]))
      throw InvariantViolation("t_mix(" + to_string(eps[i]) + ") is " +
                               std::to_string(full_times[i]) + " on the full chain but " +
                               std::to_string(r.t_mix.at(eps[i])) + " on the orbit walk");
  verify_lumping(spec, r.n, config.lumping_steps, config.laziness, config.cap_states);
  r.full_graph_checked = true;
}

SweepRecord sweep_one(const FamilySpec& spec, int n, const SweepConfig& config,
                      const std::vector<Rational>& eps) {
  SweepRecord r;
  r.n = n;
  const QuotientChain q = build_orbit_walk(spec, n, config.laziness);
  r.num_vertices = q.num_vertices;
  r.degree_weight = q.degree_weight;
  r.quotient_states = q.states.size();
  r.state_labels = q.base.states();
  r.quotient_matrix.assign(q.states.size(), std::vector<Rational>(q.states.size(), Rational(0)));
  for (std::size_t a = 0; a < q.states.size(); ++a)
    for (const auto& [b, p] : q.base.rows()[a]) r.quotient_matrix[a][b] = p;

  r.spectrum = lifted_spectrum(q);
  r.num_distinct_eigs = r.spectrum.distinct();
  r.bipartite = bipartite_test(r.spectrum);
  r.lambda2_abs = second_eigenvalue_abs(r.spectrum);
  r.t_rel = relaxation_time(r.spectrum);

  const auto times = mixing_times(q.base, q.root_index, eps);
  for (std::size_t i = 0; i < eps.size(); ++i) r.t_mix[eps[i]] = times[i];
  for (const auto& alpha : config.alphas)
    r.t_hit.emplace(alpha, large_set_hitting_time(q.base, alpha, config.cap_hitting));

  Rational pi_min(Integer(1), q.num_vertices);
  pi_min.canonicalize();
  for (const auto& e : eps) {
    MixingBoundsReport b = mixing_bounds(r.t_rel, pi_min, r.t_mix[e], e);
    if (!b.holds)
      r.bound_violations.push_back("n = " + std::to_string(n) + ", eps = " + to_string(e) +
                                   ": sandwich " + format_real(b.lower) + " <= " +
                                   std::to_string(b.t_mix) + " <= " + format_real(b.upper) +
                                   " fails");
  }

  if (q.num_vertices <= config.cap_states) check_against_full_graph(spec, config, eps, r);
  return r;
}

[[noreturn]] void rethrow_with_n(std::exception_ptr error, int n) {
  const std::string where = "at n = " + std::to_string(n) + ": ";
  try {
    std::rethrow_exception(error);
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(where + e.what());
  } catch (const SpecError& e) {
    throw SpecError(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + e.what());
  }
}

}  // namespace

std::vector<SweepRecord> sweep(const FamilySpec& spec, const SweepConfig& config) {
  if (config.n_hi < config.n_lo) return {};
  if (config.n_lo < spec.n_min())
    throw DomainError("n range starts at " + std::to_string(config.n_lo) + ", below n_min = " +
                      std::to_string(spec.n_min()) + " for " + spec.name());
  for (const auto& e : config.all_epsilons())
    if (e <= 0 || e >= 1) throw DomainError("epsilon " + to_string(e) + " is outside (0, 1)");
  for (const auto& a : config.alphas)
    if (a <= 0 || a >= Rational(1, 2))
      throw DomainError("alpha " + to_string(a) + " is outside (0, 1/2)");
  if (config.cap_states == 0 || config.cap_hitting == 0)
    throw DomainError("caps must be positive");
  if (config.n_hi > config.n_lo) {
    StabilityReport st = verify_state_stability(spec, config.n_lo, config.n_hi);
    if (!st.stable)
      throw DomainError("quotient state set is not stable on the sweep (first change at n = " +
                        std::to_string(*st.first_disagreement) + "): " + st.detail);
  }

  const auto eps = config.all_epsilons();
  const std::size_t count = static_cast<std::size_t>(config.n_hi - config.n_lo + 1);
  std::vector<std::optional<SweepRecord>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = sweep_one(spec, config.n_lo + static_cast<int>(i), config, eps);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(resolve_workers(config.workers),
                                              static_cast<unsigned>(count));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<SweepRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) rethrow_with_n(errors[i], config.n_lo + static_cast<int>(i));
    out.push_back(std::move(*results[i]));
  }
  return out;
}

StabilizationReport stabilization_report(const std::vector<SweepRecord>& records,
                                         int max_fit_degree) {
  if (records.size() < 8)
    throw DomainError("stabilization report needs at least 8 records, got " +
                      std::to_string(records.size()));
  StabilizationReport rep;
  const std::size_t h = tail_start(records.size());
  rep.tail_start_n = records[h].n;
  const std::size_t final_count = records.back().num_distinct_eigs;
  rep.stable = std::all_of(records.begin() + static_cast<long>(h), records.end(),
                           [&](const SweepRecord& r) { return r.num_distinct_eigs == final_count; });
  std::size_t first = records.size() - 1;
  while (first > 0 && records[first - 1].num_distinct_eigs == final_count) --first;
  rep.first_stable_n = records[first].n;
  if (!rep.stable) {
    rep.detail = "distinct-eigenvalue count varies on the tail n >= " +
                 std::to_string(rep.tail_start_n);
    return rep;
  }
  rep.stable_count = final_count;

  for (std::size_t j = h; j + 1 < records.size() && rep.tracking_ok; ++j) {
    const auto& a = records[j].spectrum.eigenvalues;
    const auto& b = records[j + 1].spectrum.eigenvalues;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < a.size(); ++i) gap = std::min(gap, a[i] - a[i + 1]);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(b[i] - a[i]) > 0.5 * gap) {
        rep.tracking_ok = false;
        rep.tracking_note = "branch " + std::to_string(i) + " moves by more than half the " +
                            "smallest gap between n = " + std::to_string(records[j].n) +
                            " and n = " + std::to_string(records[j + 1].n);
        break;
      }
  }

  const std::size_t tail = records.size() - h;
  rep.fit_degree = std::max(0, std::min(max_fit_degree, static_cast<int>(tail) / 2 - 2));
  if (static_cast<int>(tail) < 2 * rep.fit_degree + 3) rep.fit_degree = 0;
  if (rep.tracking_ok && tail >= 3) {
    for (std::size_t i = 0; i < final_count; ++i) {
      BranchFit bf;
      bf.index = i;
      std::vector<std::pair<long, double>> values;
      std::vector<std::pair<long, Rational>> mults;
      for (std::size_t j = h; j < records.size(); ++j) {
        values.emplace_back(records[j].n, records[j].spectrum.eigenvalues[i]);
        mults.emplace_back(records[j].n, Rational(static_cast<long>(records[j].spectrum.multiplicities[i])));
      }
      if (values.size() >= static_cast<std::size_t>(2 * rep.fit_degree + 3))
        bf.value_fit = fit_rational_real(values, rep.fit_degree);
      if (mults.size() >= 5) bf.multiplicity_fit = fit_polynomial(mults);
      rep.branches.push_back(std::move(bf));
    }
  }

  std::vector<std::pair<long, Rational>> second;
  for (std::size_t j = h; j < records.size(); ++j) {
    const Spectrum& s = records[j].spectrum;
    std::size_t best = 0;
    double best_abs = -1;
    for (std::size_t i = 1; i < s.distinct(); ++i)
      if (std::abs(s.eigenvalues[i]) > best_abs + 1e-12) {
        best_abs = std::abs(s.eigenvalues[i]);
        best = i;
      }
    if (best > 0) second.emplace_back(records[j].n, Rational(static_cast<long>(s.multiplicities[best])));
  }
  if (second.size() >= 5) rep.second_branch_multiplicity = fit_polynomial(second);
  return rep;
}

ProductConditionReport product_condition_diagnostic(const std::vector<SweepRecord>& records,
                                                    const Rational& epsilon, double floor) {
  if (records.empty()) throw DomainError("product-condition diagnostic needs a nonempty sweep");
  ProductConditionReport rep;
  rep.epsilon = epsilon;
  rep.floor = floor;
  const std::size_t h = tail_start(records.size());
  rep.tail_min_r = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < records.size(); ++j) {
    const SweepRecord& rec = records[j];
    const long t = rec.t_mix_at(epsilon);
    const double bound = std::log(4.0 * rec.num_vertices.get_d());
    if (t == 0) {
      rep.notes.push_back("n = " + std::to_string(rec.n) + ": t_mix = 0, ratio undefined");
      continue;
    }
    const double r = rec.t_rel / static_cast<double>(t);
    const double s = static_cast<double>(t) / rec.t_rel;
    rep.n.push_back(rec.n);
    rep.r.push_back(r);
    rep.s.push_back(s);
    rep.bound.push_back(bound);
    if (s > bound * (1 + 1e-12))
      rep.violations.push_back("n = " + std::to_string(rec.n) + ": t_mix/t_rel = " +
                               format_real(s) + " exceeds log(4|V|) = " + format_real(bound));
    if (j >= h) rep.tail_min_r = std::min(rep.tail_min_r, r);
  }
  rep.floor_holds = std::isfinite(rep.tail_min_r) && rep.tail_min_r >= floor;
  rep.product_condition_failed = rep.floor_holds;
  if (!rep.floor_holds)
    rep.violations.push_back("tail minimum of t_rel/t_mix is " + format_real(rep.tail_min_r) +
                             ", below the floor " + format_real(floor));
  return rep;
}

CutoffProfile cutoff_profile(const std::vector<SweepRecord>& records, const Rational& eps_small) {
  if (eps_small <= 0 || eps_small >= Rational(1, 2))
    throw DomainError("cutoff profile needs eps_small in (0, 1/2)");
  CutoffProfile c;
  c.eps_small = eps_small;
  if (records.empty()) return c;
  const Rational eps_large = 1 - eps_small;
  for (const auto& rec : records) {
    const long a = rec.t_mix_at(eps_small), b = rec.t_mix_at(eps_large);
    if (b == 0) {
      c.excluded.push_back(rec.n);
      continue;
    }
    c.n.push_back(rec.n);
    c.ratio.push_back(static_cast<double>(a) / static_cast<double>(b));
  }
  const std::size_t h = tail_start(records.size());
  c.eventually_constant = true;
  for (const auto& [eps, value] : records.back().t_mix)
    for (std::size_t j = h; j < records.size(); ++j)
      if (records[j].t_mix_at(eps) != value) c.eventually_constant = false;

  if (!c.ratio.empty()) {
    c.tail_ratio = c.ratio.back();
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < c.n.size(); ++i)
      if (c.n[i] >= records[h].n && c.ratio[i + 1] > c.ratio[i]) decreasing = false;
    c.cutoff_consistent = !c.eventually_constant && decreasing && c.tail_ratio <= 1.05;
  }
  if (c.eventually_constant) {
    c.classification = "eventually constant mixing";
  } else if (c.cutoff_consistent) {
    c.classification = "cutoff-consistent";
  } else {
    c.classification = "no cutoff: tail ratio " + format_real(c.tail_ratio);
  }
  return c;
}

HittingWindowReport peres_sousi_window(const std::vector<SweepRecord>& records,
                                       const Rational& alpha, const Rational& epsilon) {
  HittingWindowReport w;
  w.alpha = alpha;
  w.epsilon = epsilon;
  w.finite_positive = !records.empty();
  w.min_ratio = std::numeric_limits<double>::infinity();
  w.max_ratio = 0;
  for (const auto& rec : records) {
    const PeresSousiReport p = peres_sousi_ratio(rec.t_mix_at(epsilon), epsilon, rec.t_hit_at(alpha));
    w.n.push_back(rec.n);
    w.ratio.push_back(p.ratio);
    if (!p.finite_positive) w.finite_positive = false;
    w.min_ratio = std::min(w.min_ratio, p.ratio);
    w.max_ratio = std::max(w.max_ratio, p.ratio);
  }
  w.window = w.min_ratio > 0 ? w.max_ratio / w.min_ratio : std::numeric_limits<double>::infinity();
  w.ok = w.finite_positive && w.window <= 10.0;
  return w;
}

QuotientFitReport fit_quotient_entries(const std::vector<SweepRecord>& records, int max_degree) {
  QuotientFitReport rep;
  rep.max_degree = max_degree;
  if (records.empty()) return rep;
  if (records.size() < static_cast<std::size_t>(2 * max_degree + 3)) {
    rep.failures.push_back("sweep has " + std::to_string(records.size()) +
                           " points; degree " + std::to_string(max_degree) + " needs " +
                           std::to_string(2 * max_degree + 3));
    return rep;
  }
  const auto& labels = records.front().state_labels;
  for (const auto& rec : records)
    if (rec.state_labels != labels) {
      rep.failures.push_back("quotient states change at n = " + std::to_string(rec.n));
      return rep;
    }
  const std::size_t m = labels.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      std::vector<std::pair<long, Rational>> points;
      for (const auto& rec : records) points.emplace_back(rec.n, rec.quotient_matrix[a][b]);
      ++rep.entries;
      if (fit_rational(points, max_degree).exact) {
        ++rep.exact;
      } else {
        rep.failures.push_back("P(" + labels[a] + " -> " + labels[b] + ")");
      }
    }
  return rep;
}

GrowthReport mixing_growth(const FamilySpec& spec, const std::vector<int>& ns,
                           const Rational& epsilon, const Rational& laziness, double lo,
                           double hi) {
  GrowthReport g;
  g.epsilon = epsilon;
  g.within = !ns.empty();
  for (int n : ns) {
    const QuotientChain a = build_orbit_walk(spec, n, laziness);
    const QuotientChain b = build_orbit_walk(spec, 2 * n, laziness);
    const long ta = mixing_time(a.base, a.root_index, epsilon);
    const long tb = mixing_time(b.base, b.root_index, epsilon);
    const double ratio = ta == 0 ? std::numeric_limits<double>::infinity()
                                 : static_cast<double>(tb) / static_cast<double>(ta);
    g.n.push_back(n);
    g.t_n.push_back(ta);
    g.t_2n.push_back(tb);
    g.ratio.push_back(ratio);
    if (!(ratio >= lo && ratio <= hi)) g.within = false;
  }
  return g;
}

std::vector<std::string> Verdict::failures() const {
  std::vector<std::string> out = bounds_violations;
  for (const auto& h : hitting)
    if (!h.finite_positive)
      out.push_back("t_mix/t_hit is not finite and positive at alpha = " + to_string(h.alpha));
  return out;
}

Verdict build_verdict(const std::string& family_label, const std::vector<SweepRecord>& records,
                      const SweepConfig& config, double product_floor, int max_fit_degree) {
  Verdict v;
  v.family = family_label;
  if (records.empty()) {
    v.notes.push_back("empty sweep");
    return v;
  }
  v.n_lo = records.front().n;
  v.n_hi = records.back().n;
  for (const auto& rec : records)
    if (rec.state_labels != records.front().state_labels) v.quotient_states_stable = false;

  if (records.size() >= 8) {
    v.stabilization = stabilization_report(records, max_fit_degree);
  } else {
    v.notes.push_back("stabilization report skipped: fewer than 8 records");
  }
  v.quotient_fits = fit_quotient_entries(
      records, std::min(max_fit_degree, std::max(0, static_cast<int>(records.size()) - 3) / 2));

  v.product = product_condition_diagnostic(records, config.product_epsilon, product_floor);
  v.cutoff_flag = !config.cutoff_grid.empty();
  v.eventually_constant = !config.cutoff_grid.empty();
  for (const auto& e : config.cutoff_grid) {
    v.cutoff.push_back(cutoff_profile(records, e));
    v.cutoff_flag = v.cutoff_flag && v.cutoff.back().cutoff_consistent;
    v.eventually_constant = v.eventually_constant && v.cutoff.back().eventually_constant;
  }
  for (const auto& a : config.alphas)
    v.hitting.push_back(peres_sousi_window(records, a, config.product_epsilon));

  for (const auto& rec : records)
    v.bounds_violations.insert(v.bounds_violations.end(), rec.bound_violations.begin(),
                               rec.bound_violations.end());
  v.bounds_violations.insert(v.bounds_violations.end(), v.product.violations.begin(),
                             v.product.violations.end());

  std::string grid;
  for (const auto& e : config.cutoff_grid) grid += (grid.empty() ? "" : ", ") + to_string(e);
  v.notes.push_back("cutoff is assessed on the finite epsilon grid {" + grid +
                    "} and their complements, not for all epsilon");
  v.notes.push_back("tail = last half of the sweep, n >= " +
                    std::to_string(records[tail_start(records.size())].n));
  return v;
}

namespace {

// Decimal when exact (denominator 2^a 5^b), otherwise p/q.
std::string column_label(const Rational& q) {
  Integer d = q.get_den();
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return to_string(q);
  const int digits = std::max(twos, fives);
  Integer scaled = q.get_num();
  Integer ten_pow = 1;
  for (int i = 0; i < digits; ++i) ten_pow *= 10;
  scaled = scaled * ten_pow / q.get_den();
  std::string s = Integer(abs(scaled)).get_str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  return (q < 0 ? "-" : "") + s;
}

nlohmann::ordered_json fit_json(const FitReport& f) {
  nlohmann::ordered_json j;
  j["model"] = f.model == FitModel::Polynomial ? "polynomial" : "rational-function";
  j["fitted"] = f.fitted.to_string();
  j["degree"] = f.degree();
  j["exact"] = f.exact;
  j["train_n"] = f.train_n;
  j["validation_n"] = f.validation_n;
  j["max_validation_error"] = format_real(f.max_validation_error);
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

}  // namespace

std::string sweep_to_csv(const std::vector<SweepRecord>& records, const SweepConfig& config) {
  std::ostringstream out;
  out << "n,num_vertices,quotient_states,degree,num_distinct_eigs,lambda2_abs,t_rel";
  for (const auto& e : config.epsilons) out << ",t_mix_eps_" << column_label(e);
  for (const auto& a : config.alphas) out << ",t_hit_alpha_" << column_label(a);
  out << ",ratio_trel_over_tmix,bound_log4V\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.num_vertices.get_str() << ',' << r.quotient_states << ','
        << to_string(r.degree_weight) << ',' << r.num_distinct_eigs << ','
        << format_real(r.lambda2_abs) << ',' << format_real(r.t_rel);
    for (const auto& e : config.epsilons) out << ',' << r.t_mix_at(e);
    for (const auto& a : config.alphas) out << ',' << to_string(r.t_hit_at(a).t_hit);
    const long t = r.t_mix_at(config.product_epsilon);
    out << ',' << (t == 0 ? std::string("undefined") : format_real(r.t_rel / static_cast<double>(t)));
    out << ',' << format_real(std::log(4.0 * r.num_vertices.get_d())) << '\n';
  }
  return out.str();
}

std::string verdict_to_json(const Verdict& v, const std::string& extra) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["family"] = v.family;
  j["n_range"] = {v.n_lo, v.n_hi};
  if (v.stabilization.stable)
    j["stable_eig_count"] = v.stabilization.stable_count;
  else
    j["stable_eig_count"] = nullptr;
  if (v.stabilization.second_branch_multiplicity)
    j["multiplicity_fit"] = fit_json(*v.stabilization.second_branch_multiplicity);
  else
    j["multiplicity_fit"] = nullptr;
  j["product_condition_failed"] = v.product.product_condition_failed;
  j["cutoff_flag"] = v.cutoff_flag;
  j["bounds_violations"] = v.bounds_violations;

  j["eventually_constant_mixing"] = v.eventually_constant;
  j["quotient_states_stable"] = v.quotient_states_stable;
  ordered_json stab;
  stab["stable"] = v.stabilization.stable;
  stab["first_stable_n"] = v.stabilization.first_stable_n;
  stab["tail_start_n"] = v.stabilization.tail_start_n;
  stab["tracking_ok"] = v.stabilization.tracking_ok;
  if (!v.stabilization.tracking_note.empty()) stab["tracking_note"] = v.stabilization.tracking_note;
  if (!v.stabilization.detail.empty()) stab["detail"] = v.stabilization.detail;
  stab["fit_degree"] = v.stabilization.fit_degree;
  ordered_json branches = ordered_json::array();
  for (const auto& b : v.stabilization.branches) {
    ordered_json bj;
    bj["index"] = b.index;
    bj["value"] = fit_json(b.value_fit);
    bj["multiplicity"] = fit_json(b.multiplicity_fit);
    branches.push_back(bj);
  }
  stab["branches"] = branches;
  j["stabilization"] = stab;

  ordered_json qf;
  qf["max_degree"] = v.quotient_fits.max_degree;
  qf["entries"] = v.quotient_fits.entries;
  qf["exact"] = v.quotient_fits.exact;
  qf["failures"] = v.quotient_fits.failures;
  j["quotient_entry_fits"] = qf;

  ordered_json pc;
  pc["epsilon"] = to_string(v.product.epsilon);
  pc["floor"] = v.product.floor;
  pc["tail_min_trel_over_tmix"] = format_real(v.product.tail_min_r);
  pc["n"] = v.product.n;
  ordered_json r = ordered_json::array(), s = ordered_json::array(), b = ordered_json::array();
  for (std::size_t i = 0; i < v.product.n.size(); ++i) {
    r.push_back(format_real(v.product.r[i]));
    s.push_back(format_real(v.product.s[i]));
    b.push_back(format_real(v.product.bound[i]));
  }
  pc["trel_over_tmix"] = r;
  pc["tmix_over_trel"] = s;
  pc["log4V"] = b;
  if (!v.product.notes.empty()) pc["notes"] = v.product.notes;
  j["product_condition"] = pc;

  ordered_json cut = ordered_json::array();
  for (const auto& c : v.cutoff) {
    ordered_json cj;
    cj["eps"] = to_string(c.eps_small);
    cj["classification"] = c.classification;
    cj["tail_ratio"] = format_real(c.tail_ratio);
    cj["cutoff_consistent"] = c.cutoff_consistent;
    cj["n"] = c.n;
    ordered_json ratios = ordered_json::array();
    for (double x : c.ratio) ratios.push_back(format_real(x));
    cj["ratio"] = ratios;
    if (!c.excluded.empty()) cj["excluded_n"] = c.excluded;
    cut.push_back(cj);
  }
  j["cutoff_profiles"] = cut;

  ordered_json hit = ordered_json::array();
  for (const auto& h : v.hitting) {
    ordered_json hj;
    hj["alpha"] = to_string(h.alpha);
    hj["epsilon"] = to_string(h.epsilon);
    hj["min_ratio"] = format_real(h.min_ratio);
    hj["max_ratio"] = format_real(h.max_ratio);
    hj["window"] = format_real(h.window);
    hj["finite_positive"] = h.finite_positive;
    hj["window_ok"] = h.ok;
    hit.push_back(hj);
  }
  j["peres_sousi"] = hit;
  j["notes"] = v.notes;
  if (!extra.empty()) {
    auto more = ordered_json::parse(extra);
    for (auto it = more.begin(); it != more.end(); ++it) j[it.key()] = it.value();
  }
  return j.dump(2) + "\n";
}

}  // namespace fiwalk
