#pragma once

// Sweeps a family over n and turns the per-n records into verdicts:
// eigenvalue stabilization, multiplicity growth, the product condition and
// the cutoff profile.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fiwalk/chain.hpp"
#include "fiwalk/family.hpp"
#include "fiwalk/fit.hpp"
#include "fiwalk/hitting.hpp"

namespace fiwalk {

inline constexpr std::size_t kDefaultFullGraphCap = 2000;
inline constexpr double kDefaultProductFloor = 0.05;

struct SweepConfig {
  int n_lo = 0;
  int n_hi = -1;
  std::vector<Rational> epsilons{Rational(1, 4)};
  std::vector<Rational> alphas{Rational(1, 8)};
  std::vector<Rational> cutoff_grid{Rational(1, 4), Rational(1, 10), Rational(1, 100)};
  Rational product_epsilon{1, 4};
  Rational laziness{0};
  std::size_t cap_states = kDefaultFullGraphCap;  // full-graph cross-checks
  std::size_t cap_hitting = kDefaultHittingCap;
  long lumping_steps = 20;
  unsigned workers = 0;  // 0: FIWALK_WORKERS, else hardware concurrency

  /// Every epsilon the sweep needs: reported ones, the cutoff grid and its
  /// complements, and the product-condition epsilon.
  std::vector<Rational> all_epsilons() const;
};

struct SweepRecord {
  int n = 0;
  Integer num_vertices;
  Rational degree_weight;
  std::size_t quotient_states = 0;
  std::vector<std::string> state_labels;
  std::vector<std::vector<Rational>> quotient_matrix;
  Spectrum spectrum;  // full-chain spectrum, lifted from the quotient
  std::size_t num_distinct_eigs = 0;
  double lambda2_abs = 0;
  double t_rel = 0;
  bool bipartite = false;
  std::map<Rational, long> t_mix;
  std::map<Rational, HittingReport> t_hit;
  bool full_graph_checked = false;
  std::vector<std::string> bound_violations;

  long t_mix_at(const Rational& eps) const;
  const HittingReport& t_hit_at(const Rational& alpha) const;
};

unsigned resolve_workers(unsigned requested);

/// One record per n in [n_lo, n_hi]. Quantities come from the orbit walk;
/// where |V_n| <= cap_states the full chain is built and its spectrum, mixing
/// times and lumping identity are checked against the quotient
/// (InvariantViolation on mismatch). Errors carry the offending n.
std::vector<SweepRecord> sweep(const FamilySpec& spec, const SweepConfig& config);

struct BranchFit {
  std::size_t index = 0;  // position in descending order on the tail
  FitReport value_fit;
  FitReport multiplicity_fit;
};

struct StabilizationReport {
  bool stable = false;
  std::size_t stable_count = 0;
  int first_stable_n = 0;
  int tail_start_n = 0;
  bool tracking_ok = true;
  std::string tracking_note;
  int fit_degree = 0;
  std::vector<BranchFit> branches;
  std::optional<FitReport> second_branch_multiplicity;
  std::string detail;
};

/// Needs at least 8 records. The tail is the last half of the sweep.
StabilizationReport stabilization_report(const std::vector<SweepRecord>& records,
                                         int max_fit_degree);

struct ProductConditionReport {
  Rational epsilon;
  double floor = kDefaultProductFloor;
  std::vector<int> n;
  std::vector<double> r;      // t_rel / t_mix
  std::vector<double> s;      // t_mix / t_rel
  std::vector<double> bound;  // log(4 |V|)
  double tail_min_r = 0;
  bool floor_holds = false;
  bool product_condition_failed = false;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};

ProductConditionReport product_condition_diagnostic(const std::vector<SweepRecord>& records,
                                                    const Rational& epsilon, double floor);

struct CutoffProfile {
  Rational eps_small;
  std::vector<int> n;
  std::vector<double> ratio;  // t_mix(eps) / t_mix(1 - eps)
  std::vector<int> excluded;
  bool eventually_constant = false;
  double tail_ratio = 0;
  bool cutoff_consistent = false;
  std::string classification;
};

/// eps_small must lie in (0, 1/2) and both eps_small and 1 - eps_small must
/// have been swept. "Eventually constant" means every swept t_mix(eps) is
/// constant on the tail.
CutoffProfile cutoff_profile(const std::vector<SweepRecord>& records, const Rational& eps_small);

struct HittingWindowReport {
  Rational alpha;
  Rational epsilon;
  std::vector<int> n;
  std::vector<double> ratio;  // t_mix(eps) / t_hit(alpha)
  double min_ratio = 0;
  double max_ratio = 0;
  double window = 0;
  bool finite_positive = false;
  bool ok = false;  // finite_positive and window <= 10
};

HittingWindowReport peres_sousi_window(const std::vector<SweepRecord>& records,
                                       const Rational& alpha, const Rational& epsilon);

struct QuotientFitReport {
  int max_degree = 0;
  std::size_t entries = 0;
  std::size_t exact = 0;
  std::vector<std::string> failures;
  bool all_exact() const { return failures.empty() && entries > 0; }
};

/// Fits every quotient transition entry across the sweep as a rational
/// function of n (last three n held out).
QuotientFitReport fit_quotient_entries(const std::vector<SweepRecord>& records, int max_degree);

struct GrowthReport {
  Rational epsilon;
  std::vector<int> n;
  std::vector<long> t_n;
  std::vector<long> t_2n;
  std::vector<double> ratio;
  bool within = false;  // every ratio in [lo, hi]
};

/// t_mix(2n) / t_mix(n) from the orbit walk at each listed n.
GrowthReport mixing_growth(const FamilySpec& spec, const std::vector<int>& ns,
                           const Rational& epsilon, const Rational& laziness = 0,
                           double lo = 1.6, double hi = 2.4);

struct Verdict {
  std::string family;
  int n_lo = 0;
  int n_hi = 0;
  bool quotient_states_stable = true;
  StabilizationReport stabilization;
  QuotientFitReport quotient_fits;
  ProductConditionReport product;
  std::vector<CutoffProfile> cutoff;
  bool cutoff_flag = false;
  bool eventually_constant = false;
  std::vector<HittingWindowReport> hitting;
  std::vector<std::string> bounds_violations;
  std::vector<std::string> notes;

  /// Assertion failures that map to exit code 2. The hitting window is
  /// reported but only non-finite or non-positive ratios count here.
  std::vector<std::string> failures() const;
};

Verdict build_verdict(const std::string& family_label, const std::vector<SweepRecord>& records,
                      const SweepConfig& config, double product_floor, int max_fit_degree);

/// Header: n, num_vertices, quotient_states, degree, num_distinct_eigs,
/// lambda2_abs, t_rel, t_mix_eps_<e>..., t_hit_alpha_<a>...,
/// ratio_trel_over_tmix, bound_log4V.
std::string sweep_to_csv(const std::vector<SweepRecord>& records, const SweepConfig& config);

/// `extra` (a JSON object as text, may be empty) is merged at the top level.
std::string verdict_to_json(const Verdict& v, const std::string& extra = {});

/// 15 significant digits; "inf" for infinity.
std::string format_real(double x);

}  // namespace fiwalk
