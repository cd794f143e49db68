#include <gtest/gtest.h>

#include <json.hpp>

#include <sstream>

#include "fiwalk/errors.hpp"
#include "fiwalk/stabilization.hpp"

using namespace fiwalk;

namespace {

SweepConfig config_for(int lo, int hi) {
  SweepConfig c;
  c.n_lo = lo;
  c.n_hi = hi;
  c.epsilons = {Rational(1, 4), Rational(1, 100)};
  c.workers = 2;
  return c;
}

const std::vector<SweepRecord>& kneser_sweep() {
  static const std::vector<SweepRecord> r = sweep(builtin_family("kneser", {2}), config_for(5, 30));
  return r;
}

const std::vector<SweepRecord>& complete_sweep() {
  static const std::vector<SweepRecord> r = sweep(builtin_family("complete", {}), config_for(5, 40));
  return r;
}

SweepRecord synthetic(int n, long t_quarter, long t_three_quarters, double t_rel) {
  SweepRecord r;
  r.n = n;
  r.num_vertices = 100;
  r.t_rel = t_rel;
  r.t_mix[Rational(1, 4)] = t_quarter;
  r.t_mix[Rational(3, 4)] = t_three_quarters;
  return r;
}

}  // namespace

TEST(Sweep, CompleteRecords) {
  const auto& r = complete_sweep();
  ASSERT_EQ(r.size(), 36u);
  for (const auto& rec : r) {
    EXPECT_EQ(rec.t_mix_at(Rational(1, 4)), 1);
    EXPECT_EQ(rec.quotient_states, 2u);
    EXPECT_NEAR(rec.t_rel, (rec.n - 1.0) / (rec.n - 2.0), 1e-12);
    EXPECT_EQ(rec.degree_weight, rec.n - 1);
    EXPECT_TRUE(rec.bound_violations.empty());
  }
}

TEST(Sweep, KneserRecords) {
  for (const auto& rec : kneser_sweep()) {
    EXPECT_EQ(rec.quotient_states, 3u);
    EXPECT_EQ(rec.num_vertices, binomial(rec.n, 2));
    EXPECT_FALSE(rec.bipartite);
    EXPECT_GE(rec.t_rel, 1.0);
    EXPECT_LT(rec.lambda2_abs, 1.0);
    // t_mix is non-increasing in epsilon.
    long prev = -1;
    for (auto it = rec.t_mix.rbegin(); it != rec.t_mix.rend(); ++it) {
      EXPECT_GE(it->second, prev);
      prev = it->second;
    }
    EXPECT_TRUE(rec.full_graph_checked);
  }
}

TEST(Sweep, CapLimitsFullGraphChecks) {
  SweepConfig c = config_for(5, 14);
  c.cap_states = 50;
  for (const auto& rec : sweep(builtin_family("kneser", {2}), c))
    EXPECT_EQ(rec.full_graph_checked, rec.n <= 10) << rec.n;
}

TEST(Sweep, EmptyRangeAndBadInputs) {
  SweepConfig c = config_for(10, 9);
  EXPECT_TRUE(sweep(builtin_family("kneser", {2}), c).empty());
  EXPECT_THROW(sweep(builtin_family("kneser", {2}), config_for(4, 9)), DomainError);
  SweepConfig bad = config_for(5, 9);
  bad.alphas = {Rational(1, 2)};
  EXPECT_THROW(sweep(builtin_family("kneser", {2}), bad), DomainError);
}

TEST(Sweep, ErrorsCarryN) {
  SweepConfig c = config_for(7, 9);
  c.cap_hitting = 5;
  try {
    sweep(builtin_family("triple-replace-one", {}), c);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("n = 7"), std::string::npos) << e.what();
  }
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
  SweepConfig one = config_for(7, 12), many = config_for(7, 12);
  one.workers = 1;
  many.workers = 4;
  FamilySpec spec = builtin_family("johnson", {});
  EXPECT_EQ(sweep_to_csv(sweep(spec, one), one), sweep_to_csv(sweep(spec, many), many));
}

TEST(Stabilization, KneserAndComplete) {
  StabilizationReport k = stabilization_report(kneser_sweep(), 4);
  EXPECT_TRUE(k.stable);
  EXPECT_EQ(k.stable_count, 3u);
  EXPECT_EQ(k.first_stable_n, 5);
  EXPECT_TRUE(k.tracking_ok);
  ASSERT_TRUE(k.second_branch_multiplicity.has_value());
  EXPECT_EQ(k.second_branch_multiplicity->fitted, RationalFunction({-1, 1}, {1}));

  std::vector<SweepRecord> c(complete_sweep().begin(), complete_sweep().begin() + 26);
  StabilizationReport cr = stabilization_report(c, 2);
  EXPECT_TRUE(cr.stable);
  EXPECT_EQ(cr.stable_count, 2u);
  ASSERT_EQ(cr.branches.size(), 2u);
  EXPECT_TRUE(cr.branches[1].value_fit.exact);
  EXPECT_EQ(cr.branches[1].value_fit.fitted, RationalFunction({-1}, {-1, 1}));
}

TEST(Stabilization, BranchFitsReproduceSpectrumAtValidationPoints) {
  StabilizationReport k = stabilization_report(kneser_sweep(), 4);
  for (const auto& b : k.branches) {
    ASSERT_TRUE(b.value_fit.exact);
    for (std::size_t i = 0; i < b.value_fit.validation_n.size(); ++i)
      EXPECT_NEAR(b.value_fit.fitted.evaluate_double(static_cast<double>(b.value_fit.validation_n[i])),
                  b.value_fit.validation_values[i], 1e-6);
  }
}

TEST(Stabilization, Precondition) {
  std::vector<SweepRecord> one(kneser_sweep().begin(), kneser_sweep().begin() + 1);
  EXPECT_THROW(stabilization_report(one, 2), DomainError);
}

TEST(Stabilization, MultiplicityOfSecondBranchOnShortSweep) {
  SweepConfig c = config_for(6, 14);
  auto records = sweep(builtin_family("kneser", {2}), c);
  std::vector<std::pair<long, Rational>> pts;
  for (const auto& r : records) {
    std::size_t best = 1;
    for (std::size_t i = 1; i < r.spectrum.distinct(); ++i)
      if (std::abs(r.spectrum.eigenvalues[i]) > std::abs(r.spectrum.eigenvalues[best])) best = i;
    pts.emplace_back(r.n, Rational(static_cast<long>(r.spectrum.multiplicities[best])));
  }
  FitReport f = fit_polynomial(pts);
  EXPECT_TRUE(f.exact);
  EXPECT_EQ(f.fitted, RationalFunction({-1, 1}, {1}));
  EXPECT_EQ(f.validation_n, (std::vector<long>{13, 14}));
}

TEST(ProductCondition, CompleteAndKneser) {
  std::vector<SweepRecord> c(complete_sweep().begin() + 5, complete_sweep().end());
  ProductConditionReport cr = product_condition_diagnostic(c, Rational(1, 4), 0.05);
  EXPECT_TRUE(cr.violations.empty());
  for (std::size_t i = 0; i < cr.n.size(); ++i)
    EXPECT_NEAR(cr.r[i], (cr.n[i] - 1.0) / (cr.n[i] - 2.0), 1e-12);
  EXPECT_TRUE(cr.product_condition_failed);

  ProductConditionReport kr = product_condition_diagnostic(kneser_sweep(), Rational(1, 4), 0.05);
  for (std::size_t i = 0; i < kr.n.size(); ++i) EXPECT_LE(kr.s[i], kr.bound[i]);
}

TEST(ProductCondition, UndefinedRowsAndFloor) {
  std::vector<SweepRecord> rows{synthetic(10, 0, 0, 1.5), synthetic(11, 2, 1, 1.5),
                                synthetic(12, 2, 1, 0.01)};
  ProductConditionReport r = product_condition_diagnostic(rows, Rational(1, 4), 0.05);
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_NE(r.notes[0].find("n = 10"), std::string::npos);
  EXPECT_FALSE(r.floor_holds);
  EXPECT_FALSE(r.violations.empty());
}

TEST(Cutoff, CompleteIsEventuallyConstant) {
  std::vector<SweepRecord> c(complete_sweep().begin() + 5, complete_sweep().end());
  CutoffProfile p = cutoff_profile(c, Rational(1, 4));
  EXPECT_TRUE(p.eventually_constant);
  EXPECT_FALSE(p.cutoff_consistent);
  EXPECT_EQ(p.classification, "eventually constant mixing");
  for (double x : p.ratio) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(Cutoff, SyntheticProfiles) {
  std::vector<SweepRecord> flat;
  for (int n = 10; n < 18; ++n) flat.push_back(synthetic(n, 3, 3, 2.0));
  CutoffProfile f = cutoff_profile(flat, Rational(1, 4));
  EXPECT_TRUE(f.eventually_constant);
  EXPECT_FALSE(f.cutoff_consistent);

  std::vector<SweepRecord> sharp;
  for (int n = 10; n < 18; ++n) sharp.push_back(synthetic(n, 100 * n + 1, 100 * n, 2.0));
  CutoffProfile s = cutoff_profile(sharp, Rational(1, 4));
  EXPECT_FALSE(s.eventually_constant);
  EXPECT_TRUE(s.cutoff_consistent);

  std::vector<SweepRecord> zero{synthetic(10, 1, 0, 1.0), synthetic(11, 1, 1, 1.0)};
  CutoffProfile z = cutoff_profile(zero, Rational(1, 4));
  EXPECT_EQ(z.excluded, (std::vector<int>{10}));
  EXPECT_THROW(cutoff_profile(zero, Rational(1, 2)), DomainError);
}

TEST(HittingWindow, Complete) {
  // Up to n = 8 the root alone carries mass >= 1/8, so t_hit(1/8) = n - 1 there.
  HittingWindowReport all = peres_sousi_window(complete_sweep(), Rational(1, 8), Rational(1, 4));
  EXPECT_TRUE(all.finite_positive);
  EXPECT_DOUBLE_EQ(all.window, 7.0);
  std::vector<SweepRecord> tail(complete_sweep().begin() + 4, complete_sweep().end());
  HittingWindowReport w = peres_sousi_window(tail, Rational(1, 8), Rational(1, 4));
  EXPECT_TRUE(w.ok);
  EXPECT_DOUBLE_EQ(w.window, 1.0);
}

TEST(QuotientFits, KneserEntries) {
  std::vector<SweepRecord> r(kneser_sweep().begin(), kneser_sweep().begin() + 10);
  QuotientFitReport f = fit_quotient_entries(r, 2);
  EXPECT_TRUE(f.all_exact());
  EXPECT_EQ(f.entries, 9u);
  std::vector<std::pair<long, Rational>> pts;
  for (const auto& rec : r) pts.emplace_back(rec.n, rec.quotient_matrix[2][0]);
  FitReport e = fit_rational(pts, 2);
  ASSERT_TRUE(e.exact);
  EXPECT_EQ(e.fitted, RationalFunction({2}, {6, -5, 1}));
}

TEST(QuotientFits, TRelOfComplete) {
  std::vector<std::pair<long, double>> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(complete_sweep()[i].n, complete_sweep()[i].t_rel);
  FitReport f = fit_rational_real(pts, 2);
  ASSERT_TRUE(f.exact);
  EXPECT_EQ(f.fitted, RationalFunction({-1, 1}, {-2, 1}));
}

TEST(Growth, WeightedPairsAreLinear) {
  GrowthReport g = mixing_growth(builtin_family("ordered-pair-weighted", {}), {20, 30},
                                 Rational(1, 4));
  EXPECT_TRUE(g.within);
  GrowthReport c = mixing_growth(builtin_family("complete", {}), {20, 30}, Rational(1, 4));
  EXPECT_FALSE(c.within);
  for (double x : c.ratio) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(Verdict, KneserDocument) {
  SweepConfig c = config_for(5, 30);
  Verdict v = build_verdict("kneser-2", kneser_sweep(), c, 0.05, 4);
  EXPECT_TRUE(v.product.product_condition_failed);
  EXPECT_FALSE(v.cutoff_flag);
  EXPECT_TRUE(v.failures().empty());
  auto doc = nlohmann::json::parse(verdict_to_json(v, R"({"seed": 0})"));
  for (const char* key : {"family", "n_range", "stable_eig_count", "multiplicity_fit",
                          "product_condition_failed", "cutoff_flag", "bounds_violations", "seed"})
    EXPECT_TRUE(doc.contains(key)) << key;
  EXPECT_EQ(doc["stable_eig_count"], 3);
  EXPECT_EQ(doc["multiplicity_fit"]["fitted"], "n - 1");
  EXPECT_EQ(doc["n_range"], nlohmann::json::array({5, 30}));
}

TEST(Csv, HeaderAndFormats) {
  SweepConfig c = config_for(5, 30);
  c.alphas = {Rational(1, 8), Rational(1, 3)};
  std::vector<SweepRecord> r(kneser_sweep().begin(), kneser_sweep().begin() + 2);
  for (auto& rec : r) rec.t_hit.emplace(Rational(1, 3), rec.t_hit_at(Rational(1, 8)));
  std::istringstream csv(sweep_to_csv(r, c));
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header,
            "n,num_vertices,quotient_states,degree,num_distinct_eigs,lambda2_abs,t_rel,"
            "t_mix_eps_0.25,t_mix_eps_0.01,t_hit_alpha_0.125,t_hit_alpha_1/3,"
            "ratio_trel_over_tmix,bound_log4V");
  std::getline(csv, row);
  EXPECT_EQ(row.substr(0, row.find(",0.66")), "5,10,3,3,3");
  EXPECT_NE(row.find(",4,11,3,3,"), std::string::npos) << row;
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333333");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Workers, EnvironmentOverride) {
  EXPECT_EQ(resolve_workers(3), 3u);
  setenv("FIWALK_WORKERS", "5", 1);
  EXPECT_EQ(resolve_workers(0), 5u);
  unsetenv("FIWALK_WORKERS");
  EXPECT_GE(resolve_workers(0), 1u);
}
