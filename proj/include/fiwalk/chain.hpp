#pragma once

// Exact reversible Markov chains: rational transition matrices and stationary
// vectors, exact total-variation mixing times, floating-point spectra.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fiwalk/family.hpp"
#include "fiwalk/rational.hpp"

namespace fiwalk {

using SparseRow = std::vector<std::pair<int, Rational>>;

inline constexpr long kDefaultMixingHorizon = 1000000;
inline constexpr double kDefaultClusterTolerance = 1e-8;
inline constexpr std::size_t kDenseSpectrumCap = 6000;

/// Finite reversible chain. Construction verifies exactly that rows sum to 1,
/// that the stationary vector is a positive probability vector fixed by P,
/// and detailed balance; any failure throws InvariantViolation.
class Chain {
 public:
  Chain(std::vector<std::string> states, std::vector<SparseRow> rows,
        std::vector<Rational> stationary, Rational laziness, bool transitive);

  /// Derives the stationary distribution from detailed balance along a
  /// spanning tree. Throws DomainError if the chain is reducible and
  /// InvariantViolation if it is not reversible.
  static Chain from_rows(std::vector<std::string> states, std::vector<SparseRow> rows,
                         Rational laziness = 0, bool transitive = false);

  std::size_t size() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<SparseRow>& rows() const { return rows_; }
  const std::vector<Rational>& stationary() const { return stationary_; }
  const Rational& laziness() const { return laziness_; }
  /// Set when a group acts transitively preserving P, so a single start
  /// realizes the worst-case distance to stationarity.
  bool transitive() const { return transitive_; }
  Rational entry(int i, int j) const;

  /// P = integer_rows / common_denominator().
  const Integer& common_denominator() const { return denominator_; }
  const std::vector<std::vector<std::pair<int, Integer>>>& integer_rows() const {
    return integer_rows_;
  }
  /// pi = stationary_numerators / stationary_denominator.
  const std::vector<Integer>& stationary_numerators() const { return pi_num_; }
  const Integer& stationary_denominator() const { return pi_den_; }

  /// True when the support graph admits a proper 2-colouring (period 2).
  bool support_bipartite() const;

 private:
  std::vector<std::string> states_;
  std::vector<SparseRow> rows_;
  std::vector<Rational> stationary_;
  Rational laziness_;
  bool transitive_;
  Integer denominator_;
  std::vector<std::vector<std::pair<int, Integer>>> integer_rows_;
  std::vector<Integer> pi_num_;
  Integer pi_den_;
};

/// Simple (weighted, lazy) walk: P(x,y) = (1-laziness) w(x,y) / W, P(x,x) = laziness.
Chain build_simple_walk(const GraphInstance& instance, const Rational& laziness = 0);

/// Half-L1 distance; throws DomainError on mismatched lengths.
Rational tv_distance(const std::vector<Rational>& mu, const std::vector<Rational>& nu);

/// Exact evolution of the distribution of X_t from a point mass, kept as an
/// integer vector over D^t where D is the chain's common denominator.
class DistributionEvolution {
 public:
  DistributionEvolution(const Chain& chain, int start);

  void step();
  long time() const { return t_; }
  Rational probability(int state) const;
  std::vector<Rational> distribution() const;
  Rational tv_to_stationary() const;
  /// tv_to_stationary() <= eps without forming the rational.
  bool within(const Rational& eps) const;

 private:
  Integer l1_numerator() const;  // sum |v_i Q - p_i D^t|
  const Chain* chain_;
  std::vector<Integer> v_;
  Integer scale_;  // D^t
  long t_ = 0;
};

struct MixingProfile {
  int start_state = 0;
  std::vector<Rational> distances;  // d(0), ..., d(horizon)
  long horizon = 0;
};

MixingProfile mixing_profile(const Chain& chain, int start, long horizon);

/// Smallest t with TV(P^t(start, .), pi) <= eps. Throws DomainError for
/// periodic chains or when the horizon is exhausted.
long mixing_time(const Chain& chain, int start, const Rational& epsilon,
                 long horizon = kDefaultMixingHorizon);
/// Several thresholds in one pass; result aligned with `epsilons`.
std::vector<long> mixing_times(const Chain& chain, int start, const std::vector<Rational>& epsilons,
                               long horizon = kDefaultMixingHorizon);
/// Maximum over starts; a single start when the chain is transitive.
long worst_case_mixing_time(const Chain& chain, const Rational& epsilon,
                            long horizon = kDefaultMixingHorizon);

struct Spectrum {
  std::vector<double> eigenvalues;  // distinct values, descending
  std::vector<long long> multiplicities;
  double cluster_tolerance = kDefaultClusterTolerance;

  long long dimension() const;
  std::size_t distinct() const { return eigenvalues.size(); }
};

/// Eigenvalues of D^{1/2} P D^{-1/2}, descending, from a dense symmetric solver.
std::vector<double> symmetric_eigenvalues(const Chain& chain);
/// Groups descending values whose consecutive gaps are <= tol; each value
/// contributes its weight to the cluster multiplicity (rounded).
Spectrum cluster_eigenvalues(const std::vector<double>& values, const std::vector<double>& weights,
                             double tol);
Spectrum spectrum(const Chain& chain, double tol = kDefaultClusterTolerance);

/// Largest |lambda| over the spectrum with one copy of the leading eigenvalue removed.
double second_eigenvalue_abs(const Spectrum& s);
/// 1 / (1 - lambda); +inf for periodic chains. DomainError for one state.
double relaxation_time(const Spectrum& s);
/// Spectrum symmetric about 0 with matching multiplicities.
bool bipartite_test(const Spectrum& s, double tol = kDefaultClusterTolerance);

struct MixingBoundsReport {
  Rational epsilon;
  double t_rel = 0;
  Rational pi_min;
  long t_mix = 0;
  double lower = 0;
  double upper = 0;
  bool holds = false;
};

/// (t_rel - 1) log(1/(2 eps)) <= t_mix(eps) <= t_rel log(1/(eps pi_min)).
MixingBoundsReport mixing_bounds(double t_rel, const Rational& pi_min, long t_mix,
                                 const Rational& epsilon);
/// Computes all three quantities for the chain (worst-case t_mix) and throws
/// InvariantViolation if the sandwich fails.
MixingBoundsReport verify_mixing_bounds(const Chain& chain, const Rational& epsilon);

}  // namespace fiwalk
