#pragma once

// The orbit walk: the simple walk lumped by the stabilizer of the root vertex
// (1, ..., k). States are canonical equality patterns against the root.

#include <optional>
#include <string>
#include <vector>

#include "fiwalk/chain.hpp"
#include "fiwalk/family.hpp"

namespace fiwalk {

struct OrbitState {
  PairPattern pattern;  // canonical pattern of (y, root)
  Integer class_size;   // number of vertices y in this class
  Tuple representative; // canonically smallest such y
};

struct QuotientChain {
  Chain base;
  int n = 0;
  std::vector<OrbitState> states;
  int root_index = 0;  // the identity pattern, always state 0
  Integer num_vertices;
  Rational degree_weight;  // total outgoing edge weight W of every vertex

  const OrbitState& root() const { return states[root_index]; }
  /// Index of the empty pattern (disjoint labels).
  int disjoint_index() const;
};

Tuple root_vertex(const FamilySpec& spec, int n);

/// Canonical patterns realizable against the root at level n: those with m
/// matches need n >= 2k - m. Ordered by descending matches.
std::vector<PairPattern> realizable_patterns(const FamilySpec& spec, int n);

/// Closed-form count |orbit_{HxH}(s)| (n-k)_{k-m} / |H|.
Integer class_size(const FamilySpec& spec, PatternCanonicalizer& patterns, const PairPattern& s,
                   int n);

/// Built from one representative per state; the full graph is never formed.
QuotientChain build_orbit_walk(const FamilySpec& spec, int n, const Rational& laziness = 0);

struct LumpingReport {
  int n = 0;
  long t_max = 0;
  Rational max_discrepancy;
  bool class_sizes_match = false;
  std::size_t full_states = 0;
  std::size_t quotient_states = 0;
};

/// Compares (P^x)^t(root, s) with class_size(s) P^t(x, y_s) for t <= t_max
/// exactly; throws InvariantViolation on any discrepancy.
LumpingReport verify_lumping(const FamilySpec& spec, int n, long t_max,
                             const Rational& laziness = 0, std::size_t cap = kDefaultVertexCap);

struct StabilityReport {
  bool stable = true;
  int n_lo = 0;
  int n_hi = 0;
  std::size_t state_count = 0;
  std::optional<int> first_disagreement;
  std::string detail;
};

StabilityReport verify_state_stability(const FamilySpec& spec, int n_lo, int n_hi);

struct LimitingStationaryReport {
  std::vector<PairPattern> states;
  std::vector<int> probes;
  std::vector<std::vector<Rational>> stationary;  // one row per probe
  std::vector<Rational> disjoint_mass;
  std::vector<Rational> declared_limit;           // indicator of the empty pattern
  Rational fitted_constant;                       // max_n n (1 - disjoint_mass(n))
  bool monotone = true;
  bool bound_holds = true;  // fitted_constant <= k^2
  std::string detail;
};

LimitingStationaryReport limiting_stationary(const FamilySpec& spec, std::vector<int> probes);

/// Full-chain spectrum recovered from the quotient: distinct values are the
/// quotient eigenvalues, and the multiplicity of lambda is |V| times the
/// squared root-coordinates of the orthonormal eigenvectors of
/// D^{1/2} P^x D^{-1/2} belonging to lambda. Throws InvariantViolation when a
/// multiplicity is not numerically an integer.
Spectrum lifted_spectrum(const QuotientChain& q, double tol = kDefaultClusterTolerance);

/// JSON matrix document with exact fraction strings.
std::string quotient_to_json(const QuotientChain& q, const std::string& family_label);

}  // namespace fiwalk
