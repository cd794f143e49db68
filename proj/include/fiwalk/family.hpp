#pragma once

// FI-graph families in normal form: vertices are H-classes of injective
// k-tuples over [n], edges are H x H orbits of equality patterns, each orbit
// carrying a weight that is a rational function of n.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fiwalk/pattern.hpp"
#include "fiwalk/rational.hpp"

namespace fiwalk {

inline constexpr int kMaxTupleLength = 7;
inline constexpr std::size_t kDefaultVertexCap = 200000;

struct EdgeOrbit {
  PairPattern pattern;  // canonical under H x H once inside a FamilySpec
  RationalFunction weight;
};

/// Validated, immutable family description.
class FamilySpec {
 public:
  /// Validates and canonicalizes. `generators` are 1-based one-line
  /// permutations of [k]; n_min defaults to 2k + 1. Throws SpecError.
  static FamilySpec create(std::string name, int k, const std::vector<Permutation>& generators,
                           std::vector<EdgeOrbit> edge_orbits, std::optional<int> n_min = {},
                           std::string description = {});

  const std::string& name() const { return name_; }
  const std::string& description() const { return description_; }
  int k() const { return k_; }
  int n_min() const { return n_min_; }
  const PermutationGroup& symmetry() const { return group_; }
  /// 1-based one-line generators as supplied.
  const std::vector<Permutation>& symmetry_generators() const { return generators_; }
  const std::vector<EdgeOrbit>& edge_orbits() const { return edge_orbits_; }

  /// Index of the edge orbit with this canonical pattern, if any.
  std::optional<std::size_t> orbit_index(const PairPattern& canonical) const;

  /// n! / ((n-k)! |H|)
  Integer vertex_count(long n) const;

 private:
  friend class GraphInstance;
  FamilySpec() = default;
  std::string name_;
  std::string description_;
  int k_ = 0;
  int n_min_ = 0;
  std::vector<Permutation> generators_;
  PermutationGroup group_;
  std::vector<EdgeOrbit> edge_orbits_;
};

/// Parses the JSON family-spec document (fields: name, k,
/// symmetry_generators, edge_orbits, n_min, optional description).
FamilySpec parse_family_spec(std::string_view document);

struct BuiltinInfo {
  std::string name;
  std::string params;       // e.g. "r"
  std::vector<long> defaults;
  std::string n_min;        // formula, e.g. "2r+1"
  std::string description;
  double product_floor;     // calibrated lower bound for t_rel / t_mix on sweep tails
};

const std::vector<BuiltinInfo>& builtin_catalog();

/// Throws SpecError for unknown names or invalid params. Empty params select
/// the catalog defaults.
FamilySpec builtin_family(std::string_view name, const std::vector<long>& params);

/// The H-minimal representative of t.
Tuple canonical_tuple(const FamilySpec& spec, const Tuple& t);

/// One canonical representative per vertex, in lexicographic order.
std::vector<Tuple> enumerate_vertices(const FamilySpec& spec, int n,
                                      std::size_t cap = kDefaultVertexCap);

/// Canonical equality pattern between two tuples modulo H x H; two pairs get
/// equal patterns exactly when they lie in the same S_n-orbit.
PairPattern pair_orbit(const FamilySpec& spec, const Tuple& u, const Tuple& v);

/// Calls visit(z, orbit_index) once per neighbor class z (canonical tuple) of
/// the vertex y at level n.
void for_each_neighbor(const FamilySpec& spec, PatternCanonicalizer& patterns,
                       const TupleCanonicalizer& tuples, int n, const Tuple& y,
                       const std::function<void(const Tuple&, std::size_t)>& visit);

/// Exact edge weights of every orbit at n; negative values are a DomainError.
std::vector<Rational> orbit_weights(const FamilySpec& spec, long n);

struct Neighbor {
  int vertex;
  int orbit;
};

class GraphInstance {
 public:
  const FamilySpec& spec() const { return spec_; }
  int n() const { return n_; }
  const std::vector<Tuple>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Neighbor>& neighbors(std::size_t v) const { return adjacency_[v]; }
  /// Common total outgoing weight W (regularity is verified on construction).
  const Rational& degree_weight() const { return degree_weight_; }
  const std::vector<Rational>& weights() const { return weights_; }
  int index_of(const Tuple& canonical) const;

 private:
  friend GraphInstance instantiate_graph(const FamilySpec&, int, std::size_t);
  FamilySpec spec_;
  int n_ = 0;
  std::vector<Tuple> vertices_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<Rational> weights_;
  Rational degree_weight_;
  std::unordered_map<Tuple, int, TupleHash> index_;
};

/// Builds and checks the level-n graph: regularity, weighted symmetry and
/// connectivity. Disconnected instances throw DomainError naming two
/// component representatives.
GraphInstance instantiate_graph(const FamilySpec& spec, int n,
                                std::size_t cap = kDefaultVertexCap);

std::string tuple_to_string(const Tuple& t);

struct EquivarianceReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool ok() const { return failures == 0 && trials > 0; }
};

/// Draws random pairs of tuples over [n] and random injections [n] -> [n_big];
/// the pair pattern and the H-class must not change under the injection.
EquivarianceReport check_equivariance(const FamilySpec& spec, int n, int n_big, std::size_t trials,
                                      std::uint64_t seed);

}  // namespace fiwalk
