#pragma once

// Equality patterns between label tuples, the symmetry group H <= S_k acting
// on tuple coordinates, and canonical forms of both under H (resp. H x H).

#include <compare>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fiwalk {

/// Injective tuple of labels from [n] = {1..n}.
using Tuple = std::vector<int>;

/// Permutation of {0..k-1} in one-line form: perm[i] is the image of i.
using Permutation = std::vector<int>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept {
    std::size_t h = t.size();
    for (int v : t) h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Partial matching between coordinates of a left tuple u and a right tuple v:
/// u_i == v_j exactly when (i, j) is a match, every other pair of values is
/// distinct. Stored as right_of[i] = j, or -1 when coordinate i is unmatched.
/// Coordinates are 0-based internally and 1-based in every external format.
class PairPattern {
 public:
  PairPattern() = default;
  PairPattern(int k_left, int k_right);

  /// From 1-based (i, j) pairs; throws SpecError unless a partial injection.
  static PairPattern from_matches(int k_left, int k_right,
                                  const std::vector<std::pair<int, int>>& matches);
  static PairPattern identity(int k);
  /// The pattern realized by two concrete tuples.
  static PairPattern between(const Tuple& u, const Tuple& v);

  int k_left() const { return static_cast<int>(right_of_.size()); }
  int k_right() const { return k_right_; }
  int right_of(int i) const { return right_of_[i]; }
  int num_matches() const;
  /// 1-based (i, j) pairs in increasing i.
  std::vector<std::pair<int, int>> matches() const;

  PairPattern transposed() const;
  /// Relabels coordinates: (i, j) -> (left[i], right[j]).
  PairPattern relabeled(const Permutation& left, const Permutation& right) const;

  /// Dense code, unique among patterns with the same shape.
  std::uint64_t code() const;

  /// e.g. "{(1,1),(2,3)}"; "{}" for the empty pattern.
  std::string to_string() const;

  // Unmatched sorts after every real index, so canonical forms put matches first.
  friend std::strong_ordering operator<=>(const PairPattern& a, const PairPattern& b);
  friend bool operator==(const PairPattern& a, const PairPattern& b) {
    return a.k_right_ == b.k_right_ && a.right_of_ == b.right_of_;
  }

 private:
  int k_right_ = 0;
  std::vector<int> right_of_;
};

/// Finite permutation group on k points, materialized by closure.
class PermutationGroup {
 public:
  PermutationGroup() = default;
  /// Generators are 0-based one-line permutations of {0..k-1}; an empty list
  /// means the trivial group.
  PermutationGroup(int k, std::vector<Permutation> generators);

  int degree() const { return k_; }
  const std::vector<Permutation>& generators() const { return generators_; }
  const std::vector<Permutation>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }

 private:
  int k_ = 0;
  std::vector<Permutation> generators_;
  std::vector<Permutation> elements_;
};

Permutation compose(const Permutation& a, const Permutation& b);  // a after b
Permutation inverse(const Permutation& p);
bool is_permutation(const Permutation& p, int k);

/// Canonical vertex representatives: the lexicographically smallest tuple in
/// the orbit {(y_{h(0)}, ..., y_{h(k-1)}) : h in H}. Uses a precomputed table
/// over rank arrangements, so canonicalizing is O(k log k).
class TupleCanonicalizer {
 public:
  explicit TupleCanonicalizer(const PermutationGroup& group);

  Tuple canonical(const Tuple& t) const;
  /// Rank arrangements that are minimal in their H-orbit; one per vertex
  /// class on any fixed k-subset of labels.
  const std::vector<Permutation>& canonical_arrangements() const { return minimal_; }

 private:
  int k_;
  std::vector<int> canonical_index_;  // Lehmer rank -> rank of canonical arrangement
  std::vector<Permutation> by_rank_;
  std::vector<Permutation> minimal_;
};

/// Canonical forms of k x k patterns under H x H, with memoized orbits.
/// Not thread-safe: use one instance per thread.
class PatternCanonicalizer {
 public:
  explicit PatternCanonicalizer(const PermutationGroup& group);

  const PairPattern& canonical(const PairPattern& p);
  /// All raw patterns in the H x H orbit of p.
  const std::vector<PairPattern>& orbit(const PairPattern& p);
  std::size_t orbit_size(const PairPattern& p) { return orbit(p).size(); }

  /// Every canonical k x k pattern (all partial injections modulo H x H),
  /// sorted by decreasing match count, then by pattern order.
  std::vector<PairPattern> all_canonical_patterns();

  int k() const { return k_; }

 private:
  struct OrbitData {
    PairPattern canonical;
    std::vector<PairPattern> members;
  };
  std::size_t orbit_id(const PairPattern& p);

  int k_;
  PermutationGroup group_;
  std::unordered_map<std::uint64_t, std::size_t> id_of_code_;
  std::vector<OrbitData> orbits_;
};

}  // namespace fiwalk
