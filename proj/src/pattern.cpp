#include "fiwalk/pattern.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "fiwalk/errors.hpp"

namespace fiwalk {

// ---------------------------------------------------------------------------
// PairPattern

PairPattern::PairPattern(int k_left, int k_right) : k_right_(k_right), right_of_(k_left, -1) {}

PairPattern PairPattern::from_matches(int k_left, int k_right,
                                      const std::vector<std::pair<int, int>>& matches) {
  PairPattern p(k_left, k_right);
  std::vector<bool> right_used(k_right, false);
  for (auto [i, j] : matches) {
    if (i < 1 || i > k_left || j < 1 || j > k_right)
      throw SpecError("match (" + std::to_string(i) + "," + std::to_string(j) +
                      ") outside coordinate range");
    if (p.right_of_[i - 1] != -1)
      throw SpecError("left coordinate " + std::to_string(i) + " matched twice");
    if (right_used[j - 1])
      throw SpecError("right coordinate " + std::to_string(j) + " matched twice");
    p.right_of_[i - 1] = j - 1;
    right_used[j - 1] = true;
  }
  return p;
}

PairPattern PairPattern::identity(int k) {
  PairPattern p(k, k);
  std::iota(p.right_of_.begin(), p.right_of_.end(), 0);
  return p;
}

PairPattern PairPattern::between(const Tuple& u, const Tuple& v) {
  PairPattern p(static_cast<int>(u.size()), static_cast<int>(v.size()));
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (u[i] == v[j]) p.right_of_[i] = static_cast<int>(j);
  return p;
}

int PairPattern::num_matches() const {
  return static_cast<int>(std::count_if(right_of_.begin(), right_of_.end(),
                                        [](int j) { return j >= 0; }));
}

std::vector<std::pair<int, int>> PairPattern::matches() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < k_left(); ++i)
    if (right_of_[i] >= 0) out.emplace_back(i + 1, right_of_[i] + 1);
  return out;
}

PairPattern PairPattern::transposed() const {
  PairPattern t(k_right_, k_left());
  for (int i = 0; i < k_left(); ++i)
    if (right_of_[i] >= 0) t.right_of_[right_of_[i]] = i;
  return t;
}

PairPattern PairPattern::relabeled(const Permutation& left, const Permutation& right) const {
  PairPattern r(k_left(), k_right_);
  for (int i = 0; i < k_left(); ++i)
    if (right_of_[i] >= 0) r.right_of_[left[i]] = right[right_of_[i]];
  return r;
}

std::uint64_t PairPattern::code() const {
  std::uint64_t c = 0, base = static_cast<std::uint64_t>(k_right_) + 1;
  for (auto it = right_of_.rbegin(); it != right_of_.rend(); ++it)
    c = c * base + static_cast<std::uint64_t>(*it + 1);
  return c;
}

std::string PairPattern::to_string() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (auto [i, j] : matches()) {
    if (!first) out << ",";
    first = false;
    out << "(" << i << "," << j << ")";
  }
  out << "}";
  return out.str();
}

std::strong_ordering operator<=>(const PairPattern& a, const PairPattern& b) {
  if (auto c = a.k_right_ <=> b.k_right_; c != 0) return c;
  if (auto c = a.right_of_.size() <=> b.right_of_.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.right_of_.size(); ++i) {
    int x = a.right_of_[i] < 0 ? a.k_right_ : a.right_of_[i];
    int y = b.right_of_[i] < 0 ? b.k_right_ : b.right_of_[i];
    if (auto c = x <=> y; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Permutations and groups

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation c(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = a[b[i]];
  return c;
}

Permutation inverse(const Permutation& p) {
  Permutation q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

bool is_permutation(const Permutation& p, int k) {
  if (static_cast<int>(p.size()) != k) return false;
  std::vector<bool> seen(k, false);
  for (int x : p) {
    if (x < 0 || x >= k || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

PermutationGroup::PermutationGroup(int k, std::vector<Permutation> generators)
    : k_(k), generators_(std::move(generators)) {
  for (const auto& g : generators_)
    if (!is_permutation(g, k)) throw SpecError("group generator is not a permutation of [k]");
  Permutation id(k);
  std::iota(id.begin(), id.end(), 0);
  std::set<Permutation> seen{id};
  std::queue<Permutation> frontier;
  frontier.push(id);
  while (!frontier.empty()) {
    Permutation p = frontier.front();
    frontier.pop();
    for (const auto& g : generators_) {
      Permutation q = compose(g, p);
      if (seen.insert(q).second) frontier.push(std::move(q));
    }
  }
  elements_.assign(seen.begin(), seen.end());
}

// ---------------------------------------------------------------------------
// Tuple canonicalization

namespace {

int factorial(int k) { return k <= 1 ? 1 : k * factorial(k - 1); }

int lehmer_rank(const Permutation& p) {
  const int k = static_cast<int>(p.size());
  int rank = 0;
  for (int i = 0; i < k; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < k; ++j) smaller += (p[j] < p[i]);
    rank = rank * (k - i) + smaller;
  }
  return rank;
}

Permutation act_on_positions(const Permutation& arrangement, const Permutation& h) {
  Permutation r(arrangement.size());
  for (std::size_t i = 0; i < arrangement.size(); ++i) r[i] = arrangement[h[i]];
  return r;
}

}  // namespace

TupleCanonicalizer::TupleCanonicalizer(const PermutationGroup& group) : k_(group.degree()) {
  const int total = factorial(k_);
  by_rank_.resize(total);
  Permutation p(k_);
  std::iota(p.begin(), p.end(), 0);
  do {
    by_rank_[lehmer_rank(p)] = p;
  } while (std::next_permutation(p.begin(), p.end()));

  canonical_index_.assign(total, -1);
  for (int start = 0; start < total; ++start) {
    if (canonical_index_[start] != -1) continue;
    std::vector<int> orbit{start};
    std::set<int> seen{start};
    for (std::size_t head = 0; head < orbit.size(); ++head) {
      for (const auto& g : group.generators()) {
        int next = lehmer_rank(act_on_positions(by_rank_[orbit[head]], g));
        if (seen.insert(next).second) orbit.push_back(next);
      }
    }
    // Lehmer rank order coincides with lexicographic order.
    int best = *std::min_element(orbit.begin(), orbit.end());
    for (int r : orbit) canonical_index_[r] = best;
    minimal_.push_back(by_rank_[best]);
  }
  std::sort(minimal_.begin(), minimal_.end());
}

Tuple TupleCanonicalizer::canonical(const Tuple& t) const {
  Tuple sorted = t;
  std::sort(sorted.begin(), sorted.end());
  Permutation ranks(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    ranks[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), t[i]) -
                                sorted.begin());
  const Permutation& c = by_rank_[canonical_index_[lehmer_rank(ranks)]];
  Tuple out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = sorted[c[i]];
  return out;
}

// ---------------------------------------------------------------------------
// Pattern canonicalization

PatternCanonicalizer::PatternCanonicalizer(const PermutationGroup& group)
    : k_(group.degree()), group_(group) {}

std::size_t PatternCanonicalizer::orbit_id(const PairPattern& p) {
  if (auto it = id_of_code_.find(p.code()); it != id_of_code_.end()) return it->second;
  Permutation id(k_);
  std::iota(id.begin(), id.end(), 0);
  OrbitData data;
  data.members.push_back(p);
  std::unordered_map<std::uint64_t, bool> seen{{p.code(), true}};
  for (std::size_t head = 0; head < data.members.size(); ++head) {
    for (const auto& g : group_.generators()) {
      for (const PairPattern& q : {data.members[head].relabeled(g, id),
                                   data.members[head].relabeled(id, g)}) {
        if (seen.emplace(q.code(), true).second) data.members.push_back(q);
      }
    }
  }
  data.canonical = *std::min_element(data.members.begin(), data.members.end());
  const std::size_t id_new = orbits_.size();
  for (const auto& m : data.members) id_of_code_[m.code()] = id_new;
  orbits_.push_back(std::move(data));
  return id_new;
}

const PairPattern& PatternCanonicalizer::canonical(const PairPattern& p) {
  return orbits_[orbit_id(p)].canonical;
}

const std::vector<PairPattern>& PatternCanonicalizer::orbit(const PairPattern& p) {
  return orbits_[orbit_id(p)].members;
}

std::vector<PairPattern> PatternCanonicalizer::all_canonical_patterns() {
  std::set<PairPattern> found;
  PairPattern current(k_, k_);
  std::vector<bool> used(k_, false);
  std::vector<int> assignment(k_, -1);
  auto recurse = [&](auto&& self, int i) -> void {
    if (i == k_) {
      std::vector<std::pair<int, int>> m;
      for (int a = 0; a < k_; ++a)
        if (assignment[a] >= 0) m.emplace_back(a + 1, assignment[a] + 1);
      found.insert(canonical(PairPattern::from_matches(k_, k_, m)));
      return;
    }
    assignment[i] = -1;
    self(self, i + 1);
    for (int j = 0; j < k_; ++j) {
      if (used[j]) continue;
      used[j] = true;
      assignment[i] = j;
      self(self, i + 1);
      used[j] = false;
    }
    assignment[i] = -1;
  };
  recurse(recurse, 0);
  std::vector<PairPattern> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(), [](const PairPattern& a, const PairPattern& b) {
    return a.num_matches() > b.num_matches();
  });
  return out;
}

}  // namespace fiwalk
