#include "fiwalk/family.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

#include "fiwalk/errors.hpp"
#include "json.hpp"

namespace fiwalk {

namespace {

Permutation identity_permutation(int k) {
  Permutation p(k);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

std::string permutation_to_string(const Permutation& zero_based) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < zero_based.size(); ++i) out << (i ? "," : "") << zero_based[i] + 1;
  out << "]";
  return out.str();
}

/// Weight must be nonnegative on every n >= n_min: checked on a window that
/// covers all sign changes of low-degree numerators plus the limiting sign.
void check_weight_nonnegative(const RationalFunction& w, int n_min, std::size_t index) {
  const int span = 2 * (w.numerator_degree() + w.denominator_degree()) + 16;
  for (int n = n_min; n < n_min + span; ++n) {
    Rational v;
    try {
      v = w.evaluate(n);
    } catch (const std::domain_error&) {
      throw SpecError("edge_orbits[" + std::to_string(index) + "].weight has a pole at n = " +
                      std::to_string(n));
    }
    if (v < 0)
      throw SpecError("edge_orbits[" + std::to_string(index) + "].weight is negative at n = " +
                      std::to_string(n));
  }
  if (!w.is_zero() && sgn(w.numerator().back()) * sgn(w.denominator().back()) < 0)
    throw SpecError("edge_orbits[" + std::to_string(index) +
                    "].weight is eventually negative");
}

}  // namespace

// ---------------------------------------------------------------------------
// FamilySpec

FamilySpec FamilySpec::create(std::string name, int k, const std::vector<Permutation>& generators,
                              std::vector<EdgeOrbit> edge_orbits, std::optional<int> n_min,
                              std::string description) {
  if (name.empty()) throw SpecError("name: must be a nonempty identifier");
  if (k < 1 || k > kMaxTupleLength)
    throw SpecError("k: tuple length must lie in [1, " + std::to_string(kMaxTupleLength) + "]");

  FamilySpec spec;
  spec.name_ = std::move(name);
  spec.description_ = std::move(description);
  spec.k_ = k;
  spec.n_min_ = n_min.value_or(2 * k + 1);
  if (spec.n_min_ < k + 1) throw SpecError("n_min: must be at least k + 1");

  std::vector<Permutation> zero_based;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    Permutation p = generators[g];
    for (int& x : p) --x;
    if (!is_permutation(p, k))
      throw SpecError("symmetry_generators[" + std::to_string(g) +
                      "]: not a permutation of [k] in one-line form");
    zero_based.push_back(std::move(p));
  }
  spec.generators_ = generators;
  spec.group_ = PermutationGroup(k, zero_based);

  if (edge_orbits.empty()) throw SpecError("edge_orbits: at least one edge orbit is required");
  PatternCanonicalizer patterns(spec.group_);
  const PairPattern loop = patterns.canonical(PairPattern::identity(k));

  std::vector<EdgeOrbit> raw = std::move(edge_orbits);
  std::vector<std::size_t> listed_index;  // raw position of each kept orbit
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string where = "edge_orbits[" + std::to_string(i) + "]";
    if (raw[i].pattern.k_left() != k || raw[i].pattern.k_right() != k)
      throw SpecError(where + ".matches: pattern shape must be k x k");
    if (patterns.canonical(raw[i].pattern) == loop)
      throw SpecError(where + ".matches: pattern relates a vertex to itself (self-loop)");
    if (raw[i].weight.is_zero()) throw SpecError(where + ".weight: identically zero");
    check_weight_nonnegative(raw[i].weight, spec.n_min_, i);

    const PairPattern canon = patterns.canonical(raw[i].pattern);
    bool duplicate = false;
    for (std::size_t e = 0; e < spec.edge_orbits_.size(); ++e) {
      if (spec.edge_orbits_[e].pattern != canon) continue;
      if (spec.edge_orbits_[e].weight == raw[i].weight) {
        duplicate = true;
        break;
      }
      // Locate a relabeling that carries one listed pattern to the other.
      std::string element = "a symmetry element";
      const auto& els = spec.group_.elements();
      for (std::size_t a = 0; a < els.size() && element[0] == 'a'; ++a)
        for (std::size_t b = 0; b < els.size(); ++b)
          if (raw[listed_index[e]].pattern.relabeled(els[a], els[b]) == raw[i].pattern) {
            element = "(" + permutation_to_string(els[a]) + ", " + permutation_to_string(els[b]) +
                      ")";
            break;
          }
      throw SpecError("symmetry-closure violation: edge_orbits[" + std::to_string(listed_index[e]) +
                      "] " + raw[listed_index[e]].pattern.to_string() + " is carried by " +
                      element + " to edge_orbits[" + std::to_string(i) + "] " +
                      raw[i].pattern.to_string() + " with a different weight");
    }
    if (duplicate) continue;
    spec.edge_orbits_.push_back({canon, raw[i].weight});
    listed_index.push_back(i);
  }

  // Closure under H x H, checked on generator pairs.
  const Permutation id = identity_permutation(k);
  for (std::size_t e = 0; e < spec.edge_orbits_.size(); ++e) {
    for (const auto& g : spec.group_.generators()) {
      for (const auto& moved : {spec.edge_orbits_[e].pattern.relabeled(g, id),
                                spec.edge_orbits_[e].pattern.relabeled(id, g)}) {
        auto hit = spec.orbit_index(patterns.canonical(moved));
        if (!hit || !(spec.edge_orbits_[*hit].weight == spec.edge_orbits_[e].weight))
          throw SpecError("symmetry-closure violation: edge orbit " +
                          spec.edge_orbits_[e].pattern.to_string() + " relabeled by " +
                          permutation_to_string(g) + " is not a listed orbit");
      }
    }
  }

  // Undirectedness.
  for (std::size_t e = 0; e < spec.edge_orbits_.size(); ++e) {
    const PairPattern t = patterns.canonical(spec.edge_orbits_[e].pattern.transposed());
    auto hit = spec.orbit_index(t);
    const std::string where = "edge_orbits[" + std::to_string(listed_index[e]) + "]";
    if (!hit)
      throw SpecError("transpose-closure violation: " + where + " " +
                      raw[listed_index[e]].pattern.to_string() + " has transpose " +
                      t.to_string() + " which is not listed");
    if (!(spec.edge_orbits_[*hit].weight == spec.edge_orbits_[e].weight))
      throw SpecError("transpose-closure violation: " + where + " and its transpose " +
                      t.to_string() + " carry different weights");
  }
  return spec;
}

std::optional<std::size_t> FamilySpec::orbit_index(const PairPattern& canonical) const {
  for (std::size_t e = 0; e < edge_orbits_.size(); ++e)
    if (edge_orbits_[e].pattern == canonical) return e;
  return std::nullopt;
}

Integer FamilySpec::vertex_count(long n) const {
  if (n < k_) return 0;
  return falling_factorial(n, k_) / static_cast<unsigned long>(group_.order());
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using nlohmann::json;

Integer parse_coefficient(const json& c, const std::string& where) {
  if (c.is_number_integer()) return Integer(c.get<long>());
  if (c.is_string()) {
    try {
      return Integer(c.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  }
  throw SpecError(where + ": coefficient must be an integer");
}

std::vector<Integer> parse_coefficients(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SpecError(where + ": expected a nonempty integer list");
  std::vector<Integer> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_coefficient(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

int parse_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SpecError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace

FamilySpec parse_family_spec(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("document: not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) throw SpecError("document: top level must be an object");
  static const std::vector<std::string> known = {"name", "k", "symmetry_generators",
                                                 "edge_orbits", "n_min", "description"};
  for (const auto& [key, _] : doc.items()) {
    if (key == "vertex_orbits" || key == "orbits")
      throw SpecError(key + ": multi-orbit vertex sets are not supported; a family has a "
                            "single (k, H) vertex orbit");
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw SpecError(key + ": unknown field");
  }
  for (const char* required : {"name", "k", "edge_orbits"})
    if (!doc.contains(required)) throw SpecError(std::string(required) + ": missing field");

  if (!doc["name"].is_string()) throw SpecError("name: expected a string");
  const int k = parse_int(doc["k"], "k");

  std::vector<Permutation> generators;
  if (doc.contains("symmetry_generators")) {
    const json& gens = doc["symmetry_generators"];
    if (!gens.is_array()) throw SpecError("symmetry_generators: expected a list");
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const std::string where = "symmetry_generators[" + std::to_string(g) + "]";
      if (!gens[g].is_array()) throw SpecError(where + ": expected a one-line permutation");
      Permutation p;
      for (std::size_t i = 0; i < gens[g].size(); ++i)
        p.push_back(parse_int(gens[g][i], where + "[" + std::to_string(i) + "]"));
      generators.push_back(std::move(p));
    }
  }

  const json& edges = doc["edge_orbits"];
  if (!edges.is_array()) throw SpecError("edge_orbits: expected a list");
  std::vector<EdgeOrbit> orbits;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = "edge_orbits[" + std::to_string(e) + "]";
    const json& eo = edges[e];
    if (!eo.is_object() || !eo.contains("matches"))
      throw SpecError(where + ": expected an object with 'matches'");
    for (const auto& [key, _] : eo.items())
      if (key != "matches" && key != "weight") throw SpecError(where + "." + key + ": unknown field");
    const json& m = eo["matches"];
    if (!m.is_array()) throw SpecError(where + ".matches: expected a list of [i, j] pairs");
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t p = 0; p < m.size(); ++p) {
      const std::string pw = where + ".matches[" + std::to_string(p) + "]";
      if (!m[p].is_array() || m[p].size() != 2) throw SpecError(pw + ": expected [i, j]");
      pairs.emplace_back(parse_int(m[p][0], pw), parse_int(m[p][1], pw));
    }
    if (k < 1 || k > kMaxTupleLength)
      throw SpecError("k: tuple length must lie in [1, " + std::to_string(kMaxTupleLength) + "]");
    PairPattern pattern;
    try {
      pattern = PairPattern::from_matches(k, k, pairs);
    } catch (const SpecError& err) {
      throw SpecError(where + ".matches: " + err.what());
    }
    RationalFunction weight = RationalFunction::constant(1);
    if (eo.contains("weight")) {
      const json& w = eo["weight"];
      if (!w.is_object() || !w.contains("num"))
        throw SpecError(where + ".weight: expected {num: [...], den: [...]}");
      for (const auto& [key, _] : w.items())
        if (key != "num" && key != "den")
          throw SpecError(where + ".weight." + key + ": unknown field");
      auto num = parse_coefficients(w["num"], where + ".weight.num");
      std::vector<Integer> den{Integer(1)};
      if (w.contains("den")) den = parse_coefficients(w["den"], where + ".weight.den");
      try {
        weight = RationalFunction(std::move(num), std::move(den));
      } catch (const std::domain_error&) {
        throw SpecError(where + ".weight.den: identically zero");
      }
    }
    orbits.push_back({std::move(pattern), std::move(weight)});
  }

  std::optional<int> n_min;
  if (doc.contains("n_min")) n_min = parse_int(doc["n_min"], "n_min");
  std::string description;
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) throw SpecError("description: expected a string");
    description = doc["description"].get<std::string>();
  }
  return FamilySpec::create(doc["name"].get<std::string>(), k, generators, std::move(orbits),
                            n_min, std::move(description));
}

// ---------------------------------------------------------------------------
// Built-in catalog

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"complete", "", {}, "3", "labels 1..n, every two distinct labels adjacent (K_n)", 0.5},
      {"kneser", "r", {2}, "2r+1", "r-element subsets, disjointness edges (KG(n,r))", 0.5},
      {"johnson", "r", {2}, "2r+1",
       "r-element subsets, adjacent when they share r-1 elements (J(n,r))", 0.3},
      {"ordered-pair-weighted", "", {}, "5",
       "ordered pairs; replace the first entry with probability 1/n or the second with "
       "probability (n-1)/n",
       0.35},
      {"triple-replace-one", "", {}, "7",
       "ordered triples; replace a random entry with any unused number", 0.25},
      {"triple-permute-or-replace", "", {}, "7",
       "ordered triples; with probability 1/2 rearrange the labels by a uniformly random "
       "non-identity permutation, otherwise replace the last one with any unused number",
       0.2},
      {"shift-register", "k", {3}, "2k+1",
       "k-tuples; shift all entries one place left or right, deleting the entry at that end "
       "and introducing an unused number at the other",
       0.2},
      {"triple-weighted", "", {}, "7",
       "ordered triples; replace the first entry with probability 1/n or the second and third "
       "with probability (n-1)/n",
       0.35},
};
  return catalog;
}

namespace {

EdgeOrbit orbit(int k, std::vector<std::pair<int, int>> matches,
                RationalFunction weight = RationalFunction::constant(1)) {
  return {PairPattern::from_matches(k, k, matches), std::move(weight)};
}

RationalFunction linear(long c0, long c1) { return RationalFunction({c0, c1}, {1}); }

std::vector<Permutation> full_symmetric_generators(int k) {
  if (k < 2) return {};
  Permutation swap(k), cycle(k);
  std::iota(swap.begin(), swap.end(), 1);
  std::swap(swap[0], swap[1]);
  for (int i = 0; i < k; ++i) cycle[i] = (i + 1) % k + 1;
  return {swap, cycle};
}

}  // namespace

FamilySpec builtin_family(std::string_view name, const std::vector<long>& params) {
  const auto& catalog = builtin_catalog();
  auto it = std::find_if(catalog.begin(), catalog.end(),
                         [&](const BuiltinInfo& b) { return b.name == name; });
  if (it == catalog.end()) throw SpecError("unknown built-in family '" + std::string(name) + "'");
  const std::vector<long>& p = params.empty() ? it->defaults : params;
  if (p.size() != it->defaults.size())
    throw SpecError("family '" + it->name + "' takes " + std::to_string(it->defaults.size()) +
                    " parameter(s), got " + std::to_string(p.size()));
  const std::string label = it->name + (p.empty() ? "" : "-" + std::to_string(p[0]));

  if (name == "complete") return FamilySpec::create(label, 1, {}, {orbit(1, {})}, 3, it->description);
  if (name == "kneser" || name == "johnson") {
    const long r = p[0];
    if (r < 1 || r > kMaxTupleLength)
      throw SpecError("family '" + it->name + "': r must lie in [1, " +
                      std::to_string(kMaxTupleLength) + "]");
    const int k = static_cast<int>(r);
    std::vector<std::pair<int, int>> shared;
    if (name == "johnson")
      for (int i = 1; i < k; ++i) shared.emplace_back(i, i);
    return FamilySpec::create(label, k, full_symmetric_generators(k), {orbit(k, shared)}, {},
                              it->description);
  }
  if (name == "ordered-pair-weighted")
    return FamilySpec::create(label, 2, {}, {orbit(2, {{2, 2}}), orbit(2, {{1, 1}}, linear(-1, 1))},
                              5, it->description);
  if (name == "triple-replace-one")
    return FamilySpec::create(
        label, 3, {},
        {orbit(3, {{2, 2}, {3, 3}}), orbit(3, {{1, 1}, {3, 3}}), orbit(3, {{1, 1}, {2, 2}})}, 7,
        it->description);
  if (name == "triple-permute-or-replace") {
    // Five rearrangements share half the mass; the n-3 replacements share the rest.
    std::vector<EdgeOrbit> edges;
    Permutation sigma{0, 1, 2};
    while (std::next_permutation(sigma.begin(), sigma.end()))
      edges.push_back(orbit(3, {{1, sigma[0] + 1}, {2, sigma[1] + 1}, {3, sigma[2] + 1}},
                            linear(-3, 1)));
    edges.push_back(orbit(3, {{1, 1}, {2, 2}}, RationalFunction::constant(5)));
    return FamilySpec::create(label, 3, {}, std::move(edges), 7, it->description);
  }
  if (name == "shift-register") {
    const long kk = p[0];
    if (kk < 2 || kk > kMaxTupleLength)
      throw SpecError("family 'shift-register': k must lie in [2, " +
                      std::to_string(kMaxTupleLength) + "]");
    const int k = static_cast<int>(kk);
    std::vector<std::pair<int, int>> left, right;
    for (int i = 1; i < k; ++i) {
      left.emplace_back(i + 1, i);
      right.emplace_back(i, i + 1);
    }
    return FamilySpec::create(label, k, {}, {orbit(k, left), orbit(k, right)}, {},
                              it->description);
  }
  // triple-weighted: per-neighbor weights n-4 and n-1 give step probabilities 1/n and (n-1)/n.
  return FamilySpec::create(
      label, 3, {}, {orbit(3, {{2, 2}, {3, 3}}, linear(-4, 1)), orbit(3, {{1, 1}}, linear(-1, 1))},
      7, it->description);
}

// ---------------------------------------------------------------------------
// Vertices, neighbors, instances

Tuple canonical_tuple(const FamilySpec& spec, const Tuple& t) {
  return TupleCanonicalizer(spec.symmetry()).canonical(t);
}

std::vector<Tuple> enumerate_vertices(const FamilySpec& spec, int n, std::size_t cap) {
  if (n < spec.n_min())
    throw DomainError("n = " + std::to_string(n) + " is below n_min = " +
                      std::to_string(spec.n_min()) + " for family " + spec.name());
  const Integer count = spec.vertex_count(n);
  if (count > Integer(static_cast<unsigned long>(cap)))
    throw DomainError("vertex count " + count.get_str() + " at n = " + std::to_string(n) +
                      " exceeds the cap of " + std::to_string(cap));
  const int k = spec.k();
  TupleCanonicalizer canon(spec.symmetry());
  std::vector<Tuple> out;
  out.reserve(count.get_ui());
  std::vector<int> subset(k);
  std::iota(subset.begin(), subset.end(), 1);
  while (true) {
    for (const auto& arrangement : canon.canonical_arrangements()) {
      Tuple t(k);
      for (int i = 0; i < k; ++i) t[i] = subset[arrangement[i]];
      out.push_back(std::move(t));
    }
    int i = k - 1;
    while (i >= 0 && subset[i] == n - k + i + 1) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

PairPattern pair_orbit(const FamilySpec& spec, const Tuple& u, const Tuple& v) {
  if (static_cast<int>(u.size()) != spec.k() || static_cast<int>(v.size()) != spec.k())
    throw DomainError("pair_orbit: tuples must both have length k = " + std::to_string(spec.k()));
  PatternCanonicalizer canon(spec.symmetry());
  return canon.canonical(PairPattern::between(u, v));
}

void for_each_neighbor(const FamilySpec& spec, PatternCanonicalizer& patterns,
                       const TupleCanonicalizer& tuples, int n, const Tuple& y,
                       const std::function<void(const Tuple&, std::size_t)>& visit) {
  const int k = spec.k();
  std::vector<int> unused;
  for (int v = 1; v <= n; ++v)
    if (std::find(y.begin(), y.end(), v) == y.end()) unused.push_back(v);

  for (std::size_t e = 0; e < spec.edge_orbits().size(); ++e) {
    std::unordered_set<Tuple, TupleHash> seen;
    for (const PairPattern& raw : patterns.orbit(spec.edge_orbits()[e].pattern)) {
      Tuple z(k, 0);
      std::vector<int> free_slots;
      std::vector<bool> filled(k, false);
      for (int i = 0; i < k; ++i)
        if (raw.right_of(i) >= 0) {
          z[raw.right_of(i)] = y[i];
          filled[raw.right_of(i)] = true;
        }
      for (int j = 0; j < k; ++j)
        if (!filled[j]) free_slots.push_back(j);
      std::vector<bool> taken(unused.size(), false);
      auto fill = [&](auto&& self, std::size_t slot) -> void {
        if (slot == free_slots.size()) {
          Tuple c = tuples.canonical(z);
          if (seen.insert(c).second) visit(c, e);
          return;
        }
        for (std::size_t u = 0; u < unused.size(); ++u) {
          if (taken[u]) continue;
          taken[u] = true;
          z[free_slots[slot]] = unused[u];
          self(self, slot + 1);
          taken[u] = false;
        }
      };
      fill(fill, 0);
    }
  }
}

std::vector<Rational> orbit_weights(const FamilySpec& spec, long n) {
  std::vector<Rational> w;
  for (std::size_t e = 0; e < spec.edge_orbits().size(); ++e) {
    Rational v = spec.edge_orbits()[e].weight.evaluate(n);
    if (v < 0)
      throw DomainError("edge orbit " + std::to_string(e) + " of " + spec.name() +
                        " has negative weight at n = " + std::to_string(n));
    w.push_back(v);
  }
  return w;
}

int GraphInstance::index_of(const Tuple& canonical) const {
  auto it = index_.find(canonical);
  return it == index_.end() ? -1 : it->second;
}

std::string tuple_to_string(const Tuple& t) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i];
  out << ")";
  return out.str();
}

GraphInstance instantiate_graph(const FamilySpec& spec, int n, std::size_t cap) {
  GraphInstance g;
  g.spec_ = spec;
  g.n_ = n;
  g.vertices_ = enumerate_vertices(spec, n, cap);
  g.weights_ = orbit_weights(spec, n);
  for (std::size_t v = 0; v < g.vertices_.size(); ++v)
    g.index_.emplace(g.vertices_[v], static_cast<int>(v));

  PatternCanonicalizer patterns(spec.symmetry());
  TupleCanonicalizer tuples(spec.symmetry());
  g.adjacency_.resize(g.vertices_.size());
  for (std::size_t v = 0; v < g.vertices_.size(); ++v) {
    for_each_neighbor(spec, patterns, tuples, n, g.vertices_[v],
                      [&](const Tuple& z, std::size_t e) {
                        g.adjacency_[v].push_back({g.index_.at(z), static_cast<int>(e)});
                      });
    std::sort(g.adjacency_[v].begin(), g.adjacency_[v].end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }

  // Regularity and weighted symmetry.
  for (std::size_t v = 0; v < g.vertices_.size(); ++v) {
    Rational total = 0;
    for (const auto& nb : g.adjacency_[v]) {
      total += g.weights_[nb.orbit];
      const auto& back = g.adjacency_[nb.vertex];
      auto it = std::lower_bound(back.begin(), back.end(), static_cast<int>(v),
                                 [](const Neighbor& a, int x) { return a.vertex < x; });
      if (it == back.end() || it->vertex != static_cast<int>(v) ||
          g.weights_[it->orbit] != g.weights_[nb.orbit])
        throw InvariantViolation("adjacency is not symmetric between " +
                                 tuple_to_string(g.vertices_[v]) + " and " +
                                 tuple_to_string(g.vertices_[nb.vertex]));
    }
    if (v == 0) {
      g.degree_weight_ = total;
    } else if (total != g.degree_weight_) {
      throw InvariantViolation("instance is not regular: " + tuple_to_string(g.vertices_[v]) +
                               " has weight " + to_string(total) + " vs " +
                               to_string(g.degree_weight_));
    }
  }
  if (g.degree_weight_ <= 0)
    throw DomainError("instance at n = " + std::to_string(n) + " has no edges");

  // Connectivity.
  std::vector<bool> reached(g.vertices_.size(), false);
  std::queue<int> frontier;
  frontier.push(0);
  reached[0] = true;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (const auto& nb : g.adjacency_[v])
      if (!reached[nb.vertex]) {
        reached[nb.vertex] = true;
        frontier.push(nb.vertex);
      }
  }
  if (auto it = std::find(reached.begin(), reached.end(), false); it != reached.end())
    throw DomainError("instance " + spec.name() + " at n = " + std::to_string(n) +
                      " is disconnected: " + tuple_to_string(g.vertices_[0]) + " and " +
                      tuple_to_string(g.vertices_[it - reached.begin()]) +
                      " lie in different components");
  return g;
}

}  // namespace fiwalk

namespace fiwalk {

EquivarianceReport check_equivariance(const FamilySpec& spec, int n, int n_big, std::size_t trials,
                                      std::uint64_t seed) {
  if (n < spec.k() || n_big < n)
    throw DomainError("equivariance check needs k <= n <= n_big");
  std::mt19937_64 rng(seed);
  std::vector<int> labels(n_big);
  std::iota(labels.begin(), labels.end(), 1);
  auto draw = [&](int range) {
    std::vector<int> pool(range);
    std::iota(pool.begin(), pool.end(), 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    return Tuple(pool.begin(), pool.begin() + spec.k());
  };
  EquivarianceReport r;
  for (std::size_t i = 0; i < trials; ++i) {
    const Tuple u = draw(n), v = draw(n);
    std::shuffle(labels.begin(), labels.end(), rng);
    auto image = [&](const Tuple& t) {
      Tuple out(t.size());
      for (std::size_t j = 0; j < t.size(); ++j) out[j] = labels[t[j] - 1];
      return out;
    };
    const Tuple fu = image(u), fv = image(v);
    ++r.trials;
    const bool pattern_ok = pair_orbit(spec, u, v) == pair_orbit(spec, fu, fv);
    const bool class_ok = canonical_tuple(spec, image(canonical_tuple(spec, u))) ==
                          canonical_tuple(spec, fu);
    if (!pattern_ok || !class_ok) {
      if (r.failures++ == 0)
        r.first_failure = "u = " + tuple_to_string(u) + ", v = " + tuple_to_string(v) +
                          " mapped to " + tuple_to_string(fu) + ", " + tuple_to_string(fv);
    }
  }
  return r;
}

}  // namespace fiwalk
