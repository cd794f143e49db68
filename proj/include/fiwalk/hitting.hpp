#pragma once

// Expected hitting times and the alpha-large-set hitting time
// t_hit(alpha) = max over sets A with pi(A) >= alpha and starts x of E_x[tau_A].

#include <cstddef>
#include <string>
#include <vector>

#include "fiwalk/chain.hpp"

namespace fiwalk {

inline constexpr std::size_t kDefaultHittingCap = 40;

/// Exact E_x[tau_A] for every x; zero on the target. Solves (I - P_VV) Q = 1
/// on the complement V.
std::vector<Rational> expected_hitting_times(const Chain& chain, const std::vector<int>& target);

struct HittingReport {
  Rational alpha;
  Rational t_hit;
  std::vector<int> argmax_set;
  int argmax_start = 0;
  Rational argmax_mass;
  std::size_t minimal_sets_visited = 0;
};

/// Exact maximum over all qualifying subsets. Since E_x[tau_A] can only drop
/// when A grows, only inclusion-minimal qualifying sets are searched, with
/// branch-and-bound pruning; the winner is re-solved exactly. Throws
/// DomainError above `cap` states.
HittingReport large_set_hitting_time(const Chain& chain, const Rational& alpha,
                                     std::size_t cap = kDefaultHittingCap);

struct PeresSousiReport {
  Rational alpha;
  Rational epsilon;
  long t_mix = 0;
  Rational t_hit;
  double ratio = 0;  // t_mix / t_hit
  bool finite_positive = false;
  std::string note;
};

PeresSousiReport peres_sousi_ratio(long t_mix, const Rational& epsilon, const HittingReport& hit);
/// Uses the chain's worst-case mixing time, or the mixing time from `start`
/// when start >= 0 (the root of an orbit walk).
PeresSousiReport peres_sousi_ratio(const Chain& chain, const Rational& alpha,
                                   const Rational& epsilon, int start = -1,
                                   std::size_t cap = kDefaultHittingCap);

}  // namespace fiwalk
