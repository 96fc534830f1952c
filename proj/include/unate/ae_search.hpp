#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "unate/edges.hpp"
#include "unate/hypercube.hpp"
#include "unate/oracle.hpp"
#include "unate/stats.hpp"

namespace unate {

enum class ProbabilityMethod { exact_dp, monte_carlo };

/// Largest |S| for which success probabilities are computed exactly.
inline constexpr std::size_t kExactDpMaxSet = 12;

struct AeParams {
  std::size_t samples = 1;  // L
  ProbabilityMethod method = ProbabilityMethod::exact_dp;
  std::size_t mc_trials = 2048;

  /// L = ceil(4 log2 n), at least 1.
  static AeParams for_arity(std::size_t n) {
    AeParams p;
    const double l = 4.0 * std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));
    p.samples = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(l - 1e-12)));
    return p;
  }

  void validate() const {
    require(samples >= 1, "AeParams: L must be >= 1");
    require(method != ProbabilityMethod::monte_carlo || mc_trials >= 100,
            "AeParams: Monte Carlo needs at least 100 trials");
  }
};

struct AeOutcome {
  std::optional<std::size_t> direction;
  bool base_value = false;  // f(x), needed to classify the edge
  std::size_t queries = 0;
};

/// Queries issued by one call on a set of size `set_size`, excluding the
/// confirmation query of step 3 (which runs only when the intersection is a
/// singleton).
inline std::uint64_t ae_search_base_cost(std::size_t set_size, std::size_t samples) {
  return set_size == 2 ? 2 : samples + 1;
}

/// Adaptive edge search: looks for i in S with f(x^(i)) != f(x) using L
/// random half-sets of S. Every returned index is confirmed by a query.
inline AeOutcome ae_search(const FunctionOracle& f, const Point& x, const IndexSet& s, Rng& rng,
                           const AeParams& p) {
  require(!s.empty() && s.size() % 2 == 0, "ae_search: S must be nonempty and of even size");
  AeOutcome out;
  out.base_value = f(x);
  out.queries = 1;

  if (s.size() == 2) {
    const std::size_t i = s[static_cast<std::size_t>(rng.below(2))];
    ++out.queries;
    if (f(flip(x, {i})) != out.base_value) out.direction = i;
    return out;
  }

  // hits[k] counts the disagreeing half-sets containing s[k]; C is the set of
  // members contained in all of them.
  std::vector<std::uint32_t> hits(s.size(), 0);
  std::uint32_t disagreeing = 0;
  for (std::size_t l = 0; l < p.samples; ++l) {
    const IndexSet t = random_subset(rng, s, s.size() / 2);
    ++out.queries;
    if (f(flip(x, t)) != out.base_value) {
      ++disagreeing;
      for (auto i : t)
        ++hits[static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), i) - s.begin())];
    }
  }
  if (disagreeing == 0) return out;

  std::optional<std::size_t> only;
  std::size_t in_c = 0;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (hits[k] == disagreeing) {
      ++in_c;
      only = s[k];
    }
  if (in_c != 1) return out;

  ++out.queries;
  if (f(x.flipped(*only)) != out.base_value) out.direction = only;
  return out;
}

struct ProbabilityResult {
  double value = 0;
  double radius = 0;  // 99% confidence radius; 0 when exact
  bool exact = true;
  std::size_t trials = 0;
};

namespace detail {

/// Exact Pr[ae_search returns target] by a forward DP over the running
/// intersection C, represented as a bitmask over the positions of S. The
/// extra state "no disagreeing sample yet" is tracked separately.
inline double ae_success_dp(const FunctionOracle& f, const Point& x, const IndexSet& s,
                            std::size_t target_pos, bool base, std::size_t samples) {
  const std::size_t m = s.size();
  const std::size_t half = m / 2;
  std::vector<std::uint32_t> disagree;
  std::size_t total = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != half) continue;
    ++total;
    Point y = x;
    for (std::size_t k = 0; k < m; ++k)
      if (mask >> k & 1u) y.flip_in_place(s[k]);
    if (f(y) != base) disagree.push_back(mask);
  }
  const double per = 1.0 / static_cast<double>(total);
  const double stay = static_cast<double>(total - disagree.size()) * per;

  double none = 1.0;
  std::vector<double> prob(std::size_t{1} << m, 0.0), next(prob.size(), 0.0);
  std::vector<std::uint32_t> live, next_live;
  std::vector<char> marked(prob.size(), 0);
  for (std::size_t step = 0; step < samples; ++step) {
    next_live.clear();
    auto add = [&](std::uint32_t c, double v) {
      if (!marked[c]) {
        marked[c] = 1;
        next_live.push_back(c);
      }
      next[c] += v;
    };
    for (auto t : disagree) add(t, none * per);
    for (auto c : live) {
      const double pc = prob[c];
      add(c, pc * stay);
      for (auto t : disagree) add(c & t, pc * per);
    }
    none *= stay;
    for (auto c : live) prob[c] = 0.0;
    for (auto c : next_live) {
      prob[c] = next[c];
      next[c] = 0.0;
      marked[c] = 0;
    }
    live.swap(next_live);
  }
  return prob[std::uint32_t{1} << target_pos];
}

} // namespace detail

/// Pr[ae_search(f, x, S) returns i]. Exact for |S| <= 12 under exact_dp;
/// otherwise a Monte Carlo estimate over p.mc_trials runs seeded from mc_seed.
inline ProbabilityResult success_probability(const FunctionOracle& f, const Point& x,
                                             const IndexSet& s, std::size_t i, const AeParams& p,
                                             std::uint64_t mc_seed = 0) {
  require(!s.empty() && s.size() % 2 == 0, "success_probability: S must be nonempty and even");
  require(s.contains(i), "success_probability: i must belong to S");
  p.validate();
  const bool base = f(x);
  if (f(x.flipped(i)) == base) return {0.0, 0.0, true, 0};
  if (s.size() == 2) return {0.5, 0.0, true, 0};

  if (p.method == ProbabilityMethod::exact_dp && s.size() <= kExactDpMaxSet) {
    const auto pos =
        static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), i) - s.begin());
    return {detail::ae_success_dp(f, x, s, pos, base, p.samples), 0.0, true, 0};
  }

  Rng rng(mc_seed, x.hash() ^ (static_cast<std::uint64_t>(i) << 32) ^ s.size());
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < p.mc_trials; ++k)
    if (ae_search(f, x, s, rng, p).direction == i) ++hits;
  ProbabilityResult r;
  r.exact = false;
  r.trials = p.mc_trials;
  r.value = static_cast<double>(hits) / static_cast<double>(p.mc_trials);
  const auto ci = wilson_interval(hits, p.mc_trials, 2.576);
  r.radius = std::max(r.value - ci.low, ci.high - r.value);
  return r;
}

/// Binary search for a bi-chromatic edge between x and y (f(x) != f(y)),
/// halving the set of differing coordinates with a uniformly drawn half each
/// round. Uses 2 + ceil(log2 |x xor y|) queries.
inline LabeledEdge binary_search_edge(const FunctionOracle& f, const Point& x, const Point& y,
                                      Rng& rng) {
  require(x.arity() == y.arity(), "binary_search_edge: arity mismatch");
  Point lo = x, hi = y;
  bool f_lo = f(lo);
  const bool f_hi = f(hi);
  require(f_lo != f_hi, "binary_search_edge: f(x) must differ from f(y)");
  IndexSet diff = differing_coordinates(lo, hi);
  while (diff.size() > 1) {
    const IndexSet half = random_subset(rng, diff, diff.size() / 2);
    const Point z = flip(lo, half);
    if (f(z) != f_lo) {
      hi = z;
      diff = half;
    } else {
      lo = z;
      std::vector<std::size_t> rest;
      std::set_difference(diff.begin(), diff.end(), half.begin(), half.end(),
                          std::back_inserter(rest));
      diff = IndexSet(std::move(rest));
    }
  }
  return LabeledEdge::from_values(lo, diff[0], f_lo, f_hi);
}

} // namespace unate
