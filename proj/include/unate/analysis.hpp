#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "unate/ae_search.hpp"
#include "unate/edge_stats.hpp"
#include "unate/edges.hpp"
#include "unate/hypercube.hpp"
#include "unate/oracle.hpp"
#include "unate/stats.hpp"
#include "unate/truth_table.hpp"

namespace unate {

/// Hard cap on exhaustive set enumeration.
inline constexpr double kEnumerationCap = 1e5;
inline constexpr std::size_t kExactScoreMaxArity = 12;

enum class Sign { plus, minus };

inline const char* to_string(Sign s) { return s == Sign::plus ? "+" : "-"; }

/// Number of score levels j: floor(log2(sqrt(n) / log2 n)), at least 1.
inline std::size_t score_levels(std::size_t n) {
  if (n <= 2) return 1;
  const double nn = static_cast<double>(n);
  const double v = std::floor(std::log2(std::sqrt(nn) / std::log2(nn)));
  return v < 1 ? 1 : static_cast<std::size_t>(v);
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double r = 1;
  for (std::size_t a = 1; a <= k; ++a) r = r * static_cast<double>(n - k + a) / static_cast<double>(a);
  return std::round(r);
}

/// Calls fn(IndexSet) for every k-subset of `ground` in lexicographic order.
inline void for_each_subset(const IndexSet& ground, std::size_t k,
                            const std::function<void(const IndexSet&)>& fn) {
  const std::size_t m = ground.size();
  if (k > m) return;
  std::vector<std::size_t> pos(k);
  for (std::size_t a = 0; a < k; ++a) pos[a] = a;
  std::vector<std::size_t> members(k);
  while (true) {
    for (std::size_t a = 0; a < k; ++a) members[a] = ground[pos[a]];
    fn(IndexSet(members));
    std::size_t a = k;
    while (a > 0 && pos[a - 1] == m - k + a - 1) --a;
    if (a == 0) return;
    ++pos[a - 1];
    for (std::size_t b = a; b < k; ++b) pos[b] = pos[b - 1] + 1;
  }
}

/// j with |S| = 2^j - 1, or nullopt.
inline std::optional<std::size_t> level_of_size(std::size_t size) {
  const std::size_t v = size + 1;
  if (v < 2 || !std::has_single_bit(v)) return std::nullopt;
  return static_cast<std::size_t>(std::countr_zero(v));
}

/// True when (x, x^(i)) is bi-chromatic with the orientation `sign` asks for
/// (f(x) = x_i for monotone). Two queries.
inline bool edge_oriented(const FunctionOracle& f, const Point& x, std::size_t i, Sign sign) {
  const bool fx = f(x);
  if (f(x.flipped(i)) == fx) return false;
  const bool monotone = fx == x[i];
  return monotone == (sign == Sign::plus);
}

// ---------------------------------------------------------------------------
// Influence

/// Samples uniform edges (uniform x, uniform direction) and returns
/// (n/2) * (fraction bi-chromatic) with a 95% normal radius.
inline Estimate estimate_influence(const FunctionOracle& f, std::size_t samples, Rng& rng) {
  require(samples >= 1, "estimate_influence: samples must be >= 1");
  const std::size_t n = f.arity();
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Point x = random_point(rng, n);
    const auto i = static_cast<std::size_t>(rng.below(n));
    if (f(x) != f(x.flipped(i))) ++hits;
  }
  Estimate e = proportion_estimate(hits, samples);
  const double scale = static_cast<double>(n) / 2.0;
  e.value *= scale;
  e.std_error *= scale;
  e.radius *= scale;
  return e;
}

// ---------------------------------------------------------------------------
// Good pairs and strong points

struct GoodPairResult {
  bool good = false;
  bool oriented = false;
  ProbabilityResult probability;
};

/// (x, S) is good for E_i^sign when the edge (x, x^(i)) has that orientation
/// and ae_search(x, S + i) returns i with probability >= 1/2. Exact
/// probabilities are compared with a 1e-12 slack for rounding in the DP.
inline GoodPairResult evaluate_good_pair(const FunctionOracle& f, const Point& x,
                                         const IndexSet& s, std::size_t i, Sign sign,
                                         const AeParams& p, std::uint64_t mc_seed = 0) {
  require(!s.contains(i), "is_good_pair: i must not belong to S");
  require(level_of_size(s.size()).has_value(), "is_good_pair: |S| must be 2^j - 1");
  require(i < f.arity(), "is_good_pair: direction out of range");
  GoodPairResult r;
  if (!edge_oriented(f, x, i, sign)) return r;
  r.oriented = true;
  r.probability = success_probability(f, x, s.with(i), i, p, mc_seed);
  r.good = r.probability.exact ? r.probability.value >= 0.5 - 1e-12 : r.probability.value >= 0.5;
  return r;
}

inline bool is_good_pair(const FunctionOracle& f, const Point& x, const IndexSet& s,
                         std::size_t i, Sign sign, const AeParams& p) {
  return evaluate_good_pair(f, x, s, i, sign, p).good;
}

struct EvalMode {
  bool exact = true;
  std::size_t budget = 4096;  // sets (or points) drawn in sampled mode
  std::uint64_t seed = 0;

  static EvalMode sampled(std::size_t budget, std::uint64_t seed = 0) {
    return {false, budget, seed};
  }
};

struct StrongResult {
  bool strong = false;
  double good_fraction = 0;
  double radius = 0;  // 95% Wilson radius in sampled mode
  std::uint64_t sets = 0;
  bool exact = true;
};

/// x is j-strong for E_i^sign when (x, S) is a good pair for at least 3/4 of
/// the (2^j - 1)-subsets S of [n] \ {i}.
inline StrongResult evaluate_strong(const FunctionOracle& f, const Point& x, std::size_t i,
                                    std::size_t j, Sign sign, const EvalMode& mode,
                                    const AeParams& p) {
  require(j >= 1 && j < 63, "is_strong: level j must be >= 1");
  const std::size_t n = f.arity();
  require(i < n, "is_strong: direction out of range");
  const std::size_t k = (std::size_t{1} << j) - 1;
  StrongResult r;
  r.exact = mode.exact;
  if (k > n - 1) return r;
  if (mode.exact && binomial(n - 1, k) > kEnumerationCap)
    throw ContractViolation("is_strong: exact mode above the 1e5 enumeration cap");
  if (!edge_oriented(f, x, i, sign)) return r;

  const IndexSet ground = IndexSet::range(n).without(i);
  std::uint64_t good = 0;
  auto visit = [&](const IndexSet& s) {
    ++r.sets;
    const auto pr = success_probability(f, x, s.with(i), i, p, mode.seed);
    if (pr.exact ? pr.value >= 0.5 - 1e-12 : pr.value >= 0.5) ++good;
  };
  if (mode.exact) {
    for_each_subset(ground, k, visit);
  } else {
    Rng rng(mode.seed, x.hash() ^ (i << 8) ^ j);
    for (std::size_t b = 0; b < mode.budget; ++b) visit(random_subset(rng, ground, k));
  }
  r.good_fraction = static_cast<double>(good) / static_cast<double>(r.sets);
  if (!mode.exact) {
    const auto ci = wilson_interval(good, r.sets);
    r.radius = std::max(r.good_fraction - ci.low, ci.high - r.good_fraction);
  }
  r.strong = 4 * good >= 3 * r.sets;
  return r;
}

inline bool is_strong(const FunctionOracle& f, const Point& x, std::size_t i, std::size_t j,
                      Sign sign, const EvalMode& mode, const AeParams& p) {
  return evaluate_strong(f, x, i, j, sign, mode, p).strong;
}

// ---------------------------------------------------------------------------
// Scores

struct ScoreOptions {
  EvalMode mode;                       // exact, or sampled sets per point
  std::size_t point_budget = 256;      // points drawn in sampled mode
  std::optional<std::size_t> levels;   // overrides the default level count
};

/// Score_{i,j}^{+/-}: fraction of points that are j-strong; Score_i^{+/-}:
/// the maximum over j of Score_{i,j} * 2^j / sqrt(n). Indices are
/// [direction][j - 1].
struct ScoreTable {
  std::size_t n = 0;
  std::size_t lambda = 1;
  std::vector<std::vector<double>> score_plus, score_minus;
  std::vector<std::vector<std::uint64_t>> strong_plus, strong_minus;
  std::vector<double> weighted_plus, weighted_minus;
  bool exact = true;
  std::uint64_t points = 0;
  std::size_t set_budget = 0;
  AeParams ae;

  double weight(std::size_t j) const {
    return std::ldexp(1.0, static_cast<int>(j)) / std::sqrt(static_cast<double>(n));
  }
};

inline void finalize_weighted(ScoreTable& st) {
  st.weighted_plus.assign(st.n, 0.0);
  st.weighted_minus.assign(st.n, 0.0);
  for (std::size_t i = 0; i < st.n; ++i)
    for (std::size_t j = 1; j <= st.lambda; ++j) {
      st.weighted_plus[i] = std::max(st.weighted_plus[i], st.score_plus[i][j - 1] * st.weight(j));
      st.weighted_minus[i] =
          std::max(st.weighted_minus[i], st.score_minus[i][j - 1] * st.weight(j));
    }
}

inline ScoreTable score_table(const TruthTable& tt, const AeParams& p,
                              const ScoreOptions& opt = {}) {
  const std::size_t n = tt.arity();
  if (opt.mode.exact && n > kExactScoreMaxArity)
    throw ContractViolation("score_table: exact mode needs n <= 12");
  require(n >= 1, "score_table: n must be >= 1");
  ScoreTable st;
  st.n = n;
  st.lambda = opt.levels.value_or(score_levels(n));
  st.exact = opt.mode.exact;
  st.set_budget = opt.mode.exact ? 0 : opt.mode.budget;
  st.ae = p;
  const auto zeros = std::vector<std::uint64_t>(st.lambda, 0);
  st.strong_plus.assign(n, zeros);
  st.strong_minus.assign(n, zeros);

  const FunctionOracle f = table_oracle(tt, "score");
  auto visit = [&](const Point& x) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 1; j <= st.lambda; ++j) {
        if (is_strong(f, x, i, j, Sign::plus, opt.mode, p)) ++st.strong_plus[i][j - 1];
        if (is_strong(f, x, i, j, Sign::minus, opt.mode, p)) ++st.strong_minus[i][j - 1];
      }
  };
  if (opt.mode.exact) {
    for (std::uint64_t q = 0; q < tt.size(); ++q) visit(Point::from_index(n, q));
    st.points = tt.size();
  } else {
    Rng rng(opt.mode.seed, 0x73636f7265ULL);
    for (std::size_t b = 0; b < opt.point_budget; ++b) visit(random_point(rng, n));
    st.points = opt.point_budget;
  }
  st.score_plus.assign(n, std::vector<double>(st.lambda, 0.0));
  st.score_minus.assign(n, std::vector<double>(st.lambda, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < st.lambda; ++j) {
      st.score_plus[i][j] = static_cast<double>(st.strong_plus[i][j]) / static_cast<double>(st.points);
      st.score_minus[i][j] =
          static_cast<double>(st.strong_minus[i][j]) / static_cast<double>(st.points);
    }
  finalize_weighted(st);
  return st;
}

/// sum_i min(Score_i^+, Score_i^-)
inline double score_sum_min(const ScoreTable& st) {
  double s = 0;
  for (std::size_t i = 0; i < st.n; ++i) s += std::min(st.weighted_plus[i], st.weighted_minus[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Buckets

struct BucketEntry {
  std::size_t direction = 0;
  std::size_t t = 1, r = 1;  // type (argmax levels)
  double min_score = 0;
  std::optional<std::size_t> bucket;
};

struct DominatingTriple {
  std::size_t t = 1, r = 1, h = 1;
  double H = 2;
  std::vector<std::size_t> directions;  // I
  double contribution = 0;
  double alpha = 0, beta = 0, eps_tilde_sq = 0;
};

struct BucketReport {
  std::size_t n = 0;
  double eps = 0, c = 1;
  std::size_t bucket_count = 0;
  std::vector<BucketEntry> entries;
  std::vector<std::size_t> unbucketed;
  std::optional<DominatingTriple> dominating;
};

/// eps~^2 = c eps^2 / (log^10 n * log(n / eps)), logs base 2.
inline double eps_tilde_sq(std::size_t n, double eps, double c) {
  const double ln = log2_at_least_one(static_cast<double>(n));
  return c * eps * eps / (std::pow(ln, 10) * log2_at_least_one(static_cast<double>(n) / eps));
}

/// Smallest k >= 1 with 2^-k <= m <= 2^-(k-1); nullopt when m is not in (0, 1].
inline std::optional<std::size_t> bucket_of(double m) {
  if (!(m > 0) || m > 1) return std::nullopt;
  int e;
  std::frexp(m, &e);  // m = frac * 2^e with frac in [0.5, 1), so 2^(e-1) <= m < 2^e
  return static_cast<std::size_t>(std::max(1, 1 - e));
}

inline std::size_t argmax_level(const std::vector<double>& scores, const ScoreTable& st) {
  std::size_t best = 1;
  double best_v = -1;
  for (std::size_t j = 1; j <= st.lambda; ++j) {
    const double v = scores[j - 1] * st.weight(j);
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

inline BucketReport bucket_report(const ScoreTable& st, double eps, double c = 1.0) {
  require(eps > 0 && eps <= 1, "bucket_report: eps must lie in (0, 1]");
  BucketReport rep;
  rep.n = st.n;
  rep.eps = eps;
  rep.c = c;
  const double nn = static_cast<double>(st.n);
  rep.bucket_count = static_cast<std::size_t>(std::ceil(2 * std::log2(nn / eps) - 1e-12));
  const double floor_score = eps * eps / (nn * nn);

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < st.n; ++i) {
    BucketEntry e;
    e.direction = i;
    e.t = argmax_level(st.score_plus[i], st);
    e.r = argmax_level(st.score_minus[i], st);
    e.min_score = std::min(st.weighted_plus[i], st.weighted_minus[i]);
    if (e.min_score > floor_score) {
      const auto k = bucket_of(e.min_score);
      if (k && *k >= 1 && *k <= rep.bucket_count) e.bucket = k;
    }
    if (e.bucket)
      groups[{e.t, e.r, *e.bucket}].push_back(i);
    else
      rep.unbucketed.push_back(i);
    rep.entries.push_back(e);
  }

  for (const auto& [key, dirs] : groups) {
    double sum = 0;
    for (auto i : dirs) sum += rep.entries[i].min_score;
    if (!rep.dominating || sum > rep.dominating->contribution) {
      DominatingTriple d;
      std::tie(d.t, d.r, d.h) = key;
      d.H = std::ldexp(1.0, static_cast<int>(d.h));
      d.directions = dirs;
      d.contribution = sum;
      const double size = static_cast<double>(dirs.size());
      d.alpha = size * std::ldexp(1.0, static_cast<int>(d.t)) / nn;
      d.beta = size * std::ldexp(1.0, static_cast<int>(d.r)) / nn;
      d.eps_tilde_sq = eps_tilde_sq(st.n, eps, c);
      rep.dominating = d;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Informative sets

enum class ThresholdForm {
  eps_tilde,  // 0.1 eps~^2 / (alpha sqrt n) and 0.1 eps~^2 / (beta sqrt n)
  bucket,     // 0.1 sqrt n / (H 2^t) and 0.1 sqrt n / (H 2^r)
};

struct InformativeParams {
  std::size_t t = 1, r = 1;
  double alpha = 1, beta = 1, eps_tilde_sq = 1, H = 2;
  ThresholdForm form = ThresholdForm::eps_tilde;

  double threshold_plus(std::size_t n) const {
    const double rn = std::sqrt(static_cast<double>(n));
    return form == ThresholdForm::eps_tilde
               ? 0.1 * eps_tilde_sq / (alpha * rn)
               : 0.1 * rn / (H * std::ldexp(1.0, static_cast<int>(t)));
  }
  double threshold_minus(std::size_t n) const {
    const double rn = std::sqrt(static_cast<double>(n));
    return form == ThresholdForm::eps_tilde
               ? 0.1 * eps_tilde_sq / (beta * rn)
               : 0.1 * rn / (H * std::ldexp(1.0, static_cast<int>(r)));
  }
};

struct InformativeBudgets {
  std::size_t point_samples = 0;   // 0: every point of the cube (n <= 16)
  std::size_t subset_samples = 0;  // 0: every (2^r - 1)-subset of S
  std::uint64_t seed = 0;
  AeParams ae;
};

struct InformativeResult {
  bool informative = false;
  Estimate good_frac_plus;
  double threshold_plus = 0;
  Estimate revealing_fraction;
  double threshold_minus = 0;
  std::vector<IndexSet> revealing;  // T + {i} for each revealing T seen
  bool points_exact = true;
  bool subsets_exact = true;
};

/// Fraction of points x for which (x, S) is a good pair for E_i^sign.
inline Estimate good_fraction(const FunctionOracle& f, const IndexSet& s, std::size_t i,
                              Sign sign, const InformativeBudgets& b) {
  const std::size_t n = f.arity();
  std::uint64_t good = 0, total = 0;
  if (b.point_samples == 0) {
    require(n <= 16, "good_fraction: exhaustive point enumeration needs n <= 16");
    for (std::uint64_t q = 0; q < (std::uint64_t{1} << n); ++q, ++total)
      if (evaluate_good_pair(f, Point::from_index(n, q), s, i, sign, b.ae, b.seed).good) ++good;
    Estimate e;
    e.value = static_cast<double>(good) / static_cast<double>(total);
    e.samples = total;
    return e;
  }
  Rng rng(b.seed, 0x676f6f64ULL ^ (i << 16) ^ s.size());
  for (; total < b.point_samples; ++total)
    if (evaluate_good_pair(f, random_point(rng, n), s, i, sign, b.ae, b.seed).good) ++good;
  return proportion_estimate(good, total);
}

inline InformativeResult is_informative(const FunctionOracle& f, const IndexSet& s,
                                        std::size_t i, const InformativeParams& prm,
                                        const InformativeBudgets& b) {
  const std::size_t n = f.arity();
  require(!s.contains(i), "is_informative: i must not belong to S");
  require(s.size() == (std::size_t{1} << prm.t) - 1, "is_informative: |S| must be 2^t - 1");
  require(prm.r >= 1 && prm.r <= prm.t, "is_informative: need 1 <= r <= t");

  InformativeResult res;
  res.threshold_plus = prm.threshold_plus(n);
  res.threshold_minus = prm.threshold_minus(n);
  res.points_exact = b.point_samples == 0;
  res.good_frac_plus = good_fraction(f, s, i, Sign::plus, b);

  const std::size_t k = (std::size_t{1} << prm.r) - 1;
  std::uint64_t revealing = 0, total = 0;
  auto visit = [&](const IndexSet& t) {
    ++total;
    if (good_fraction(f, t, i, Sign::minus, b).value >= res.threshold_minus) {
      ++revealing;
      res.revealing.push_back(t.with(i));
    }
  };
  if (b.subset_samples == 0) {
    require(binomial(s.size(), k) <= kEnumerationCap,
            "is_informative: subset enumeration above the 1e5 cap");
    for_each_subset(s, k, visit);
    res.revealing_fraction.value = static_cast<double>(revealing) / static_cast<double>(total);
    res.revealing_fraction.samples = total;
  } else {
    res.subsets_exact = false;
    Rng rng(b.seed, 0x72657665616cULL ^ i);
    for (std::size_t q = 0; q < b.subset_samples; ++q) visit(random_subset(rng, s, k));
    res.revealing_fraction = proportion_estimate(revealing, total);
  }
  res.informative = res.good_frac_plus.value >= res.threshold_plus &&
                    res.revealing_fraction.value >= 0.1;
  return res;
}

/// Fraction of S in P_{i,t} that are informative for coordinate i
/// (exhaustive; |P_{i,t}| must respect the enumeration cap).
inline Estimate informative_fraction(const FunctionOracle& f, std::size_t i,
                                     const InformativeParams& prm, const InformativeBudgets& b) {
  const std::size_t n = f.arity();
  const std::size_t k = (std::size_t{1} << prm.t) - 1;
  require(binomial(n - 1, k) <= kEnumerationCap, "informative_fraction: above enumeration cap");
  std::uint64_t good = 0, total = 0;
  for_each_subset(IndexSet::range(n).without(i), k, [&](const IndexSet& s) {
    ++total;
    if (is_informative(f, s, i, prm, b).informative) ++good;
  });
  Estimate e;
  e.samples = total;
  e.value = total ? static_cast<double>(good) / static_cast<double>(total) : 0.0;
  return e;
}

// ---------------------------------------------------------------------------
// Persistency

struct PersistenceResult {
  bool persistent = true;
  double p_hat = 0;
  Estimate estimate;
};

/// Estimates Pr_S[f(x) != f(x^(S))] over uniform tau-subsets S; x is
/// (tau, gamma)-persistent when that is at most gamma. tau = 0 is always
/// persistent.
inline PersistenceResult is_persistent(const FunctionOracle& f, const Point& x, std::size_t tau,
                                       double gamma, std::size_t trials, Rng& rng) {
  const std::size_t n = f.arity();
  require(tau <= n, "is_persistent: tau must be <= n");
  require(gamma >= 0 && gamma <= 1, "is_persistent: gamma must lie in [0, 1]");
  PersistenceResult r;
  if (tau == 0) return r;
  require(trials >= 1, "is_persistent: trials must be >= 1");
  const bool fx = f(x);
  const IndexSet all = IndexSet::range(n);
  std::uint64_t changed = 0;
  for (std::size_t k = 0; k < trials; ++k)
    if (f(flip(x, random_subset(rng, all, tau))) != fx) ++changed;
  r.estimate = proportion_estimate(changed, trials);
  r.p_hat = r.estimate.value;
  r.persistent = r.p_hat <= gamma;
  return r;
}

/// Pr[f(x) != f(y)] where x is uniform and y flips tau distinct uniform
/// coordinates of x; i.i.d. samples with the binomial standard error.
inline Estimate flip_disagreement(const FunctionOracle& f, std::size_t tau, std::size_t samples,
                                  Rng& rng) {
  const std::size_t n = f.arity();
  require(tau <= n, "flip_disagreement: tau must be <= n");
  const IndexSet all = IndexSet::range(n);
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Point x = random_point(rng, n);
    if (tau > 0 && f(x) != f(flip(x, random_subset(rng, all, tau)))) ++hits;
  }
  return proportion_estimate(hits, samples);
}

struct NonPersistenceResult {
  Estimate fraction;  // of sampled x that are (tau, gamma)-non-persistent
  Estimate walk;      // pooled Pr[f(x) != f(x^(S))]
};

inline NonPersistenceResult nonpersistent_fraction(const FunctionOracle& f, std::size_t tau,
                                                   double gamma, std::size_t x_samples,
                                                   std::size_t flip_trials, Rng& rng) {
  require(x_samples >= 1, "nonpersistent_fraction: x_samples must be >= 1");
  const std::size_t n = f.arity();
  std::uint64_t bad = 0;
  double sum = 0, sum_sq = 0;
  for (std::size_t k = 0; k < x_samples; ++k) {
    const auto r = is_persistent(f, random_point(rng, n), tau, gamma, flip_trials, rng);
    if (!r.persistent) ++bad;
    sum += r.p_hat;
    sum_sq += r.p_hat * r.p_hat;
  }
  NonPersistenceResult out;
  out.fraction = proportion_estimate(bad, x_samples);
  const double m = static_cast<double>(x_samples);
  out.walk.value = sum / m;
  out.walk.samples = x_samples;
  const double var = x_samples > 1 ? std::max(0.0, (sum_sq - sum * sum / m) / (m - 1)) : 0.0;
  out.walk.std_error = std::sqrt(var / m);
  out.walk.radius = 1.96 * out.walk.std_error;
  return out;
}

// ---------------------------------------------------------------------------
// Robust sets and solid edges

struct RobustResult {
  bool robust = false;
  double flip_with_i_fraction = 0;  // condition 1
  double stay_fraction = 0;         // condition 2
  double threshold = 0;
  bool exact = true;
};

/// Checks both robust-set conditions for the anti-monotone edge (x, x^(i))
/// and S in P_{i,t}: at least 1 - 1/log^2 n of the (2^(t-1) - 1)-subsets S'
/// have f(x^(S' + i)) != f(x), and at least 1 - 1/log^2 n of the
/// 2^(t-1)-subsets have f(x^(S')) = f(x).
inline RobustResult is_robust_set(const FunctionOracle& f, const Point& x, std::size_t i,
                                  const IndexSet& s, std::size_t t, std::size_t sub_budget,
                                  Rng& rng) {
  const std::size_t n = f.arity();
  require(t >= 1 && s.size() == (std::size_t{1} << t) - 1, "is_robust_set: |S| must be 2^t - 1");
  require(!s.contains(i) && i < n, "is_robust_set: i must be a direction outside S");
  if (!edge_oriented(f, x, i, Sign::minus))
    throw ContractViolation("is_robust_set: orientation mismatch, edge is not anti-monotone");

  RobustResult r;
  const double ln = log2_at_least_one(static_cast<double>(n));
  r.threshold = 1.0 - 1.0 / (ln * ln);
  const bool fx = f(x);
  const std::size_t half = std::size_t{1} << (t - 1);

  auto fraction = [&](std::size_t k, const std::function<bool(const IndexSet&)>& pred) {
    std::uint64_t ok = 0, total = 0;
    auto visit = [&](const IndexSet& sub) {
      ++total;
      if (pred(sub)) ++ok;
    };
    if (binomial(s.size(), k) <= kEnumerationCap) {
      for_each_subset(s, k, visit);
    } else {
      r.exact = false;
      require(sub_budget >= 1, "is_robust_set: sampling needs sub_budget >= 1");
      for (std::size_t q = 0; q < sub_budget; ++q) visit(random_subset(rng, s, k));
    }
    return static_cast<double>(ok) / static_cast<double>(total);
  };
  r.flip_with_i_fraction =
      fraction(half - 1, [&](const IndexSet& sub) { return f(flip(x, sub.with(i))) != fx; });
  r.stay_fraction = fraction(half, [&](const IndexSet& sub) { return f(flip(x, sub)) == fx; });
  r.robust = r.flip_with_i_fraction >= r.threshold && r.stay_fraction >= r.threshold;
  return r;
}

struct SolidResult {
  bool solid = false;
  PersistenceResult lower;  // base point (f = 1) at tau = 2^(t-1)
  PersistenceResult upper;  // its neighbour at tau = 2^(t-1) - 1
};

/// An anti-monotone edge is solid when its f = 1 endpoint is
/// (2^(t-1), gamma)-persistent and the other endpoint is
/// (2^(t-1) - 1, gamma)-persistent.
inline SolidResult is_solid_edge(const FunctionOracle& f, const LabeledEdge& e, std::size_t t,
                                 double gamma, std::size_t trials, Rng& rng) {
  require(t >= 1, "is_solid_edge: t must be >= 1");
  if (e.kind != EdgeKind::anti_monotone || !edge_oriented(f, e.base, e.direction, Sign::minus))
    throw ContractViolation("is_solid_edge: orientation mismatch, edge is not anti-monotone");
  const std::size_t tau = std::size_t{1} << (t - 1);
  SolidResult r;
  r.lower = is_persistent(f, e.base, tau, gamma, trials, rng);
  r.upper = is_persistent(f, e.top(), tau - 1, gamma, trials, rng);
  r.solid = r.lower.persistent && r.upper.persistent;
  return r;
}

} // namespace unate
