#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "unate/ae_search.hpp"
#include "unate/analysis.hpp"
#include "unate/edges.hpp"
#include "unate/exact.hpp"
#include "unate/hypercube.hpp"
#include "unate/oracle.hpp"

namespace unate {

enum class TesterMode { theory, practical };

inline const char* to_string(TesterMode m) { return m == TesterMode::theory ? "theory" : "practical"; }

inline TesterMode parse_mode(const std::string& s) {
  if (s == "theory") return TesterMode::theory;
  if (s == "practical") return TesterMode::practical;
  throw std::invalid_argument("mode must be 'theory' or 'practical', got '" + s + "'");
}

struct TesterConfig {
  double eps = 0.1;
  TesterMode mode = TesterMode::practical;
  double c_eps = 1.0;
  double c_naive = 1.0;
  double c_outer = 10.0;
  double eps_tilde_sq = 1.0;  // used as is in practical mode
  std::uint64_t max_queries = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_wall_ms = 0;  // 0: no limit
  bool include_case3 = false;
  std::vector<double> alpha_grid;  // empty: 2^0 .. 2^ceil(log2 sqrt n)
  bool early_exit = false;         // naive and high-influence stop at the first violation
  bool plan_only = false;          // charge the closed-form budget instead of querying
  std::optional<std::size_t> levels;
  std::size_t ae_samples = 0;  // 0: ceil(4 log2 n)

  void validate() const {
    if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("eps must lie in (0, 1]");
    if (!(c_eps > 0 && c_naive > 0 && c_outer > 0 && eps_tilde_sq > 0))
      throw std::invalid_argument("tester constants must be > 0");
    for (double a : alpha_grid)
      if (!(a >= 1) || !std::has_single_bit(static_cast<std::uint64_t>(a)) ||
          a != std::floor(a))
        throw std::invalid_argument("alpha grid entries must be powers of 2");
    if (levels && *levels == 0) throw std::invalid_argument("levels must be >= 1");
  }

  /// Sets one named constant from its textual value.
  void set_constant(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty())
      throw std::invalid_argument("constant '" + key + "' needs a number, got '" + value + "'");
    auto as_count = [&]() {
      if (v < 0 || v != std::floor(v))
        throw std::invalid_argument("constant '" + key + "' must be a whole number");
      return static_cast<std::uint64_t>(v);
    };
    if (key == "c_eps") c_eps = v;
    else if (key == "c_naive") c_naive = v;
    else if (key == "c_outer") c_outer = v;
    else if (key == "eps_tilde_sq") eps_tilde_sq = v;
    else if (key == "include_case3") include_case3 = v != 0;
    else if (key == "early_exit") early_exit = v != 0;
    else if (key == "max_wall_ms") max_wall_ms = as_count();
    else if (key == "levels") levels = static_cast<std::size_t>(as_count());
    else if (key == "ae_samples") ae_samples = static_cast<std::size_t>(as_count());
    else throw std::invalid_argument("unknown constant '" + key + "'");
  }

  std::vector<double> alphas(std::size_t n) const {
    if (!alpha_grid.empty()) return alpha_grid;
    const auto top = static_cast<int>(std::ceil(std::log2(std::sqrt(static_cast<double>(n))) - 1e-12));
    std::vector<double> g;
    for (int k = 0; k <= std::max(0, top); ++k) g.push_back(std::ldexp(1.0, k));
    return g;
  }

  std::uint64_t outer_repeats() const {
    return static_cast<std::uint64_t>(std::max(1.0, std::ceil(c_outer)));
  }

  double eps_tilde(std::size_t n) const {
    return mode == TesterMode::theory ? eps_tilde_sq_formula(n) : eps_tilde_sq;
  }

  double eps_tilde_sq_formula(std::size_t n) const { return unate::eps_tilde_sq(n, eps, c_eps); }

  AeParams ae(std::size_t n) const {
    AeParams p = AeParams::for_arity(n);
    if (ae_samples > 0) p.samples = ae_samples;
    return p;
  }

  std::size_t lambda(std::size_t n) const { return levels.value_or(score_levels(n)); }
};

enum class Outcome { unate, non_unate, inconclusive };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::unate: return "unate";
    case Outcome::non_unate: return "non-unate";
    default: return "inconclusive";
  }
}

/// One transcript line: a stage with its parameters, planned and spent
/// queries and what happened.
struct StageRecord {
  std::string stage;
  std::string orientation = "f";
  std::size_t t = 0, r = 0, h = 0;
  double alpha_hat = 0, beta_hat = 0;
  std::uint64_t outer = 0;   // outer repeats (c_outer, K, or log n)
  std::uint64_t rounds = 0;  // M or K
  std::uint64_t planned = 0;
  std::uint64_t queries = 0;
  std::uint64_t confirmations = 0;
  std::string outcome;
};

struct Verdict {
  Outcome outcome = Outcome::unate;
  std::optional<Violation> violation;
  LedgerSnapshot queries;
  std::vector<StageRecord> transcript;
  std::string note;

  bool rejected() const { return outcome == Outcome::non_unate; }
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > std::numeric_limits<std::uint64_t>::max())
    throw ContractViolation("query plan exceeds 2^64 queries");
  return static_cast<std::uint64_t>(p);
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b)
    throw ContractViolation("query plan exceeds 2^64 queries");
  return a + b;
}

inline std::uint64_t ceil_count(double v) {
  const double c = std::ceil(v);
  if (!(c < 1.8e19)) throw ContractViolation("query plan exceeds 2^64 queries");
  return static_cast<std::uint64_t>(std::max(0.0, c));
}

/// First monotone and anti-monotone edge seen per direction.
class EdgeEvidence {
public:
  explicit EdgeEvidence(std::size_t n) : mono_(n), anti_(n) {}

  /// Returns true when this edge completes the first violation.
  bool add(const LabeledEdge& e) {
    auto& slot = e.kind == EdgeKind::monotone ? mono_[e.direction] : anti_[e.direction];
    if (!slot) slot = e;
    if (!violation_ && mono_[e.direction] && anti_[e.direction]) {
      violation_ = Violation{e.direction, *mono_[e.direction], *anti_[e.direction]};
      return true;
    }
    return false;
  }

  const std::optional<Violation>& violation() const { return violation_; }

private:
  std::vector<std::optional<LabeledEdge>> mono_, anti_;
  std::optional<Violation> violation_;
};

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::uint64_t limit_ms = 0;

  bool expired() const {
    if (limit_ms == 0) return false;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return static_cast<std::uint64_t>(ms.count()) >= limit_ms;
  }
};

/// Runs `body` against a child ledger with the configured query limit and
/// fills in the verdict's ledger snapshot; budget exhaustion yields an
/// inconclusive verdict.
template <typename Body>
Verdict metered_run(const FunctionOracle& f, const TesterConfig& cfg, Body&& body) {
  Metered m = with_ledger(f);
  m.ledger->set_limit(cfg.max_queries);
  Verdict v;
  try {
    body(m.oracle, v);
  } catch (const BudgetExhausted& e) {
    v.outcome = Outcome::inconclusive;
    v.violation.reset();
    v.note = e.what();
  }
  v.queries = m.ledger->snapshot();
  return v;
}

inline void scan_edges(const FunctionOracle& f, std::size_t direction, std::uint64_t edges,
                       EdgeEvidence& ev, bool early_exit, Rng& rng) {
  const std::size_t n = f.arity();
  for (std::uint64_t k = 0; k < edges; ++k) {
    const Point x = random_point(rng, n);
    const std::size_t i = direction < n ? direction : static_cast<std::size_t>(rng.below(n));
    const bool a = f(x);
    const bool b = f(x.flipped(i));
    if (a != b) ev.add(LabeledEdge::from_values(x, i, a, b));
    if (early_exit && ev.violation()) return;
  }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Closed-form budgets

/// 2 * ceil(c_naive * n^{3/2} / eps)
inline std::uint64_t naive_edges(std::size_t n, const TesterConfig& cfg) {
  return detail::ceil_count(cfg.c_naive * std::pow(static_cast<double>(n), 1.5) / cfg.eps);
}

inline std::uint64_t naive_plan(std::size_t n, const TesterConfig& cfg) {
  return detail::checked_mul(2, naive_edges(n, cfg));
}

inline std::size_t high_influence_rounds(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::log2(8.0 * static_cast<double>(n)) - 1e-12));
}

/// s_r = ceil(20 sqrt(n) log2(8n) / 2^r)
inline std::uint64_t high_influence_iterations(std::size_t n, std::size_t r) {
  const double nn = static_cast<double>(n);
  return detail::ceil_count(20.0 * std::sqrt(nn) * std::log2(8.0 * nn) /
                            std::ldexp(1.0, static_cast<int>(r)));
}

/// sum_r s_r * 8 * 2^r
inline std::uint64_t high_influence_plan(std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t r = 1; r <= high_influence_rounds(n); ++r)
    total = detail::checked_add(
        total, detail::checked_mul(high_influence_iterations(n, r), std::uint64_t{8} << r));
  return total;
}

enum class CaseKind { case1, case2, case3 };

inline const char* to_string(CaseKind k) {
  switch (k) {
    case CaseKind::case1: return "case1";
    case CaseKind::case2: return "case2";
    default: return "case3";
  }
}

struct CaseParams {
  std::size_t t = 1, r = 1;
  std::size_t h = 0;  // informational; H = 2^h
  double alpha_hat = 1;
  double eps_tilde_sq = 1;
};

struct CasePlan {
  bool skipped = false;
  std::uint64_t outer = 0;
  std::uint64_t rounds = 0;
  std::uint64_t per_round = 0;  // monotone-side call cost + anti-monotone-side call cost
  std::uint64_t total = 0;
};

/// Outer repeats, rounds per side and the resulting query count, assuming no
/// confirmation queries. Case 1: c_outer and M = ceil(sqrt(alpha n)/eps~^2 log^3 n);
/// case 2: K = ceil(log^3 n / alpha) and M = ceil(alpha sqrt(n) log n / eps~^2);
/// case 3: ceil(log n) and K = ceil(n^{3/4} log n / eps~^2).
inline CasePlan case_plan(CaseKind kind, std::size_t n, const CaseParams& p,
                          const TesterConfig& cfg) {
  CasePlan plan;
  if (p.t < p.r || p.r < 1 || p.t >= 63 || (std::size_t{1} << p.t) > n) {
    plan.skipped = true;
    return plan;
  }
  const double nn = static_cast<double>(n);
  const double ln = log2_at_least_one(nn);
  switch (kind) {
    case CaseKind::case1:
      plan.outer = cfg.outer_repeats();
      plan.rounds = detail::ceil_count(std::sqrt(p.alpha_hat * nn) / p.eps_tilde_sq * ln * ln * ln);
      break;
    case CaseKind::case2:
      plan.outer = detail::ceil_count(ln * ln * ln / p.alpha_hat);
      plan.rounds = detail::ceil_count(p.alpha_hat * std::sqrt(nn) * ln / p.eps_tilde_sq);
      break;
    case CaseKind::case3:
      plan.outer = detail::ceil_count(ln);
      plan.rounds = detail::ceil_count(std::pow(nn, 0.75) * ln / p.eps_tilde_sq);
      break;
  }
  const std::size_t samples = cfg.ae(n).samples;
  plan.per_round = ae_search_base_cost(std::size_t{1} << p.t, samples) +
                   ae_search_base_cost(std::size_t{1} << p.r, samples);
  plan.total = detail::checked_mul(detail::checked_mul(plan.outer, plan.rounds), plan.per_round);
  return plan;
}

/// One parameter tuple of the driver.
struct Tuple {
  bool flipped = false;
  CaseKind kind = CaseKind::case2;
  CaseParams params;
  std::vector<std::size_t> h_values;  // every h the tuple stands for
};

/// Tuples in driver order: orientation, then t, r, h, alpha. Pairs with t < r
/// are not listed (the flipped orientation covers them). In practical mode
/// tuples that differ only in h are merged since H enters only through the
/// constraints H 2^t >= sqrt n and H 2^r >= sqrt n.
inline std::vector<Tuple> driver_tuples(std::size_t n, const TesterConfig& cfg) {
  std::vector<Tuple> out;
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  const double ln = log2_at_least_one(nn);
  const double quarter = std::pow(nn, 0.25);
  const auto h_max = static_cast<std::size_t>(std::ceil(2 * std::log2(nn / cfg.eps) - 1e-12));
  const std::size_t lambda = cfg.lambda(n);
  const double ets = cfg.eps_tilde(n);
  const auto grid = cfg.alphas(n);
  for (bool flipped : {false, true})
    for (std::size_t t = 1; t <= lambda; ++t)
      for (std::size_t r = 1; r <= t; ++r) {
        if (t >= 63 || (std::size_t{1} << t) > n) continue;
        std::vector<std::size_t> hs;
        for (std::size_t h = 1; h <= h_max; ++h) {
          const double H = std::ldexp(1.0, static_cast<int>(h));
          if (H * std::ldexp(1.0, static_cast<int>(t)) >= rn &&
              H * std::ldexp(1.0, static_cast<int>(r)) >= rn)
            hs.push_back(h);
        }
        if (hs.empty()) continue;
        std::vector<std::vector<std::size_t>> groups;
        if (cfg.mode == TesterMode::practical)
          groups.push_back(hs);
        else
          for (auto h : hs) groups.push_back({h});
        for (const auto& group : groups)
          for (double a : grid) {
            Tuple tu;
            tu.flipped = flipped;
            tu.h_values = group;
            tu.params = {t, r, group.front(), a, ets};
            const double beta = a * std::ldexp(1.0, static_cast<int>(r) - static_cast<int>(t));
            if (cfg.include_case3 && a > quarter && beta > quarter)
              tu.kind = CaseKind::case3;
            else
              tu.kind = a >= ln * ln ? CaseKind::case1 : CaseKind::case2;
            out.push_back(tu);
          }
      }
  return out;
}

struct MainPlan {
  std::uint64_t high_influence = 0;
  std::vector<std::pair<Tuple, CasePlan>> tuples;
  std::uint64_t total = 0;
};

inline MainPlan main_plan(std::size_t n, const TesterConfig& cfg) {
  MainPlan plan;
  plan.high_influence = high_influence_plan(n);
  plan.total = plan.high_influence;
  for (const auto& tu : driver_tuples(n, cfg)) {
    const CasePlan cp = case_plan(tu.kind, n, tu.params, cfg);
    plan.total = detail::checked_add(plan.total, cp.total);
    plan.tuples.emplace_back(tu, cp);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Testers

/// Samples ceil(c_naive n^{3/2} / eps) uniform edges and rejects on two
/// opposite orientations in one direction.
inline Verdict naive_tester(const FunctionOracle& f, const TesterConfig& cfg, Rng& rng) {
  cfg.validate();
  return detail::metered_run(f, cfg, [&](const FunctionOracle& g, Verdict& v) {
    const std::size_t n = g.arity();
    StageRecord rec;
    rec.stage = "naive";
    rec.rounds = naive_edges(n, cfg);
    rec.planned = naive_plan(n, cfg);
    const auto before = g.ledger()->raw();
    if (cfg.plan_only) {
      g.ledger()->charge(rec.planned);
      rec.outcome = "planned";
      rec.queries = rec.planned;
      v.outcome = Outcome::inconclusive;
      v.note = "plan only";
      v.transcript.push_back(rec);
      return;
    }
    detail::EdgeEvidence ev(n);
    try {
      detail::scan_edges(g, n, rec.rounds, ev, cfg.early_exit, rng);
    } catch (const BudgetExhausted&) {
      rec.queries = g.ledger()->raw() - before;
      rec.outcome = "budget";
      v.transcript.push_back(rec);
      throw;
    }
    rec.queries = g.ledger()->raw() - before;
    v.violation = ev.violation();
    v.outcome = v.violation ? Outcome::non_unate : Outcome::unate;
    rec.outcome = v.violation ? "reject" : "accept";
    v.transcript.push_back(rec);
  });
}

/// For r = 1..ceil(log2 8n): s_r times, pick a uniform direction and query
/// 4 * 2^r uniform edges along it. Evidence accumulates over the whole run.
inline Verdict high_influence_tester(const FunctionOracle& f, const TesterConfig& cfg, Rng& rng) {
  cfg.validate();
  return detail::metered_run(f, cfg, [&](const FunctionOracle& g, Verdict& v) {
    const std::size_t n = g.arity();
    StageRecord rec;
    rec.stage = "high_influence";
    rec.outer = high_influence_rounds(n);
    rec.planned = high_influence_plan(n);
    const auto before = g.ledger()->raw();
    if (cfg.plan_only) {
      g.ledger()->charge(rec.planned);
      rec.outcome = "planned";
      rec.queries = rec.planned;
      v.outcome = Outcome::inconclusive;
      v.note = "plan only";
      v.transcript.push_back(rec);
      return;
    }
    detail::EdgeEvidence ev(n);
    try {
      for (std::size_t r = 1; r <= rec.outer; ++r) {
        const std::uint64_t s = high_influence_iterations(n, r);
        for (std::uint64_t k = 0; k < s; ++k) {
          const auto i = static_cast<std::size_t>(rng.below(n));
          detail::scan_edges(g, i, std::uint64_t{4} << r, ev, cfg.early_exit, rng);
          if (cfg.early_exit && ev.violation()) break;
        }
        if (cfg.early_exit && ev.violation()) break;
      }
    } catch (const BudgetExhausted&) {
      rec.queries = g.ledger()->raw() - before;
      rec.outcome = "budget";
      v.transcript.push_back(rec);
      throw;
    }
    rec.queries = g.ledger()->raw() - before;
    v.violation = ev.violation();
    v.outcome = v.violation ? Outcome::non_unate : Outcome::unate;
    rec.outcome = v.violation ? "reject" : "accept";
    v.transcript.push_back(rec);
  });
}

/// Result of one case algorithm: the sets A and B of the last loop (or the
/// rejecting one) and any violation.
struct CaseOutcome {
  bool skipped = false;
  std::optional<Violation> violation;
  IndexSet A, B;
  StageRecord record;
};

namespace detail {

struct SideScan {
  std::map<std::size_t, LabeledEdge> found;
  std::uint64_t confirmations = 0;
};

/// One ae_search round; keeps edges of the wanted orientation.
inline void search_round(const FunctionOracle& f, const IndexSet& s, EdgeKind want,
                         const AeParams& ae, SideScan& side, Rng& rng) {
  const Point x = random_point(rng, f.arity());
  const AeOutcome o = ae_search(f, x, s, rng, ae);
  side.confirmations += o.queries - ae_search_base_cost(s.size(), ae.samples);
  if (!o.direction) return;
  const LabeledEdge e = LabeledEdge::from_values(x, *o.direction, o.base_value, !o.base_value);
  if (e.kind == want) side.found.emplace(e.direction, e);
}

inline IndexSet keys(const std::map<std::size_t, LabeledEdge>& m) {
  std::vector<std::size_t> v;
  for (const auto& kv : m) v.push_back(kv.first);
  return IndexSet(std::move(v));
}

inline CaseOutcome run_case(CaseKind kind, const FunctionOracle& f, const CaseParams& p,
                            const TesterConfig& cfg, Rng& rng) {
  const std::size_t n = f.arity();
  CaseOutcome out;
  out.record.stage = to_string(kind);
  out.record.t = p.t;
  out.record.r = p.r;
  out.record.h = p.h;
  out.record.alpha_hat = p.alpha_hat;
  out.record.beta_hat = p.alpha_hat * std::ldexp(1.0, static_cast<int>(p.r) - static_cast<int>(p.t));
  require(p.alpha_hat > 0 && p.eps_tilde_sq > 0, "case algorithm: alpha and eps~^2 must be > 0");
  const CasePlan plan = case_plan(kind, n, p, cfg);
  if (plan.skipped) {
    out.skipped = true;
    out.record.outcome = "skip";
    return out;
  }
  out.record.outer = plan.outer;
  out.record.rounds = plan.rounds;
  out.record.planned = plan.total;
  const auto& ledger = f.ledger();
  const std::uint64_t before = ledger ? ledger->raw() : 0;
  auto spent = [&] { return ledger ? ledger->raw() - before : 0; };

  if (cfg.plan_only) {
    require(ledger != nullptr, "plan-only run needs a metered oracle");
    ledger->charge(plan.total);
    out.record.queries = plan.total;
    out.record.outcome = "planned";
    return out;
  }

  const AeParams ae = cfg.ae(n);
  const std::size_t s_size = std::size_t{1} << p.t;
  const std::size_t t_size = std::size_t{1} << p.r;
  try {
    for (std::uint64_t loop = 0; loop < plan.outer; ++loop) {
      SideScan mono, anti;
      const IndexSet s = random_subset(rng, n, s_size);
      for (std::uint64_t k = 0; k < plan.rounds; ++k)
        search_round(f, s, EdgeKind::monotone, ae, mono, rng);
      if (kind == CaseKind::case3) {
        const IndexSet t = random_subset(rng, s, t_size);
        for (std::uint64_t k = 0; k < plan.rounds; ++k)
          search_round(f, t, EdgeKind::anti_monotone, ae, anti, rng);
      } else {
        for (std::uint64_t k = 0; k < plan.rounds; ++k)
          search_round(f, random_subset(rng, s, t_size), EdgeKind::anti_monotone, ae, anti, rng);
      }
      out.record.confirmations += mono.confirmations + anti.confirmations;
      out.A = keys(mono.found);
      out.B = keys(anti.found);
      const IndexSet both = set_intersection(out.A, out.B);
      if (!both.empty()) {
        const std::size_t d = both[0];
        out.violation = Violation{d, mono.found.at(d), anti.found.at(d)};
        break;
      }
    }
  } catch (const BudgetExhausted&) {
    out.record.queries = spent();
    out.record.outcome = "budget";
    throw;
  }
  out.record.queries = spent();
  out.record.outcome = out.violation ? "reject" : "accept";
  return out;
}

} // namespace detail

/// Repeats c_outer times: S of size 2^t, M monotone-side searches on S, then
/// M anti-monotone-side searches each on a fresh T of size 2^r inside S;
/// rejects when A and B meet.
inline CaseOutcome alg_case_1(const FunctionOracle& f, const CaseParams& p,
                              const TesterConfig& cfg, Rng& rng) {
  return detail::run_case(CaseKind::case1, f, p, cfg, rng);
}

/// As case 1 with K = ceil(log^3 n / alpha) loops and M = ceil(alpha sqrt(n) log n / eps~^2).
inline CaseOutcome alg_case_2(const FunctionOracle& f, const CaseParams& p,
                              const TesterConfig& cfg, Rng& rng) {
  return detail::run_case(CaseKind::case2, f, p, cfg, rng);
}

/// ceil(log n) loops, each with one S, K searches on S, one T inside S and
/// K searches on T.
inline CaseOutcome alg_case_3(const FunctionOracle& f, const CaseParams& p,
                              const TesterConfig& cfg, Rng& rng) {
  return detail::run_case(CaseKind::case3, f, p, cfg, rng);
}

/// Maps a violation of x -> f(x xor 1^n) back to f. Monotone and
/// anti-monotone edges trade places.
inline Violation unflip(const Violation& v) {
  const Point ones = Point::ones(v.monotone_edge.base.arity());
  auto back = [&](const LabeledEdge& e) {
    LabeledEdge o;
    o.direction = e.direction;
    o.base = e.top() ^ ones;
    o.kind = e.kind == EdgeKind::monotone ? EdgeKind::anti_monotone : EdgeKind::monotone;
    return o;
  };
  return Violation{v.direction, back(v.anti_edge), back(v.monotone_edge)};
}

/// High-influence tester, then every driver tuple in both orientations.
/// Returns the first verified violation. Theory mode only charges the
/// closed-form plan (its budgets are far beyond execution).
inline Verdict main_tester(const FunctionOracle& f, const TesterConfig& cfg_in, Rng& rng) {
  cfg_in.validate();
  TesterConfig cfg = cfg_in;
  if (cfg.mode == TesterMode::theory) cfg.plan_only = true;
  const detail::Clock clock{std::chrono::steady_clock::now(), cfg.max_wall_ms};
  const FunctionOracle truth = f.unmetered();

  return detail::metered_run(f, cfg, [&](const FunctionOracle& g, Verdict& v) {
    const std::size_t n = g.arity();
    TesterConfig inner = cfg;
    inner.max_queries = std::numeric_limits<std::uint64_t>::max();

    Verdict hi = high_influence_tester(g, inner, rng);
    v.transcript = hi.transcript;
    if (hi.rejected()) {
      if (verify_violation(truth, *hi.violation)) {
        v.outcome = Outcome::non_unate;
        v.violation = hi.violation;
        return;
      }
      v.transcript.back().outcome = "unverified";
    }

    const FunctionOracle flipped = shift(g, Point::ones(n));
    for (const auto& tu : driver_tuples(n, cfg)) {
      if (clock.expired()) {
        v.outcome = Outcome::inconclusive;
        v.note = "wall-time budget exhausted";
        return;
      }
      CaseOutcome co;
      try {
        co = detail::run_case(tu.kind, tu.flipped ? flipped : g, tu.params, cfg, rng);
      } catch (const BudgetExhausted&) {
        StageRecord rec;
        rec.stage = to_string(tu.kind);
        rec.orientation = tu.flipped ? "f^1" : "f";
        rec.outcome = "budget";
        v.transcript.push_back(rec);
        throw;
      }
      co.record.orientation = tu.flipped ? "f^1" : "f";
      if (co.violation) {
        const Violation w = tu.flipped ? unflip(*co.violation) : *co.violation;
        if (verify_violation(truth, w)) {
          v.transcript.push_back(co.record);
          v.outcome = Outcome::non_unate;
          v.violation = w;
          return;
        }
        co.record.outcome = "unverified";
      }
      v.transcript.push_back(co.record);
    }
    if (cfg.plan_only) {
      v.outcome = Outcome::inconclusive;
      v.note = "plan only";
    } else {
      v.outcome = Outcome::unate;
    }
  });
}

} // namespace unate
