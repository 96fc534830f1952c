// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "unate/unate.hpp"

using namespace unate;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Result()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s [%d] %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!r.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

TruthTable small_table(oracle::Table t, std::size_t n) {
  TruthTable tt(n);
  for (std::uint64_t p = 0; p < tt.size(); ++p) tt.set(p, oracle::bit(t, static_cast<unsigned>(p)));
  return tt;
}

// Integer closed forms for n a power of four and eps = 1/4, written out
// independently of the library's plan functions.
std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t ilog2_ceil(std::uint64_t n) {
  std::uint64_t k = 0;
  while ((std::uint64_t{1} << k) < n) ++k;
  return k;
}

std::uint64_t hand_high_influence(std::uint64_t n) {
  const std::uint64_t lg = ilog2_ceil(8 * n), c = 20 * isqrt(n) * lg;
  std::uint64_t total = 0;
  for (std::uint64_t r = 1; r <= lg; ++r) {
    const std::uint64_t step = std::uint64_t{1} << r;
    total += (c + step - 1) / step * 8 * step;
  }
  return total;
}

std::uint64_t hand_naive(std::uint64_t n) { return 2 * 4 * n * isqrt(n); }

/// Only (t, r) = (1, 1) exists when sqrt(n) < 4 log2 n; each search on a
/// pair costs 2 queries, so a round costs 4. Both orientations run.
std::uint64_t hand_main(std::uint64_t n, std::uint64_t c_outer, std::uint64_t eps_tilde_sq) {
  const std::uint64_t ln = ilog2_ceil(n), rn = isqrt(n);
  std::uint64_t per_orientation = 0;
  for (std::uint64_t a = 1; a <= (std::uint64_t{1} << ilog2_ceil(rn)); a *= 2) {
    std::uint64_t outer, rounds;
    if (a >= ln * ln) {
      outer = c_outer;
      const double m = std::sqrt(static_cast<double>(a * n)) * static_cast<double>(ln * ln * ln) /
                       static_cast<double>(eps_tilde_sq);
      rounds = static_cast<std::uint64_t>(std::ceil(m));
    } else {
      outer = (ln * ln * ln + a - 1) / a;
      rounds = (a * rn * ln + eps_tilde_sq - 1) / eps_tilde_sq;
    }
    per_orientation += outer * rounds * 4;
  }
  return hand_high_influence(n) + 2 * per_orientation;
}

Result ae_soundness() {
  Result r;
  std::uint64_t calls = 0, returned = 0, bad = 0;
  Rng rng(1001, 0);
  const std::vector<std::string> families = {
      "parity:n=", "majority:n=", "dictator:n=", "anti_dictator:n=", "xor_pair:n=", "random:seed=5,n="};
  for (std::size_t n : {8u, 16u, 64u}) {
    const auto p = AeParams::for_arity(n);
    const std::uint64_t cap = static_cast<std::uint64_t>(std::ceil(4 * std::log2(double(n)))) + 2;
    for (const auto& fam : families) {
      std::string spec = fam + std::to_string(fam == "majority:n=" ? n - 1 : n);
      if (fam.rfind("random", 0) == 0 && n > 16) continue;
      const auto base = build_function(spec);
      const std::size_t m = base.arity();
      Metered metered = with_ledger(base);
      for (int k = 0; k < 6000; ++k) {
        const Point x = random_point(rng, m);
        const IndexSet s = random_subset(rng, m, 2 * (1 + static_cast<std::size_t>(rng.below(m / 2))));
        const auto before = metered.ledger->raw();
        const auto o = ae_search(metered.oracle, x, s, rng, p);
        ++calls;
        if (metered.ledger->raw() - before > cap) ++bad;
        if (o.direction) {
          ++returned;
          if (!s.contains(*o.direction) || base(x.flipped(*o.direction)) == base(x)) ++bad;
        }
      }
    }
  }
  r.pass = bad == 0 && calls >= 100000;
  r.detail = std::to_string(calls) + " calls, " + std::to_string(returned) + " returns, " +
             std::to_string(bad) + " violations";
  return r;
}

Result one_sided() {
  TesterConfig cfg;
  cfg.eps = 0.25;
  std::vector<FunctionOracle> fs = {build_function("dictator:n=64,i=7"),
                                    build_function("anti_dictator:n=64,i=9"),
                                    build_function("majority:n=33")};
  Rng gen(1002, 0);
  for (int k = 0; k < 20; ++k)
    fs.push_back(table_oracle(random_monotone_table(gen, 8), "monotone" + std::to_string(k)));
  std::uint64_t runs = 0, rejections = 0;
  for (std::size_t idx = 0; idx < fs.size(); ++idx) {
    for (std::uint64_t t = 0; t < 200; ++t) {
      Rng rng(1002, idx * 1000 + t);
      for (const char* id : {"naive", "high_influence", "main"}) {
        ++runs;
        rejections += run_tester(id, fs[idx], cfg, rng).rejected();
      }
    }
  }
  Result r;
  r.pass = rejections == 0;
  r.detail = std::to_string(runs) + " runs over " + std::to_string(fs.size()) +
             " functions, " + std::to_string(rejections) + " rejections";
  return r;
}

Result high_influence_parity() {
  const auto f = build_function("parity:n=256");
  const std::uint64_t expected = hand_high_influence(256);
  TesterConfig cfg;
  std::uint64_t hits = 0, exact_counts = 0, verified = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(1003, t);
    const Verdict v = high_influence_tester(f, cfg, rng);
    if (v.rejected()) {
      ++hits;
      verified += verify_violation(f, *v.violation);
    }
    exact_counts += v.queries.raw == expected;
  }
  const auto ci = wilson_interval(hits, 100);
  Result r;
  r.pass = (3 * hits >= 200 || ci.low > 0.55) && exact_counts == 100 && verified == hits;
  r.detail = fmt("detection %.2f (Wilson low %.3f), ", hits / 100.0, ci.low) +
             std::to_string(exact_counts) + "/100 trials spent exactly " +
             std::to_string(expected) + " queries, " + std::to_string(verified) +
             " witnesses verified";
  return r;
}

Result distance_oracle() {
  const auto mono = oracle::monotone_tables(4);
  std::uint64_t mismatches = 0;
  for (oracle::Table t = 0; t < 65536; ++t) {
    const Rational got = distance_to_monotone(small_table(t, 4)).value;
    if (!(got == Rational(oracle::min_distance(t, mono), 16))) ++mismatches;
  }
  const Rational parity2 = distance_to_unate(to_truth_table(build_function("parity:n=2"))).value;
  Result r;
  r.pass = mono.size() == 168 && mismatches == 0 && parity2 == Rational(1, 4);
  r.detail = std::to_string(mono.size()) + " monotone functions, 65536 tables, " +
             std::to_string(mismatches) + " mismatches; parity(2) distance " + parity2.str();
  return r;
}

std::vector<TruthTable> score_battery(bool unate_only) {
  std::vector<TruthTable> out;
  Rng rng(1005, unate_only);
  for (int k = 0; k < 20; ++k)
    out.push_back(unate_only ? random_monotone_table(rng, 6).shifted(rng.below(64))
                             : TruthTable::random(rng, 6));
  return out;
}

Result score_machinery() {
  std::uint64_t mismatches = 0, nonzero = 0;
  for (const auto& t : score_battery(false)) {
    const auto st = score_table(t, AeParams::for_arity(6));
    const auto f = [&t](std::uint64_t x) { return t.get(x); };
    for (unsigned i = 0; i < 6; ++i) {
      if (st.score_plus[i][0] != oracle::edge_points(f, 6, i, true) / 64.0) ++mismatches;
      if (st.score_minus[i][0] != oracle::edge_points(f, 6, i, false) / 64.0) ++mismatches;
    }
    if (is_unate(t).unate && score_sum_min(st) != 0) ++nonzero;
  }
  for (const auto& t : score_battery(true)) {
    if (!is_unate(t).unate) ++nonzero;
    if (score_sum_min(score_table(t, AeParams::for_arity(6))) != 0) ++nonzero;
  }
  Result r;
  r.pass = mismatches == 0 && nonzero == 0;
  r.detail = "20 random tables: " + std::to_string(mismatches) + " score mismatches; 20 unate tables: " +
             std::to_string(nonzero) + " with nonzero sum";
  return r;
}

Result bucket_invariant() {
  std::uint64_t reports = 0, bucketed = 0, broken = 0;
  std::vector<TruthTable> tables = score_battery(false);
  Rng rng(1006, 0);
  for (int k = 0; k < 5; ++k) tables.push_back(TruthTable::random(rng, 8));
  tables.push_back(to_truth_table(build_function("parity:n=6")));
  tables.push_back(to_truth_table(build_function("xor_pair:n=8")));
  for (const auto& t : tables) {
    const auto st = score_table(t, AeParams::for_arity(t.arity()));
    for (double eps : {0.05, 0.25, 1.0}) {
      const auto rep = bucket_report(st, eps);
      ++reports;
      for (const auto& e : rep.entries) {
        if (!e.bucket) continue;
        ++bucketed;
        const double m = std::min(st.weighted_plus[e.direction], st.weighted_minus[e.direction]);
        const int h = static_cast<int>(*e.bucket);
        if (!(std::ldexp(1.0, -h) <= m && m <= std::ldexp(1.0, -(h - 1)))) ++broken;
      }
      if (rep.dominating)
        for (auto i : rep.dominating->directions)
          if (rep.entries[i].bucket != rep.dominating->h) ++broken;
    }
  }
  Result r;
  r.pass = broken == 0 && bucketed > 0;
  r.detail = std::to_string(reports) + " reports, " + std::to_string(bucketed) +
             " bucketed directions, " + std::to_string(broken) + " violations";
  return r;
}

Result persistency() {
  // The bound is tau times the probability that a uniform edge is
  // bi-chromatic, i.e. tau * 2 I_f / n with I_f = (bi-chromatic edges) / 2^n.
  const std::size_t samples = 100000;
  std::uint64_t checks = 0, broken = 0;
  double worst = -1;
  auto check = [&](const FunctionOracle& f, double edge_p, double edge_se, Rng& rng) {
    for (std::size_t tau : {1u, 2u, 4u, 8u}) {
      const auto walk = flip_disagreement(f, tau, samples, rng);
      const double bound = static_cast<double>(tau) * edge_p;
      const double sigma = std::hypot(walk.std_error, static_cast<double>(tau) * edge_se);
      ++checks;
      worst = std::max(worst, (walk.value - bound) / std::max(sigma, 1e-12));
      if (walk.value > bound + 3 * sigma) ++broken;
    }
  };
  Rng rng(1007, 0);
  const auto maj = build_function("majority:n=33");
  const auto inf = estimate_influence(maj, samples, rng);
  check(maj, 2 * inf.value / 33, 2 * inf.std_error / 33, rng);
  for (int k = 0; k < 5; ++k) {
    const TruthTable t = TruthTable::random(rng, 10);
    const double exact = edge_stats(t).total_influence().value();
    check(table_oracle(t), 2 * exact / 10, 0.0, rng);
  }
  Result r;
  r.pass = broken == 0;
  r.detail = std::to_string(checks) + " (f, tau) checks, " + std::to_string(broken) +
             " above bound + 3 sigma; largest excess " + fmt("%.2f sigma", worst);
  return r;
}

Result overlap_tail() {
  Rng rng(1008, 0);
  const std::uint64_t draws = 100000;
  const auto h = overlap_sample(rng, 1024, 64, 32, draws);
  std::uint64_t tail = 0;
  for (std::size_t s = 16; s < h.size(); ++s) tail += h[s];
  const double emp = static_cast<double>(tail) / static_cast<double>(draws);
  const double exact = static_cast<double>(oracle::hypergeometric_tail(1024, 64, 32, 16));
  const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(draws));
  Result r;
  r.pass = emp <= exact + 3 * sigma && emp <= 0.01;
  r.detail = fmt("empirical %.3g, exact tail %.3g, sigma %.3g", emp, exact, sigma);
  return r;
}

Result end_to_end() {
  const TesterConfig cfg = load_tester_config(UNATE_DEFAULT_CONFIG);
  const auto f = build_function("xor_pair:n=64,i=1,j=2");
  std::uint64_t hits = 0, verified = 0;
  std::map<std::string, int> stages;
  double queries = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(1009, t);
    const Verdict v = main_tester(f, cfg, rng);
    queries += static_cast<double>(v.queries.raw);
    if (v.rejected()) {
      ++hits;
      verified += verify_violation(f, *v.violation);
      ++stages[v.transcript.back().stage];
    }
  }
  std::string by_stage;
  for (const auto& [stage, count] : stages) by_stage += " " + stage + "=" + std::to_string(count);
  Result r;
  r.pass = 3 * hits >= 100 && verified == hits;
  r.detail = fmt("detection %.2f over 50 trials, %.0f mean queries, eps %.2f, c_outer %.0f",
                 hits / 50.0, queries / 50, cfg.eps, cfg.c_outer) +
             ", " + std::to_string(verified) + " witnesses verified; by stage:" + by_stage;
  return r;
}

Result budget_fidelity() {
  TesterConfig cfg;
  cfg.eps = 0.25;
  std::uint64_t checks = 0, broken = 0;
  std::ostringstream log;
  for (std::uint64_t n : {16u, 64u, 256u}) {
    const auto f = build_function("constant:n=" + std::to_string(n));
    Rng rng(1010, n);
    const std::uint64_t naive = naive_tester(f, cfg, rng).queries.raw;
    const std::uint64_t hi = high_influence_tester(f, cfg, rng).queries.raw;
    const std::uint64_t main = main_tester(f, cfg, rng).queries.raw;
    checks += 3;
    broken += (naive != hand_naive(n)) + (hi != hand_high_influence(n)) +
              (main != hand_main(n, 10, 1));
    TesterConfig theory = cfg;
    theory.mode = TesterMode::theory;
    const Verdict tv = main_tester(f, theory, rng);
    std::uint64_t planned = 0;
    for (const auto& rec : tv.transcript) planned += rec.planned;
    ++checks;
    broken += planned != tv.queries.raw || tv.queries.raw != main_plan(n, theory).total;
    log << " n=" << n << ":" << naive << "/" << hi << "/" << main;
  }
  Result r;
  r.pass = broken == 0;
  r.detail = std::to_string(checks) + " ledgers, " + std::to_string(broken) +
             " mismatches; naive/high-influence/main" + log.str();
  return r;
}

Result reproducibility() {
  std::uint64_t runs = 0, differ = 0;
  for (const char* tester : {"naive", "high_influence", "main"}) {
    ExperimentConfig c;
    c.function = "xor_pair:n=16";
    c.tester = tester;
    c.trials = 8;
    c.master_seed = 1011;
    c.tester_cfg = load_tester_config(UNATE_DEFAULT_CONFIG);
    std::ostringstream a, b;
    write_csv(a, run_trials(c), false);
    c.jobs = 2;
    write_csv(b, run_trials(c), false);
    ++runs;
    differ += a.str() != b.str();
  }
  Result r;
  r.pass = differ == 0;
  r.detail = std::to_string(runs) + " experiments replayed, " + std::to_string(differ) +
             " CSV differences";
  return r;
}

} // namespace

int main() {
  criterion(1, "AE-Search soundness", ae_soundness);
  criterion(2, "One-sidedness", one_sided);
  criterion(3, "High-influence tester on parity n=256", high_influence_parity);
  criterion(4, "Exact distance oracle", distance_oracle);
  criterion(5, "Score machinery", score_machinery);
  criterion(6, "Bucket invariant", bucket_invariant);
  criterion(7, "Persistency inequality", persistency);
  criterion(8, "Overlap tail", overlap_tail);
  criterion(9, "End-to-end detection on xor_pair n=64", end_to_end);
  criterion(10, "Budget fidelity", budget_fidelity);
  criterion(11, "Reproducibility", reproducibility);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
