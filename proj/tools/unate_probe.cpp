// unate_probe: command-line runner for the unateness testers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unate/unate.hpp"

#ifndef UNATE_DEFAULT_CONFIG
#define UNATE_DEFAULT_CONFIG ""
#endif

namespace {

constexpr int kUsage = 1;
constexpr int kBudget = 2;

struct Options {
  std::string fn;
  std::string tester = "main";
  double eps = -1;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::string mode;
  std::vector<std::string> constants;
  std::size_t jobs = 1;
  std::string out;
  std::string format = "csv";
  std::uint64_t max_queries = 0;
  bool timing = false;
  std::string sweep;
  std::string config = UNATE_DEFAULT_CONFIG;
  std::string score_mode = "exact";
  std::size_t point_budget = 256;
  std::size_t set_budget = 256;
  std::size_t levels = 0;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("UNATE_PROBE_SEED");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw std::invalid_argument("UNATE_PROBE_SEED must be an unsigned integer");
  return v;
}

/// "a=1,b=2" and repeated flags.
void apply_constants(unate::TesterConfig& cfg, const std::vector<std::string>& items) {
  for (const auto& group : items) {
    std::stringstream ss(group);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("constants must look like k=v, got '" + kv + "'");
      cfg.set_constant(kv.substr(0, eq), kv.substr(eq + 1));
    }
  }
}

unate::ExperimentConfig experiment(const Options& o) {
  unate::ExperimentConfig cfg;
  if (o.fn.empty()) throw std::invalid_argument("--fn is required");
  cfg.function = o.fn;
  cfg.tester = o.tester;
  if (!o.config.empty()) cfg.tester_cfg = unate::load_tester_config(o.config);
  if (!o.mode.empty()) cfg.tester_cfg.mode = unate::parse_mode(o.mode);
  if (o.eps > 0) cfg.tester_cfg.eps = o.eps;
  apply_constants(cfg.tester_cfg, o.constants);
  if (o.max_queries > 0) cfg.tester_cfg.max_queries = o.max_queries;
  cfg.trials = o.trials;
  cfg.master_seed = o.seed;
  cfg.jobs = o.jobs;
  cfg.timing = o.timing;
  cfg.validate();
  return cfg;
}

/// Writes to --out or stdout.
template <typename Fn>
void emit(const Options& o, Fn&& write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw std::invalid_argument("cannot open '" + o.out + "' for writing");
  write(f);
}

void print_summary(const unate::Summary& s) {
  std::cerr << "trials=" << s.trials << " rejections=" << s.rejections
            << " inconclusive=" << s.inconclusive
            << " rate=" << unate::format_double(s.detection_rate) << " wilson95=["
            << unate::format_double(s.wilson.low) << "," << unate::format_double(s.wilson.high)
            << "] mean_queries=" << unate::format_double(s.mean_queries)
            << " max_queries=" << s.max_queries << "\n";
}

int cmd_test(const Options& o) {
  const auto cfg = experiment(o);
  const auto rows = unate::run_trials(cfg);
  emit(o, [&](std::ostream& os) {
    if (o.format == "json")
      unate::write_json(os, cfg, rows);
    else
      unate::write_csv(os, rows, cfg.timing);
  });
  const auto s = unate::summarize(rows);
  print_summary(s);
  return s.inconclusive > 0 ? kBudget : 0;
}

int cmd_bench(const Options& o) {
  auto cfg = experiment(o);
  cfg.timing = true;
  const auto rows = unate::run_trials(cfg);
  double total_ms = 0;
  std::uint64_t total_q = 0;
  for (const auto& r : rows) {
    total_ms += r.wall_time_ms;
    total_q += r.queries_raw;
  }
  const auto s = unate::summarize(rows);
  const auto plan_n = rows.front().n;
  std::uint64_t plan = 0;
  if (cfg.tester == "naive") plan = unate::naive_plan(plan_n, cfg.tester_cfg);
  else if (cfg.tester == "high_influence") plan = unate::high_influence_plan(plan_n);
  else plan = unate::main_plan(plan_n, cfg.tester_cfg).total;
  nlohmann::json j = {{"function", cfg.function},
                      {"tester", cfg.tester},
                      {"trials", s.trials},
                      {"planned_queries", plan},
                      {"mean_queries", s.mean_queries},
                      {"max_queries", s.max_queries},
                      {"mean_wall_ms", total_ms / static_cast<double>(rows.size())},
                      {"queries_per_second",
                       total_ms > 0 ? static_cast<double>(total_q) / (total_ms / 1000.0) : 0.0}};
  emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return s.inconclusive > 0 ? kBudget : 0;
}

int cmd_score(const Options& o) {
  if (o.fn.empty()) throw std::invalid_argument("--fn is required");
  const auto f = unate::build_function(o.fn);
  const auto tt = unate::to_truth_table(f);
  unate::ScoreOptions opt;
  if (o.score_mode == "sampled") {
    opt.mode = unate::EvalMode::sampled(o.set_budget, o.seed);
    opt.point_budget = o.point_budget;
  } else if (o.score_mode != "exact") {
    throw std::invalid_argument("--score-mode must be exact or sampled");
  }
  if (o.levels > 0) opt.levels = o.levels;
  const double eps = o.eps > 0 ? o.eps : 0.1;
  const auto st = unate::score_table(tt, unate::AeParams::for_arity(tt.arity()), opt);
  nlohmann::json j;
  j["function"] = f.descriptor();
  j["score"] = unate::to_json(st);
  j["buckets"] = unate::to_json(unate::bucket_report(st, eps));
  emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return 0;
}

int cmd_distance(const Options& o) {
  if (o.fn.empty()) throw std::invalid_argument("--fn is required");
  const auto f = unate::build_function(o.fn);
  if (f.arity() > unate::kUnateDistanceMaxArity)
    throw unate::ContractViolation("distance: arity above 10");
  nlohmann::json j = unate::distance_report(unate::to_truth_table(f));
  j["function"] = f.descriptor();
  emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return 0;
}

int cmd_calibrate(const Options& o) {
  if (o.sweep.empty()) throw std::invalid_argument("--sweep is required");
  const auto [name, grid] = unate::parse_sweep(o.sweep);
  const auto cfg = experiment(o);
  const auto cal = unate::calibrate(cfg, name, grid);
  emit(o, [&](std::ostream& os) { unate::write_calibration_csv(os, cal); });
  if (cal.recommended)
    std::cerr << "recommended " << name << "=" << unate::format_double(*cal.recommended) << "\n";
  else
    std::cerr << "no value reached detection rate 2/3\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unateness testers: seeded experiments, score tables and exact distances"};
  app.require_subcommand(1);
  Options o;
  try {
    o.seed = default_seed();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto common = [&](CLI::App* sub) {
    sub->add_option("--fn", o.fn, "function spec, e.g. majority:n=33");
    sub->add_option("--eps", o.eps, "distance parameter");
    sub->add_option("--seed", o.seed, "master seed (default $UNATE_PROBE_SEED or 1)");
    sub->add_option("--out", o.out, "output file (default stdout)");
  };
  auto runner = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--tester", o.tester, "main | naive | high_influence")
        ->check(CLI::IsMember({"main", "naive", "high_influence"}));
    sub->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
    sub->add_option("--mode", o.mode, "theory | practical")
        ->check(CLI::IsMember({"theory", "practical"}));
    sub->add_option("--constants", o.constants, "k=v[,k=v] overrides");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--max-queries", o.max_queries, "per-trial query budget");
    sub->add_option("--config", o.config, "tester config JSON");
  };

  auto* test = app.add_subcommand("test", "run seeded trials and print one row per trial");
  runner(test);
  test->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  test->add_flag("--timing", o.timing, "add wall_time_ms (output is then not reproducible)");

  auto* bench = app.add_subcommand("bench", "time trials and compare spent with planned queries");
  runner(bench);

  auto* score = app.add_subcommand("score", "score table and bucket report");
  common(score);
  score->add_option("--score-mode", o.score_mode, "exact | sampled");
  score->add_option("--points", o.point_budget, "sampled mode: points");
  score->add_option("--sets", o.set_budget, "sampled mode: sets per point");
  score->add_option("--levels", o.levels, "number of levels j (default from n)");

  auto* distance = app.add_subcommand("distance", "exact distance to monotone and to unate");
  common(distance);

  auto* cal = app.add_subcommand("calibrate", "sweep one constant and report detection");
  runner(cal);
  cal->add_option("--sweep", o.sweep, "name=v1,v2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*test) return cmd_test(o);
    if (*bench) return cmd_bench(o);
    if (*score) return cmd_score(o);
    if (*distance) return cmd_distance(o);
    if (*cal) return cmd_calibrate(o);
  } catch (const unate::BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
