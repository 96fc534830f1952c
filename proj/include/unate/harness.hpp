#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "unate/analysis.hpp"
#include "unate/exact.hpp"
#include "unate/oracle.hpp"
#include "unate/stats.hpp"
#include "unate/testers.hpp"

namespace unate {

inline constexpr int kCsvSchema = 1;

struct ExperimentConfig {
  std::string function;
  std::string tester = "main";
  TesterConfig tester_cfg;
  std::size_t trials = 1;
  std::uint64_t master_seed = 1;
  std::size_t jobs = 1;
  bool timing = false;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (tester != "main" && tester != "naive" && tester != "high_influence")
      throw std::invalid_argument("unknown tester '" + tester +
                                  "' (expected main, naive or high_influence)");
    tester_cfg.validate();
  }
};

struct TrialRecord {
  std::string function;
  std::size_t n = 0;
  double eps = 0;
  std::string tester;
  std::string mode;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Outcome verdict = Outcome::unate;
  std::uint64_t queries_raw = 0;
  std::uint64_t queries_distinct = 0;
  bool distinct_exact = true;
  double wall_time_ms = 0;
  std::optional<Violation> witness;
  bool witness_verified = false;
  std::string stage;  // transcript stage that produced the witness
  std::string note;
};

inline Verdict run_tester(const std::string& id, const FunctionOracle& f, const TesterConfig& cfg,
                          Rng& rng) {
  if (id == "naive") return naive_tester(f, cfg, rng);
  if (id == "high_influence") return high_influence_tester(f, cfg, rng);
  if (id == "main") return main_tester(f, cfg, rng);
  throw std::invalid_argument("unknown tester '" + id + "'");
}

/// Trial `trial` draws from stream `trial` of the master seed.
inline TrialRecord run_trial(const FunctionOracle& base, const ExperimentConfig& cfg,
                             std::size_t trial) {
  Rng rng(cfg.master_seed, trial);
  const auto start = std::chrono::steady_clock::now();
  const Verdict v = run_tester(cfg.tester, base.unmetered(), cfg.tester_cfg, rng);
  const auto stop = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.function = base.descriptor();
  rec.n = base.arity();
  rec.eps = cfg.tester_cfg.eps;
  rec.tester = cfg.tester;
  rec.mode = to_string(cfg.tester_cfg.mode);
  rec.trial = trial;
  rec.seed = cfg.master_seed;
  rec.verdict = v.outcome;
  rec.queries_raw = v.queries.raw;
  rec.queries_distinct = v.queries.distinct;
  rec.distinct_exact = v.queries.distinct_exact;
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  rec.note = v.note;
  if (v.violation) {
    rec.witness = v.violation;
    rec.witness_verified = verify_violation(base.unmetered(), *v.violation);
    for (auto it = v.transcript.rbegin(); it != v.transcript.rend(); ++it)
      if (it->outcome == "reject") {
        rec.stage = it->stage;
        break;
      }
  }
  return rec;
}

/// Runs all trials on up to `jobs` threads; records come back in trial order.
inline std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  const FunctionOracle base = build_function(cfg.function);
  std::vector<TrialRecord> out(cfg.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cfg.trials;) {
      try {
        out[k] = run_trial(base, cfg, k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::min(cfg.jobs, cfg.trials);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct Summary {
  std::size_t trials = 0;
  std::size_t rejections = 0;
  std::size_t inconclusive = 0;
  double detection_rate = 0;
  Interval wilson;
  double mean_queries = 0;
  std::uint64_t max_queries = 0;
};

inline Summary summarize(const std::vector<TrialRecord>& rows) {
  Summary s;
  s.trials = rows.size();
  double total = 0;
  for (const auto& r : rows) {
    if (r.verdict == Outcome::non_unate) ++s.rejections;
    if (r.verdict == Outcome::inconclusive) ++s.inconclusive;
    total += static_cast<double>(r.queries_raw);
    s.max_queries = std::max(s.max_queries, r.queries_raw);
  }
  if (s.trials > 0) {
    s.detection_rate = static_cast<double>(s.rejections) / static_cast<double>(s.trials);
    s.wilson = wilson_interval(s.rejections, s.trials);
    s.mean_queries = total / static_cast<double>(s.trials);
  }
  return s;
}

/// Shortest round-trip representation; independent of locale and platform.
inline std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string csv_header(bool timing) {
  std::string h =
      "schema,function,n,eps,tester,mode,trial,seed,verdict,queries_raw,queries_distinct,"
      "distinct_exact,witness_verified,stage,witness";
  if (timing) h += ",wall_time_ms";
  return h;
}

/// Quotes a field when it holds a separator or a quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& rows, bool timing) {
  os << csv_header(timing) << '\n';
  for (const auto& r : rows) {
    os << kCsvSchema << ',' << csv_field(r.function) << ',' << r.n << ',' << format_double(r.eps)
       << ',' << r.tester << ',' << r.mode << ',' << r.trial << ',' << r.seed << ','
       << to_string(r.verdict) << ',' << r.queries_raw << ',' << r.queries_distinct << ','
       << (r.distinct_exact ? 1 : 0) << ',' << (r.witness_verified ? 1 : 0) << ',' << r.stage
       << ',' << (r.witness ? r.witness->str() : "");
    if (timing) os << ',' << format_double(r.wall_time_ms);
    os << '\n';
  }
}

inline nlohmann::json to_json(const Summary& s) {
  return {{"trials", s.trials},
          {"rejections", s.rejections},
          {"inconclusive", s.inconclusive},
          {"detection_rate", s.detection_rate},
          {"wilson95", {s.wilson.low, s.wilson.high}},
          {"mean_queries", s.mean_queries},
          {"max_queries", s.max_queries}};
}

inline nlohmann::json to_json(const TesterConfig& c) {
  nlohmann::json j = {{"eps", c.eps},
                      {"mode", to_string(c.mode)},
                      {"constants",
                       {{"c_eps", c.c_eps},
                        {"c_naive", c.c_naive},
                        {"c_outer", c.c_outer},
                        {"eps_tilde_sq", c.eps_tilde_sq}}},
                      {"include_case3", c.include_case3},
                      {"early_exit", c.early_exit}};
  if (c.max_queries != std::numeric_limits<std::uint64_t>::max()) j["max_queries"] = c.max_queries;
  if (c.levels) j["levels"] = *c.levels;
  if (!c.alpha_grid.empty()) j["alpha_grid"] = c.alpha_grid;
  return j;
}

/// Reads the keys written by to_json; unknown constants are rejected.
inline TesterConfig tester_config_from_json(const nlohmann::json& j, TesterConfig c = {}) {
  try {
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("constants"))
      for (const auto& [k, v] : j.at("constants").items()) c.set_constant(k, format_double(v.get<double>()));
    if (j.contains("include_case3")) c.include_case3 = j.at("include_case3").get<bool>();
    if (j.contains("early_exit")) c.early_exit = j.at("early_exit").get<bool>();
    if (j.contains("max_queries")) c.max_queries = j.at("max_queries").get<std::uint64_t>();
    if (j.contains("levels")) c.levels = j.at("levels").get<std::size_t>();
    if (j.contains("alpha_grid")) c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("tester config: ") + e.what());
  }
  c.validate();
  return c;
}

inline TesterConfig load_tester_config(const std::string& path, TesterConfig c = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  return tester_config_from_json(j, c);
}

inline nlohmann::json to_json(const TrialRecord& r, bool timing) {
  nlohmann::json j = {{"schema", kCsvSchema},
                      {"function", r.function},
                      {"n", r.n},
                      {"eps", r.eps},
                      {"tester", r.tester},
                      {"mode", r.mode},
                      {"trial", r.trial},
                      {"seed", r.seed},
                      {"verdict", to_string(r.verdict)},
                      {"queries_raw", r.queries_raw},
                      {"queries_distinct", r.queries_distinct},
                      {"distinct_exact", r.distinct_exact},
                      {"witness_verified", r.witness_verified},
                      {"stage", r.stage},
                      {"witness", r.witness ? r.witness->str() : ""}};
  if (timing) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline void write_json(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<TrialRecord>& rows) {
  nlohmann::json j;
  j["function"] = cfg.function;
  j["tester"] = cfg.tester;
  j["master_seed"] = cfg.master_seed;
  j["config"] = to_json(cfg.tester_cfg);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r, cfg.timing));
  j["summary"] = to_json(summarize(rows));
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationRow {
  double value = 0;
  Summary summary;
};

struct Calibration {
  std::string constant;
  std::vector<CalibrationRow> rows;
  std::optional<double> recommended;  // smallest value reaching rate >= 2/3
};

/// Parses "name=v1,v2,...".
inline std::pair<std::string, std::vector<double>> parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("sweep must look like name=v1,v2,...");
  std::pair<std::string, std::vector<double>> out{text.substr(0, eq), {}};
  std::string rest = text.substr(eq + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size())
      throw std::invalid_argument("sweep value '" + item + "' is not a number");
    out.second.push_back(v);
    pos = comma + 1;
  }
  if (out.second.empty()) throw std::invalid_argument("sweep grid is empty");
  return out;
}

inline Calibration calibrate(const ExperimentConfig& base, const std::string& constant,
                             const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  Calibration cal;
  cal.constant = constant;
  for (double v : grid) {
    ExperimentConfig cfg = base;
    cfg.tester_cfg.set_constant(constant, format_double(v));
    CalibrationRow row;
    row.value = v;
    row.summary = summarize(run_trials(cfg));
    if (!cal.recommended && 3 * row.summary.rejections >= 2 * row.summary.trials)
      cal.recommended = v;
    cal.rows.push_back(row);
  }
  return cal;
}

inline void write_calibration_csv(std::ostream& os, const Calibration& cal) {
  os << cal.constant << ",trials,rejections,detection_rate,wilson_low,wilson_high,mean_queries,"
                        "max_queries\n";
  for (const auto& r : cal.rows)
    os << format_double(r.value) << ',' << r.summary.trials << ',' << r.summary.rejections << ','
       << format_double(r.summary.detection_rate) << ',' << format_double(r.summary.wilson.low)
       << ',' << format_double(r.summary.wilson.high) << ','
       << format_double(r.summary.mean_queries) << ',' << r.summary.max_queries << '\n';
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const ScoreTable& st) {
  nlohmann::json j;
  j["n"] = st.n;
  j["levels"] = st.lambda;
  j["method"] = st.exact ? "exact" : "sampled";
  j["points"] = st.points;
  if (!st.exact) j["sets_per_point"] = st.set_budget;
  j["ae_samples"] = st.ae.samples;
  j["ae_probability"] =
      st.ae.method == ProbabilityMethod::exact_dp ? "exact_dp" : "monte_carlo";
  j["score_plus"] = st.score_plus;
  j["score_minus"] = st.score_minus;
  j["weighted_plus"] = st.weighted_plus;
  j["weighted_minus"] = st.weighted_minus;
  j["sum_min"] = score_sum_min(st);
  return j;
}

inline nlohmann::json to_json(const BucketReport& rep) {
  nlohmann::json j;
  j["eps"] = rep.eps;
  j["c"] = rep.c;
  j["bucket_count"] = rep.bucket_count;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : rep.entries) {
    nlohmann::json x = {{"direction", e.direction + 1},
                        {"t", e.t},
                        {"r", e.r},
                        {"min_score", e.min_score}};
    x["bucket"] = e.bucket ? nlohmann::json(*e.bucket) : nlohmann::json(nullptr);
    j["entries"].push_back(x);
  }
  std::vector<std::size_t> unb;
  for (auto i : rep.unbucketed) unb.push_back(i + 1);
  j["unbucketed"] = unb;
  if (rep.dominating) {
    const auto& d = *rep.dominating;
    std::vector<std::size_t> dirs;
    for (auto i : d.directions) dirs.push_back(i + 1);
    j["dominating"] = {{"t", d.t},         {"r", d.r},         {"h", d.h},
                       {"H", d.H},         {"directions", dirs}, {"contribution", d.contribution},
                       {"alpha", d.alpha}, {"beta", d.beta},   {"eps_tilde_sq", d.eps_tilde_sq}};
  } else {
    j["dominating"] = nullptr;
  }
  return j;
}

inline nlohmann::json distance_report(const TruthTable& tt) {
  const DistanceResult mono = distance_to_monotone(tt);
  const DistanceResult un = distance_to_unate(tt);
  const UnateResult u = is_unate(tt);
  nlohmann::json j;
  j["n"] = tt.arity();
  j["unate"] = u.unate;
  j["distance_to_monotone"] = mono.value.str();
  j["distance_to_unate"] = un.value.str();
  j["monotone_cover"] = mono.cover_size;
  j["unate_cover"] = un.cover_size;
  j["unate_shift"] = un.orientation ? un.orientation->to_bits() : "";
  return j;
}

} // namespace unate
