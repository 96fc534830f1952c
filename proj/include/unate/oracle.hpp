#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "unate/hypercube.hpp"
#include "unate/truth_table.hpp"

namespace unate {

/// Thrown by a ledger whose query limit has been reached.
class BudgetExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LedgerSnapshot {
  std::uint64_t raw = 0;
  std::uint64_t distinct = 0;
  bool distinct_exact = true;
};

/// Raw and distinct query counts for one trial.
///
/// Distinct points are tracked exactly with a bitmap when n <= 24 and with a
/// HyperLogLog sketch (2^14 registers, ~1% relative error) above that; the
/// snapshot flags which one applies. A ledger may forward every record to a
/// parent so nested accounting stays consistent. Not thread-safe.
class QueryLedger {
public:
  explicit QueryLedger(std::size_t arity, std::shared_ptr<QueryLedger> parent = nullptr)
      : arity_(arity), parent_(std::move(parent)) {}

  void record(const Point& x) {
    if (raw_ >= limit_) throw BudgetExhausted("query budget of " + std::to_string(limit_) +
                                              " exhausted");
    if (parent_) parent_->record(x);
    ++raw_;
    track_distinct(x);
  }

  /// Adds queries without points (plan-only accounting).
  void charge(std::uint64_t count) {
    if (count > limit_ - std::min(limit_, raw_))
      throw BudgetExhausted("query budget of " + std::to_string(limit_) + " exhausted");
    if (parent_) parent_->charge(count);
    raw_ += count;
    charged_ += count;
  }

  void set_limit(std::uint64_t limit) { limit_ = limit; }
  std::uint64_t limit() const { return limit_; }

  std::uint64_t raw() const { return raw_; }
  std::uint64_t charged() const { return charged_; }
  bool distinct_exact() const { return arity_ <= kMaxTableArity; }
  std::uint64_t distinct() const {
    if (distinct_exact()) return exact_distinct_;
    return hll_.empty() ? 0 : hll_estimate();
  }

  LedgerSnapshot snapshot() const { return {raw(), distinct(), distinct_exact()}; }

private:
  static constexpr unsigned kHllBits = 14;

  void track_distinct(const Point& x) {
    if (distinct_exact()) {
      if (seen_.empty()) seen_.assign(TruthTable::word_count(arity_), 0);
      const std::uint64_t p = x.index();
      std::uint64_t& w = seen_[p >> 6];
      const std::uint64_t m = std::uint64_t{1} << (p & 63);
      if (!(w & m)) {
        w |= m;
        ++exact_distinct_;
      }
      return;
    }
    if (hll_.empty()) hll_.assign(std::size_t{1} << kHllBits, 0);
    const std::uint64_t h = Rng::mix(static_cast<std::uint64_t>(x.hash()));
    const std::size_t reg = static_cast<std::size_t>(h >> (64 - kHllBits));
    const std::uint64_t rest = (h << kHllBits) | (std::uint64_t{1} << (kHllBits - 1));
    const auto rank = static_cast<std::uint8_t>(std::countl_zero(rest) + 1);
    hll_[reg] = std::max(hll_[reg], rank);
  }

  std::uint64_t hll_estimate() const {
    const double m = static_cast<double>(hll_.size());
    double sum = 0;
    std::size_t zeros = 0;
    for (auto r : hll_) {
      sum += std::ldexp(1.0, -static_cast<int>(r));
      if (r == 0) ++zeros;
    }
    const double alpha = 0.7213 / (1 + 1.079 / m);
    double est = alpha * m * m / sum;
    if (est <= 2.5 * m && zeros > 0) est = m * std::log(m / static_cast<double>(zeros));
    return static_cast<std::uint64_t>(std::llround(est));
  }

  std::size_t arity_;
  std::shared_ptr<QueryLedger> parent_;
  std::uint64_t limit_ = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t raw_ = 0;
  std::uint64_t charged_ = 0;
  std::uint64_t exact_distinct_ = 0;
  std::vector<std::uint64_t> seen_;
  std::vector<std::uint8_t> hll_;
};

struct Metered;

/// Query access to f: {0,1}^n -> {0,1}.
///
/// The evaluator is immutable and shared between copies. Every call through
/// operator() is recorded in the attached ledger, if any; unmetered() gives a
/// view that bypasses all accounting (used for witness verification).
class FunctionOracle {
public:
  using Eval = std::function<bool(const Point&)>;

  FunctionOracle() = default;
  FunctionOracle(std::size_t n, std::string descriptor, Eval fn)
      : n_(n), descriptor_(std::move(descriptor)),
        fn_(std::make_shared<const Eval>(std::move(fn))) {}

  bool operator()(const Point& x) const {
    if (x.arity() != n_) throw ContractViolation("oracle: point arity mismatch");
    if (ledger_) ledger_->record(x);
    return (*fn_)(x);
  }
  bool eval(const Point& x) const { return (*this)(x); }

  std::size_t arity() const { return n_; }
  const std::string& descriptor() const { return descriptor_; }
  const std::shared_ptr<QueryLedger>& ledger() const { return ledger_; }

  FunctionOracle unmetered() const {
    FunctionOracle g = *this;
    g.ledger_.reset();
    return g;
  }

private:
  friend FunctionOracle shift(const FunctionOracle& f, const Point& r);
  friend Metered with_ledger(const FunctionOracle& f);

  std::size_t n_ = 0;
  std::string descriptor_;
  std::shared_ptr<const Eval> fn_;
  std::shared_ptr<QueryLedger> ledger_;
};

struct Metered {
  FunctionOracle oracle;
  std::shared_ptr<QueryLedger> ledger;
};

/// g(x) = f(x xor r). Queries to g are recorded in f's ledger.
inline FunctionOracle shift(const FunctionOracle& f, const Point& r) {
  if (r.arity() != f.arity()) throw ContractViolation("shift: arity mismatch");
  FunctionOracle g(f.n_, f.descriptor_ + "^" + r.to_hex(),
                   [fn = f.fn_, r](const Point& x) { return (*fn)(x ^ r); });
  g.ledger_ = f.ledger_;
  return g;
}

/// Attaches a fresh ledger; queries still propagate to any ledger f had.
inline Metered with_ledger(const FunctionOracle& f) {
  FunctionOracle g = f;
  g.ledger_ = std::make_shared<QueryLedger>(f.arity(), f.ledger_);
  return {g, g.ledger_};
}

/// Caches answers so repeated points reach f (and its ledger) only once.
/// The cache is not synchronised; use one memoized oracle per thread.
inline FunctionOracle memoize(const FunctionOracle& f) {
  auto cache = std::make_shared<std::unordered_map<Point, bool, PointHash>>();
  return FunctionOracle(f.arity(), f.descriptor() + "+memo", [f, cache](const Point& x) {
    auto it = cache->find(x);
    if (it != cache->end()) return it->second;
    const bool v = f(x);
    cache->emplace(x, v);
    return v;
  });
}

inline FunctionOracle table_oracle(TruthTable tt, std::string descriptor) {
  auto t = std::make_shared<const TruthTable>(std::move(tt));
  const std::size_t n = t->arity();
  return FunctionOracle(n, std::move(descriptor),
                        [t](const Point& x) { return t->get(x.index()); });
}

inline FunctionOracle table_oracle(const TruthTable& tt) {
  return table_oracle(tt, "table:n=" + std::to_string(tt.arity()) + ",bits=" +
                              (tt.arity() <= 6 ? tt.to_hex() : std::string("...")));
}

/// Evaluates f at every point (through f's ledger, if any).
inline TruthTable to_truth_table(const FunctionOracle& f) {
  if (f.arity() > kMaxTableArity) throw ContractViolation("to_truth_table: arity above 24");
  TruthTable t(f.arity());
  for (std::uint64_t p = 0; p < t.size(); ++p)
    if (f(Point::from_index(f.arity(), p))) t.set(p, true);
  return t;
}

/// Parsed form of "family:key=value,key=value".
struct FunctionSpec {
  std::string family;
  std::map<std::string, std::string> params;

  static FunctionSpec parse(const std::string& text) {
    FunctionSpec s;
    const auto colon = text.find(':');
    s.family = text.substr(0, colon);
    if (s.family.empty()) throw std::invalid_argument("function spec: missing family name");
    if (colon == std::string::npos) return s;
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("function spec: expected key=value, got '" + item + "'");
      s.params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return s;
  }

  std::string str() const {
    std::string out = family;
    char sep = ':';
    for (const auto& [k, v] : params) {
      out += sep + k + "=" + v;
      sep = ',';
    }
    return out;
  }
};

namespace detail {

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size() || v.empty() || v[0] == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("function spec: " + key + " must be a non-negative integer, got '" +
                                v + "'");
  }
}

inline std::uint64_t param(const FunctionSpec& s, const std::string& key,
                           std::optional<std::uint64_t> fallback = std::nullopt) {
  auto it = s.params.find(key);
  if (it == s.params.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument("function spec: " + s.family + " requires " + key);
  }
  return parse_uint(key, it->second);
}

inline std::size_t coordinate(const FunctionSpec& s, const std::string& key, std::size_t n,
                              std::uint64_t fallback) {
  const auto i = param(s, key, fallback);
  if (i < 1 || i > n)
    throw std::invalid_argument("function spec: " + key + "=" + std::to_string(i) +
                                " outside [1.." + std::to_string(n) + "]");
  return static_cast<std::size_t>(i - 1);
}

inline void check_keys(const FunctionSpec& s, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : s.params) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("function spec: unknown key '" + k + "' for " + s.family);
  }
}

} // namespace detail

/// Builds one of the built-in families:
///   constant:n=,b=   dictator:n=,i=   anti_dictator:n=,i=   majority:n= (odd)
///   parity:n=,set=1+2+...   xor_pair:n=,i=,j=   random:n=,seed=
///   monotone_random:n=,seed=   table:path=[,n=]
/// Coordinates are 1-based.
inline FunctionOracle build_function(const FunctionSpec& s) {
  using detail::check_keys;
  using detail::coordinate;
  using detail::param;
  const std::string desc = s.str();

  if (s.family == "table") {
    check_keys(s, {"path", "n"});
    auto it = s.params.find("path");
    if (it == s.params.end()) throw std::invalid_argument("function spec: table requires path");
    TruthTable t = TruthTable::load(it->second);
    if (s.params.count("n") && param(s, "n") != t.arity())
      throw std::invalid_argument("function spec: truth table arity mismatch");
    return table_oracle(std::move(t), desc);
  }

  const std::size_t n = static_cast<std::size_t>(param(s, "n"));
  if (n < 1) throw std::invalid_argument("function spec: n must be >= 1");

  if (s.family == "constant") {
    check_keys(s, {"n", "b"});
    const auto b = param(s, "b", 0);
    if (b > 1) throw std::invalid_argument("function spec: constant b must be 0 or 1");
    return FunctionOracle(n, desc, [v = b == 1](const Point&) { return v; });
  }
  if (s.family == "dictator" || s.family == "anti_dictator") {
    check_keys(s, {"n", "i"});
    const auto i = coordinate(s, "i", n, 1);
    const bool anti = s.family == "anti_dictator";
    return FunctionOracle(n, desc, [i, anti](const Point& x) { return x[i] != anti; });
  }
  if (s.family == "majority") {
    check_keys(s, {"n"});
    if (n % 2 == 0) throw std::invalid_argument("function spec: majority needs odd n");
    return FunctionOracle(n, desc, [n](const Point& x) { return 2 * x.weight() > n; });
  }
  if (s.family == "parity") {
    check_keys(s, {"n", "set"});
    Point mask(n);
    auto it = s.params.find("set");
    if (it == s.params.end() || it->second == "all") {
      for (std::size_t i = 0; i < n; ++i) mask.set(i, true);
    } else {
      std::stringstream ss(it->second);
      std::string tok;
      while (std::getline(ss, tok, '+')) {
        const auto i = detail::parse_uint("set", tok);
        if (i < 1 || i > n) throw std::invalid_argument("function spec: parity index out of range");
        mask.set(static_cast<std::size_t>(i - 1), true);
      }
    }
    return FunctionOracle(n, desc, [mask](const Point& x) {
      unsigned acc = 0;
      for (std::size_t k = 0; k < mask.words().size(); ++k)
        acc ^= static_cast<unsigned>(std::popcount(x.words()[k] & mask.words()[k]));
      return (acc & 1u) != 0;
    });
  }
  if (s.family == "xor_pair") {
    check_keys(s, {"n", "i", "j"});
    const auto i = coordinate(s, "i", n, 1);
    const auto j = coordinate(s, "j", n, 2);
    if (i == j) throw std::invalid_argument("function spec: xor_pair needs i != j");
    return FunctionOracle(n, desc, [i, j](const Point& x) { return x[i] != x[j]; });
  }
  if (s.family == "random" || s.family == "monotone_random") {
    check_keys(s, {"n", "seed"});
    if (n > kMaxTableArity) throw std::invalid_argument("function spec: random needs n <= 24");
    Rng rng(param(s, "seed", 0), 0x7461626c65ULL);
    TruthTable t = s.family == "random" ? TruthTable::random(rng, n) : random_monotone_table(rng, n);
    return table_oracle(std::move(t), desc);
  }
  throw std::invalid_argument("function spec: unknown family '" + s.family + "'");
}

inline FunctionOracle build_function(const std::string& text) {
  return build_function(FunctionSpec::parse(text));
}

} // namespace unate
