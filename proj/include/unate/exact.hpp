#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "unate/edge_stats.hpp"
#include "unate/edges.hpp"
#include "unate/oracle.hpp"
#include "unate/stats.hpp"
#include "unate/truth_table.hpp"

namespace unate {

inline constexpr std::size_t kMonotoneDistanceMaxArity = 12;
inline constexpr std::size_t kUnateDistanceMaxArity = 10;

struct UnateResult {
  bool unate = false;
  Point orientation;                     // valid when unate: f(x xor r) is monotone
  std::optional<std::size_t> direction;  // first direction with both orientations
};

/// Unate iff no direction carries both monotone and anti-monotone edges.
/// r_i = 1 exactly when direction i has only anti-monotone edges.
inline UnateResult is_unate(const TruthTable& tt) {
  const EdgeStats st = edge_stats(tt);
  UnateResult res;
  res.orientation = Point(tt.arity());
  for (std::size_t i = 0; i < tt.arity(); ++i) {
    if (st.e_plus[i] > 0 && st.e_minus[i] > 0) {
      res.direction = i;
      return res;
    }
    if (st.e_plus[i] == 0 && st.e_minus[i] > 0) res.orientation.set(i, true);
  }
  res.unate = true;
  return res;
}

struct DistanceResult {
  Rational value;
  std::optional<Point> orientation;  // unateness: the best shift r
  std::uint64_t cover_size = 0;      // minimum vertex cover of the violation graph
};

namespace detail {

/// Maximum matching in a bipartite graph (Hopcroft-Karp).
class BipartiteMatcher {
public:
  BipartiteMatcher(std::size_t left, std::size_t right)
      : adj_(left), match_l_(left, kNone), match_r_(right, kNone), dist_(left) {}

  void add_edge(std::size_t l, std::size_t r) { adj_[l].push_back(static_cast<std::uint32_t>(r)); }

  std::size_t solve() {
    std::size_t matching = 0;
    while (bfs())
      for (std::size_t l = 0; l < adj_.size(); ++l)
        if (match_l_[l] == kNone && dfs(l)) ++matching;
    return matching;
  }

private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  bool bfs() {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      if (match_l_[l] == kNone) {
        dist_[l] = 0;
        q.push(l);
      } else {
        dist_[l] = kNone;
      }
    }
    while (!q.empty()) {
      const auto l = q.front();
      q.pop();
      for (auto r : adj_[l]) {
        const auto m = match_r_[r];
        if (m == kNone) {
          found = true;
        } else if (dist_[m] == kNone) {
          dist_[m] = dist_[l] + 1;
          q.push(m);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t l) {
    for (auto r : adj_[l]) {
      const auto m = match_r_[r];
      if (m == kNone || (dist_[m] == dist_[l] + 1 && dfs(m))) {
        match_l_[l] = static_cast<std::uint32_t>(r);
        match_r_[r] = static_cast<std::uint32_t>(l);
        return true;
      }
    }
    dist_[l] = kNone;
    return false;
  }

  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::uint32_t> match_l_, match_r_, dist_;
};

} // namespace detail

/// Exact distance to monotonicity: the minimum vertex cover of the graph of
/// violated pairs x < y (f(x) = 1, f(y) = 0), which by Koenig's theorem equals
/// its maximum matching.
inline DistanceResult distance_to_monotone(const TruthTable& tt) {
  if (tt.arity() > kMonotoneDistanceMaxArity)
    throw ContractViolation("distance_to_monotone: arity above 12");
  const std::uint64_t size = tt.size();
  const std::uint64_t full = size - 1;
  std::vector<std::uint32_t> id(size);
  std::size_t ones = 0, zeros = 0;
  for (std::uint64_t p = 0; p < size; ++p)
    id[p] = static_cast<std::uint32_t>(tt.get(p) ? ones++ : zeros++);

  detail::BipartiteMatcher matcher(ones, zeros);
  for (std::uint64_t x = 0; x < size; ++x) {
    if (!tt.get(x)) continue;
    const std::uint64_t free = full & ~x;
    for (std::uint64_t sub = free; sub != 0; sub = (sub - 1) & free)
      if (!tt.get(x | sub)) matcher.add_edge(id[x], id[x | sub]);
  }
  DistanceResult res;
  res.cover_size = matcher.solve();
  res.value = Rational(res.cover_size, size);
  return res;
}

/// min over shifts r (index order, stopping at 0) of the distance of
/// x -> f(x xor r) to monotonicity.
inline DistanceResult distance_to_unate(const TruthTable& tt) {
  if (tt.arity() > kUnateDistanceMaxArity)
    throw ContractViolation("distance_to_unate: arity above 10");
  DistanceResult best;
  bool have = false;
  for (std::uint64_t r = 0; r < tt.size(); ++r) {
    DistanceResult d = distance_to_monotone(tt.shifted(r));
    if (!have || d.cover_size < best.cover_size) {
      best = d;
      best.orientation = Point::from_index(tt.arity(), r);
      have = true;
    }
    if (best.cover_size == 0) break;
  }
  return best;
}

/// Re-queries the four endpoints and checks every stored orientation.
inline bool verify_violation(const FunctionOracle& f, const Violation& v) {
  const std::size_t n = f.arity();
  const auto shape_ok = [&](const LabeledEdge& e, EdgeKind kind) {
    return e.kind == kind && e.direction == v.direction && v.direction < n &&
           e.base.arity() == n && !e.base[v.direction];
  };
  if (!shape_ok(v.monotone_edge, EdgeKind::monotone) ||
      !shape_ok(v.anti_edge, EdgeKind::anti_monotone))
    return false;
  const bool m0 = f(v.monotone_edge.base), m1 = f(v.monotone_edge.top());
  const bool a0 = f(v.anti_edge.base), a1 = f(v.anti_edge.top());
  return !m0 && m1 && a0 && !a1;
}

} // namespace unate
