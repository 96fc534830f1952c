#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "unate/stats.hpp"
#include "unate/truth_table.hpp"

namespace unate {

/// Exact per-direction counts of monotone (E_i^+) and anti-monotone (E_i^-)
/// edges of a truth table.
struct EdgeStats {
  std::size_t n = 0;
  std::vector<std::uint64_t> e_plus;
  std::vector<std::uint64_t> e_minus;

  std::uint64_t bichromatic_edges() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += e_plus[i] + e_minus[i];
    return s;
  }

  /// I_f = (number of bi-chromatic edges) / 2^n
  Rational total_influence() const { return {bichromatic_edges(), std::uint64_t{1} << n}; }
};

namespace detail {

// Bits p of a 64-bit word whose coordinate i (i < 6) is 0.
inline constexpr std::uint64_t kVarZero[6] = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
    0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL};

} // namespace detail

inline EdgeStats edge_stats(const TruthTable& tt) {
  const std::size_t n = tt.arity();
  EdgeStats st;
  st.n = n;
  st.e_plus.assign(n, 0);
  st.e_minus.assign(n, 0);
  const auto& w = tt.words();
  const std::uint64_t valid = tt.word_mask();

  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t plus = 0, minus = 0;
    if (i < 6) {
      const unsigned s = 1u << i;
      const std::uint64_t low = detail::kVarZero[i] & valid;
      for (auto x : w) {
        const std::uint64_t up = x >> s;
        plus += static_cast<std::uint64_t>(std::popcount(~x & up & low));
        minus += static_cast<std::uint64_t>(std::popcount(x & ~up & low));
      }
    } else {
      const std::size_t stride = std::size_t{1} << (i - 6);
      for (std::size_t b = 0; b < w.size(); ++b) {
        if (b & stride) continue;
        plus += static_cast<std::uint64_t>(std::popcount(~w[b] & w[b + stride]));
        minus += static_cast<std::uint64_t>(std::popcount(w[b] & ~w[b + stride]));
      }
    }
    st.e_plus[i] = plus;
    st.e_minus[i] = minus;
  }
  return st;
}

/// (1/2^n) * sum_i min(|E_i^+|, |E_i^-|)
inline Rational min_edge_stat(const EdgeStats& st) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < st.n; ++i) s += std::min(st.e_plus[i], st.e_minus[i]);
  return {s, std::uint64_t{1} << st.n};
}

inline Rational min_edge_stat(const TruthTable& tt) { return min_edge_stat(edge_stats(tt)); }

} // namespace unate
