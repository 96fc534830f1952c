#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "unate/rng.hpp"

namespace unate {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}

/// log2 clamped below at 1, used for every polylog factor so that n <= 2
/// does not zero out or divide by zero.
inline double log2_at_least_one(double x) { return std::max(1.0, std::log2(x)); }

/// Sorted duplicate-free coordinate indices, 0-based internally.
class IndexSet {
public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> zero_based)
      : IndexSet(std::vector<std::size_t>(zero_based)) {}
  explicit IndexSet(std::vector<std::size_t> zero_based) : members_(std::move(zero_based)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  /// Builds from the 1-based indices used on every external surface.
  static IndexSet from_one_based(const std::vector<std::size_t>& one_based) {
    std::vector<std::size_t> v;
    v.reserve(one_based.size());
    for (auto i : one_based) {
      require(i >= 1, "coordinate index must be >= 1");
      v.push_back(i - 1);
    }
    return IndexSet(std::move(v));
  }

  /// {0, ..., n-1}
  static IndexSet range(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    IndexSet s;
    s.members_ = std::move(v);
    return s;
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(std::size_t i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }
  std::size_t operator[](std::size_t k) const { return members_[k]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  const std::vector<std::size_t>& members() const { return members_; }

  IndexSet with(std::size_t i) const {
    auto v = members_;
    v.push_back(i);
    return IndexSet(std::move(v));
  }
  IndexSet without(std::size_t i) const {
    IndexSet s = *this;
    auto it = std::lower_bound(s.members_.begin(), s.members_.end(), i);
    if (it != s.members_.end() && *it == i) s.members_.erase(it);
    return s;
  }

  std::vector<std::size_t> one_based() const {
    std::vector<std::size_t> v;
    v.reserve(members_.size());
    for (auto i : members_) v.push_back(i + 1);
    return v;
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  friend auto operator<=>(const IndexSet&, const IndexSet&) = default;

private:
  std::vector<std::size_t> members_;
};

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> v;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
  return IndexSet(std::move(v));
}

inline IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> v;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
  return IndexSet(std::move(v));
}

/// A vertex of {0,1}^n. Coordinate i (0-based) is bit i%64 of word i/64, so
/// for n <= 64 the whole point is the integer sum of x_i * 2^i.
class Point {
public:
  using Words = boost::container::small_vector<std::uint64_t, 4>;

  Point() = default;
  explicit Point(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Point from_index(std::size_t n, std::uint64_t index) {
    require(n >= 64 || index >> n == 0, "point index out of range for arity");
    Point p(n);
    if (n > 0) p.words_[0] = index;
    return p;
  }

  static Point ones(std::size_t n) {
    Point p(n);
    for (auto& w : p.words_) w = ~std::uint64_t{0};
    if (n % 64 != 0) p.words_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
    return p;
  }

  /// Parses "x_1 x_2 ... x_n" written as a 0/1 string.
  static Point from_bits(const std::string& bits) {
    Point p(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      require(bits[i] == '0' || bits[i] == '1', "bit string must be 0/1");
      if (bits[i] == '1') p.set(i, true);
    }
    return p;
  }

  std::size_t arity() const { return n_; }

  bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }

  void flip_in_place(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  Point flipped(std::size_t i) const {
    Point p = *this;
    p.flip_in_place(i);
    return p;
  }

  /// Point index sum x_i 2^i; only defined for n <= 64.
  std::uint64_t index() const {
    require(n_ <= 64, "point index requires n <= 64");
    return n_ == 0 ? 0 : words_[0];
  }

  std::size_t weight() const {
    std::size_t w = 0;
    for (auto x : words_) w += static_cast<std::size_t>(std::popcount(x));
    return w;
  }

  const Words& words() const { return words_; }
  Words& words() { return words_; }

  Point& operator^=(const Point& o) {
    require(o.n_ == n_, "arity mismatch");
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
  }
  friend Point operator^(Point a, const Point& b) { return a ^= b; }

  /// x_1 x_2 ... x_n
  std::string to_bits() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

  /// Lowercase hex, most significant digit first, coordinate i at bit i.
  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t nd = std::max<std::size_t>(1, (n_ + 3) / 4);
    std::string s(nd, '0');
    for (std::size_t d = 0; d < nd; ++d) {
      unsigned v = 0;
      for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t i = 4 * d + b;
        if (i < n_ && (*this)[i]) v |= 1u << b;
      }
      s[nd - 1 - d] = digits[v];
    }
    return s;
  }

  std::size_t hash() const {
    std::uint64_t h = n_;
    for (auto w : words_) h = Rng::mix(h ^ w) + 0x9e3779b97f4a7c15ULL;
    return static_cast<std::size_t>(h);
  }

  friend bool operator==(const Point& a, const Point& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

private:
  std::size_t n_ = 0;
  Words words_;
};

struct PointHash {
  std::size_t operator()(const Point& p) const { return p.hash(); }
};

inline std::size_t hamming(const Point& a, const Point& b) { return (a ^ b).weight(); }

inline IndexSet differing_coordinates(const Point& a, const Point& b) {
  require(a.arity() == b.arity(), "arity mismatch");
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (a[i] != b[i]) v.push_back(i);
  return IndexSet(std::move(v));
}

/// x^(S): x with every coordinate in S flipped.
inline Point flip(const Point& x, const IndexSet& s) {
  Point y = x;
  for (auto i : s) {
    if (i >= x.arity()) throw ContractViolation("flip: coordinate out of range");
    y.flip_in_place(i);
  }
  return y;
}

inline Point random_point(Rng& rng, std::size_t n) {
  require(n >= 1, "random_point: n must be >= 1");
  Point p(n);
  auto& w = p.words();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng();
  if (n % 64 != 0) w.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  return p;
}

/// Uniform k-subset of `ground` by partial Fisher-Yates.
inline IndexSet random_subset(Rng& rng, const IndexSet& ground, std::size_t k) {
  require(k <= ground.size(), "random_subset: k exceeds ground set size");
  std::vector<std::size_t> pool = ground.members();
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t b = a + static_cast<std::size_t>(rng.below(pool.size() - a));
    std::swap(pool[a], pool[b]);
  }
  pool.resize(k);
  return IndexSet(std::move(pool));
}

/// Uniform k-subset of {0..n-1}.
inline IndexSet random_subset(Rng& rng, std::size_t n, std::size_t k) {
  return random_subset(rng, IndexSet::range(n), k);
}

/// Histogram over |S cap T| for independent uniform k- and l-subsets of [n];
/// entry c counts trials with intersection size c.
inline std::vector<std::uint64_t> overlap_sample(Rng& rng, std::size_t n, std::size_t k,
                                                 std::size_t l, std::size_t trials) {
  require(k <= n && l <= n, "overlap_sample: k and l must be <= n");
  require(trials >= 1, "overlap_sample: trials must be >= 1");
  std::vector<std::uint64_t> hist(std::min(k, l) + 1, 0);
  const IndexSet all = IndexSet::range(n);
  std::vector<char> in_s(n);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const IndexSet s = random_subset(rng, all, k);
    const IndexSet t = random_subset(rng, all, l);
    std::fill(in_s.begin(), in_s.end(), 0);
    for (auto i : s) in_s[i] = 1;
    std::size_t c = 0;
    for (auto i : t) c += static_cast<std::size_t>(in_s[i]);
    ++hist[c];
  }
  return hist;
}

} // namespace unate
