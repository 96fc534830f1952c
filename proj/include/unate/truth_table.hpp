#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "unate/hypercube.hpp"

namespace unate {

inline constexpr std::size_t kMaxTableArity = 24;

/// Explicit 2^n-bit table; bit p holds f at the point with index p.
class TruthTable {
public:
  TruthTable() : TruthTable(0) {}
  explicit TruthTable(std::size_t n) : n_(n) {
    if (n > kMaxTableArity) throw ContractViolation("truth table arity above 24");
    bits_.assign(word_count(n), 0);
  }

  static std::size_t word_count(std::size_t n) {
    return n <= 6 ? 1 : (std::size_t{1} << (n - 6));
  }

  std::size_t arity() const { return n_; }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }

  bool get(std::uint64_t p) const { return (bits_[p >> 6] >> (p & 63)) & 1u; }
  bool operator()(const Point& x) const { return get(x.index()); }
  void set(std::uint64_t p, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (p & 63);
    if (v)
      bits_[p >> 6] |= m;
    else
      bits_[p >> 6] &= ~m;
  }

  std::uint64_t count_ones() const {
    std::uint64_t c = 0;
    for (auto w : bits_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  /// Mask of the valid bits in word 0 (all ones once n >= 6).
  std::uint64_t word_mask() const {
    return n_ >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (std::uint64_t{1} << n_)) - 1);
  }

  const std::vector<std::uint64_t>& words() const { return bits_; }
  std::vector<std::uint64_t>& words() { return bits_; }

  /// x -> f(x xor r)
  TruthTable shifted(std::uint64_t r) const {
    TruthTable t(n_);
    for (std::uint64_t p = 0; p < size(); ++p)
      if (get(p ^ r)) t.set(p, true);
    return t;
  }

  static TruthTable random(Rng& rng, std::size_t n) {
    TruthTable t(n);
    for (auto& w : t.bits_) w = rng();
    t.bits_[0] &= t.word_mask();
    return t;
  }

  /// Lowercase hex of the whole table, most significant digit first.
  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::uint64_t nd = hex_digits(n_);
    std::string s(nd, '0');
    for (std::uint64_t d = 0; d < nd; ++d) {
      const unsigned v = static_cast<unsigned>((bits_[(4 * d) >> 6] >> ((4 * d) & 63)) & 0xfu);
      s[nd - 1 - d] = digits[v];
    }
    return s;
  }

  static TruthTable from_hex(std::size_t n, const std::string& hex) {
    TruthTable t(n);
    const std::uint64_t nd = hex_digits(n);
    if (hex.size() != nd)
      throw std::invalid_argument("truth table: expected " + std::to_string(nd) +
                                  " hex digits, got " + std::to_string(hex.size()));
    for (std::uint64_t d = 0; d < nd; ++d) {
      const char c = hex[nd - 1 - d];
      unsigned v;
      if (c >= '0' && c <= '9')
        v = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f')
        v = static_cast<unsigned>(c - 'a' + 10);
      else
        throw std::invalid_argument("truth table: digits must be lowercase hex");
      t.bits_[(4 * d) >> 6] |= static_cast<std::uint64_t>(v) << ((4 * d) & 63);
    }
    if ((t.bits_[0] & ~t.word_mask()) != 0)
      throw std::invalid_argument("truth table: bits set beyond 2^n");
    return t;
  }

  /// File format: "n=<k>\n<hex>\n".
  void write(std::ostream& os) const { os << "n=" << n_ << '\n' << to_hex() << '\n'; }

  static TruthTable read(std::istream& is) {
    std::string header, body;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0)
      throw std::invalid_argument("truth table: first line must be n=<k>");
    std::size_t n;
    try {
      std::size_t used = 0;
      n = std::stoul(header.substr(2), &used);
      if (used != header.size() - 2) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("truth table: malformed arity line '" + header + "'");
    }
    if (n > kMaxTableArity) throw std::invalid_argument("truth table: arity above 24");
    if (!std::getline(is, body)) throw std::invalid_argument("truth table: missing bits line");
    if (!body.empty() && body.back() == '\r') body.pop_back();
    return from_hex(n, body);
  }

  static TruthTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("truth table: cannot open " + path);
    return read(in);
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("truth table: cannot write " + path);
    write(out);
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

private:
  static std::uint64_t hex_digits(std::size_t n) {
    return std::max<std::uint64_t>(1, ((std::uint64_t{1} << n) + 3) / 4);
  }

  std::size_t n_;
  std::vector<std::uint64_t> bits_;
};

/// Up-closure of a few random generator points; always monotone.
inline TruthTable random_monotone_table(Rng& rng, std::size_t n) {
  TruthTable t(n);
  const std::size_t gens = 1 + static_cast<std::size_t>(rng.below(n + 1));
  std::vector<std::uint64_t> g(gens);
  for (auto& x : g) x = rng.below(t.size());
  for (std::uint64_t p = 0; p < t.size(); ++p)
    for (auto x : g)
      if ((p & x) == x) {
        t.set(p, true);
        break;
      }
  return t;
}

} // namespace unate
