#pragma once

#include <cstdint>
#include <limits>

namespace unate {

/// Counter-based 64-bit generator.
///
/// Output k of the stream keyed by (seed, stream) is a fixed bijective mix of
/// key + (k+1)*gamma, so a (seed, stream) pair replays bit-identically on every
/// platform. Bounded draws use Lemire's multiply-shift with rejection rather
/// than std::uniform_int_distribution, whose algorithm is implementation
/// defined.
class Rng {
public:
  using result_type = std::uint64_t;

  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream),
        key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = (*this)();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool coin() { return ((*this)() >> 63) != 0; }

  /// Independent child stream; does not advance this generator.
  Rng derive(std::uint64_t child) const {
    return Rng(mix(key_ ^ 0x9e3779b97f4a7c15ULL), child);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t draws() const { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace unate
