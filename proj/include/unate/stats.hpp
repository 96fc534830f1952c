#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

namespace unate {

/// Non-negative exact fraction, kept reduced.
class Rational {
public:
  Rational() = default;
  Rational(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    if (den_ == 0) den_ = 1;
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<unsigned __int128>(a.num_) * b.den_ <
           static_cast<unsigned __int128>(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

struct Interval {
  double low = 0;
  double high = 0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// A sampled quantity: point value, standard error, and a symmetric
/// confidence radius at the stated z.
struct Estimate {
  double value = 0;
  double std_error = 0;
  double radius = 0;
  std::uint64_t samples = 0;

  double low() const { return value - radius; }
  double high() const { return value + radius; }
};

/// Proportion estimate with the normal-approximation radius (zero when the
/// sample is all successes or all failures).
inline Estimate proportion_estimate(std::uint64_t successes, std::uint64_t trials,
                                    double z = 1.96) {
  Estimate e;
  e.samples = trials;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  e.value = static_cast<double>(successes) / n;
  e.std_error = std::sqrt(e.value * (1 - e.value) / n);
  e.radius = z * e.std_error;
  return e;
}

} // namespace unate
