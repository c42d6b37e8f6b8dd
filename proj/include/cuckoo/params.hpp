#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cuckoo {

/// Table geometry: n items go into m = ceil((1+epsilon)*n/d) buckets of
/// capacity d, with a stash of capacity s. Ceiling so the table never has
/// less space than the analysis assumes.
struct Params {
  std::uint64_t n = 0;
  double epsilon = 0.0;
  std::uint32_t d = 1;
  std::uint32_t s = 0;
  std::uint64_t m = 1;  // derived

  double load_capacity() const noexcept {
    return static_cast<double>(n) / (static_cast<double>(m) * d);
  }
};

inline Params derive_params(std::uint64_t n, double epsilon, std::uint32_t d, std::uint32_t s) {
  if (n < 1) throw std::invalid_argument("derive_params: n must be >= 1");
  if (d < 1) throw std::invalid_argument("derive_params: d must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("derive_params: epsilon must be > 0");

  const long double q = (1.0L + static_cast<long double>(epsilon)) * n / d;
  // snap to the nearest integer when q is within representation noise of it,
  // so e.g. (1+0.25)*100/1 lands on exactly 125
  const long double r = std::floor(q + 0.5L);
  std::uint64_t m;
  if (std::fabs(q - r) < 1e-9L * (r > 1.0L ? r : 1.0L)) {
    m = static_cast<std::uint64_t>(r);
  } else {
    m = static_cast<std::uint64_t>(std::ceil(q));
  }
  if (m < 1) m = 1;
  return Params{n, epsilon, d, s, m};
}

}  // namespace cuckoo
