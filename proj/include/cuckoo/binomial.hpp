#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "cuckoo/params.hpp"

namespace cuckoo {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_binomial_pmf(std::uint64_t n, double p, std::uint64_t i) {
  if (i > n) return kNegInf;
  if (p <= 0.0) return i == 0 ? 0.0 : kNegInf;
  if (p >= 1.0) return i == n ? 0.0 : kNegInf;
  const auto nd = static_cast<double>(n);
  const auto id = static_cast<double>(i);
  return std::lgamma(nd + 1.0) - std::lgamma(id + 1.0) - std::lgamma(nd - id + 1.0) +
         id * std::log(p) + (nd - id) * std::log1p(-p);
}

inline double log_binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k);

/// log P(Bin(n, p) <= k). Sums directly when k is below the mean (terms
/// shrink geometrically walking down), otherwise goes through the small
/// complementary tail so the loop always runs on the thin side.
inline double log_binomial_lower_tail(std::uint64_t n, double p, std::uint64_t k) {
  if (k >= n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return kNegInf;  // k < n
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) >= mean) {
    const double upper = log_binomial_upper_tail(n, p, k + 1);
    return std::log1p(-std::exp(upper));
  }
  const double logp = std::log(p);
  const double log1mp = std::log1p(-p);
  const double t0 = log_binomial_pmf(n, p, k);
  if (t0 == kNegInf) return kNegInf;
  double t = t0;
  double sum = 1.0, comp = 0.0;
  for (std::uint64_t i = k; i > 0; --i) {
    const double logr = std::log(static_cast<double>(i)) -
                        std::log(static_cast<double>(n - i + 1)) - logp + log1mp;
    t += logr;
    const double term = std::exp(t - t0);
    const double y = term - comp;
    const double s2 = sum + y;
    comp = (s2 - sum) - y;
    sum = s2;
    if (term < sum * 1e-22 && logr < -1e-4) break;
  }
  return t0 + std::log(sum);
}

/// log P(Bin(n, p) >= k), same strategy as the lower tail.
inline double log_binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k) {
  if (k == 0) return 0.0;
  if (k > n) return kNegInf;
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return 0.0;
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) <= mean) {
    const double lower = log_binomial_lower_tail(n, p, k - 1);
    return std::log1p(-std::exp(lower));
  }
  const double logp = std::log(p);
  const double log1mp = std::log1p(-p);
  const double t0 = log_binomial_pmf(n, p, k);
  if (t0 == kNegInf) return kNegInf;
  double t = t0;
  double sum = 1.0, comp = 0.0;
  for (std::uint64_t i = k; i < n; ++i) {
    const double logr = std::log(static_cast<double>(n - i)) -
                        std::log(static_cast<double>(i + 1)) + logp - log1mp;
    t += logr;
    const double term = std::exp(t - t0);
    const double y = term - comp;
    const double s2 = sum + y;
    comp = (s2 - sum) - y;
    sum = s2;
    if (term < sum * 1e-22 && logr < -1e-4) break;
  }
  return t0 + std::log(sum);
}

inline double binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k) {
  return std::exp(log_binomial_upper_tail(n, p, k));
}

inline double binomial_lower_tail(std::uint64_t n, double p, std::uint64_t k) {
  return std::exp(log_binomial_lower_tail(n, p, k));
}

/// Exact P(Bin(n, a/b) >= k) as a rational number. Meant for small n where
/// it cross-checks the floating-point tails digit for digit.
inline boost::multiprecision::cpp_rational exact_binomial_upper_tail(
    unsigned n, std::uint64_t a, std::uint64_t b, unsigned k) {
  namespace mp = boost::multiprecision;
  if (b == 0 || a > b) throw std::invalid_argument("probability must be a/b with a <= b");
  if (k > n) return 0;
  const mp::cpp_int A = a;
  const mp::cpp_int C = mp::cpp_int(b) - a;
  mp::cpp_int num = 0;
  mp::cpp_int choose = 1;  // C(n, i), updated incrementally
  for (unsigned i = 0; i <= n; ++i) {
    if (i >= k) num += choose * mp::pow(A, i) * mp::pow(C, n - i);
    choose = choose * (n - i) / (i + 1);
  }
  return {num, mp::pow(mp::cpp_int(b), n)};
}

/// An item both of whose bucket choices land on the same bucket v is pinned
/// there: it can only live in v or the stash. A bucket is overcommitted
/// when more than d + s items are pinned to it, which forces a failure no
/// matter what the rest of the graph does. Per-bucket pin probability is
/// 1/m^2; this is P(Bin(n, 1/m^2) >= d+s+1) for one fixed bucket.
inline double log_pinned_overload_probability(std::uint64_t n, std::uint64_t m,
                                              std::uint32_t d, std::uint32_t s) {
  if (m == 0) throw std::invalid_argument("bucket count must be positive");
  const auto md = static_cast<double>(m);
  return log_binomial_upper_tail(n, 1.0 / (md * md),
                                 static_cast<std::uint64_t>(d) + s + 1);
}

inline double pinned_overload_probability(std::uint64_t n, std::uint64_t m,
                                          std::uint32_t d, std::uint32_t s) {
  return std::exp(log_pinned_overload_probability(n, m, d, s));
}

inline double log_pinned_overload_probability(const Params& p) {
  return log_pinned_overload_probability(p.n, p.m, p.d, p.s);
}

inline double pinned_overload_probability(const Params& p) {
  return pinned_overload_probability(p.n, p.m, p.d, p.s);
}

/// Expected number of overcommitted buckets; a lower-bound proxy for the
/// failure probability when it is small.
inline double expected_overloaded_buckets(const Params& p) {
  return static_cast<double>(p.m) * pinned_overload_probability(p);
}

}  // namespace cuckoo
