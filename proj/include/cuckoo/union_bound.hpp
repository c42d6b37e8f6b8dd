#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuckoo/params.hpp"

namespace cuckoo {

/// Status of the j-th term of the failure union bound. A term covers the
/// event that some set of j buckets receives at least j*d + s + 1 items
/// with both hashes inside the set, which is what a failure witness looks
/// like. For some j that event needs more items than exist (impossible,
/// contributes zero), and at exactly j*d + s + 1 == n the closed form
/// divides by zero; such terms are reported, never papered over.
enum class TermStatus { in_domain, impossible, domain_violation };

struct BoundTerm {
  std::uint64_t j = 0;
  TermStatus status = TermStatus::in_domain;
  double log_value = -std::numeric_limits<double>::infinity();
};

/// Largest bucket-set size the bound has to cover; larger sets can always
/// absorb their items.
inline std::uint64_t union_bound_j_max(const Params& p) {
  const long double q = static_cast<long double>(p.m) / (1.0L + static_cast<long double>(p.epsilon));
  auto j = static_cast<std::uint64_t>(q);
  while ((j + 1) <= static_cast<std::uint64_t>(p.m) &&
         static_cast<long double>(j + 1) <= q)
    ++j;  // guard against the cast rounding down across an exact integer
  return j < p.m ? j : p.m - 1;
}

inline BoundTerm union_bound_term_checked(const Params& p, std::uint64_t j) {
  if (j < 1 || j > union_bound_j_max(p))
    throw std::invalid_argument("union bound term index " + std::to_string(j) +
                                " outside [1, " +
                                std::to_string(union_bound_j_max(p)) + "]");
  BoundTerm term;
  term.j = j;
  const std::uint64_t t = j * p.d + p.s + 1;  // items the bucket set must attract
  if (t > p.n) {
    term.status = TermStatus::impossible;
    return term;
  }
  if (t == p.n) {
    term.status = TermStatus::domain_violation;
    term.log_value = std::numeric_limits<double>::quiet_NaN();
    return term;
  }
  const auto nd = static_cast<double>(p.n);
  const auto md = static_cast<double>(p.m);
  const auto jd = static_cast<double>(j);
  const auto td = static_cast<double>(t);
  const double log_choose = std::lgamma(md + 1.0) - std::lgamma(jd + 1.0) -
                            std::lgamma(md - jd + 1.0);
  const double log_hit = std::log(nd) + 2.0 * std::log(jd) - 2.0 * std::log(md) -
                         std::log(td);
  const double log_miss = std::log(nd) + std::log(md - jd) + std::log(md + jd) -
                          2.0 * std::log(md) - std::log(nd - td);
  term.log_value = log_choose + td * log_hit + (nd - td) * log_miss;
  return term;
}

/// log of the j-th union bound term. The closed form requires
/// n - (j*d + s + 1) > 0; outside of that this throws std::domain_error
/// (call the checked variant to classify instead of throwing).
inline double log_union_bound_term(const Params& p, std::uint64_t j) {
  const BoundTerm term = union_bound_term_checked(p, j);
  if (term.status == TermStatus::impossible)
    throw std::domain_error("union bound term out of domain at j=" +
                            std::to_string(j) + ": j*d + s + 1 > n");
  if (term.status == TermStatus::domain_violation)
    throw std::domain_error("union bound term undefined at j=" + std::to_string(j) +
                            ": j*d + s + 1 == n");
  return term.log_value;
}

inline double union_bound_term(const Params& p, std::uint64_t j) {
  return std::exp(log_union_bound_term(p, j));
}

struct UnionBoundResult {
  std::uint64_t j_max = 0;
  double raw_total = 0.0;  // straight sum of in-domain terms, may exceed 1
  double total = 0.0;      // raw_total clamped to [0, 1]
  std::uint64_t in_domain = 0;
  std::uint64_t impossible = 0;
  std::uint64_t domain_violations = 0;
  // One entry per j in [1, j_max] for ranges up to a few million terms.
  // Wider ranges keep only the evaluated window around the dominant terms;
  // the counts above always describe the full range.
  std::vector<BoundTerm> terms;
};

namespace detail {

// Kahan summation that degrades gracefully once the sum overflows.
struct GuardedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    if (!std::isfinite(sum)) return;
    if (!std::isfinite(v)) {
      sum = v;
      return;
    }
    const double y = v - comp;
    const double s2 = sum + y;
    comp = (s2 - sum) - y;
    sum = s2;
  }
};

}  // namespace detail

/// Full analytic failure-probability bound: sum of all in-domain terms.
/// Impossible terms add zero; undefined terms are counted and surfaced so a
/// caller can see the bound is incomplete rather than silently wrong.
///
/// Term statuses follow from comparing t = j*d + s + 1 against n, which is
/// monotone in j, so the range [1, j_max] always splits into in-domain
/// terms, at most one undefined term, then impossible ones. For ranges too
/// wide to evaluate exhaustively the sum is taken over a window around the
/// largest term (located by scanning, then widened until the edges are 46
/// nats below the peak) plus an allowance of peak * e^-46 for every term
/// left out, which keeps the result an upper bound as long as no excluded
/// term exceeds the window edges.
inline UnionBoundResult union_bound_total(const Params& p) {
  UnionBoundResult res;
  res.j_max = union_bound_j_max(p);

  std::uint64_t last_in_domain = 0;  // in-domain j are exactly [1, this]
  std::uint64_t j_violation = 0;     // 0 = no undefined term
  if (p.n >= static_cast<std::uint64_t>(p.s) + 2) {
    const std::uint64_t lim = p.n - p.s - 1;  // t < n  <=>  j*d < lim
    last_in_domain = std::min<std::uint64_t>(res.j_max, (lim - 1) / p.d);
    if (lim % p.d == 0 && lim / p.d >= 1 && lim / p.d <= res.j_max)
      j_violation = lim / p.d;
  }
  res.in_domain = last_in_domain;
  res.domain_violations = j_violation ? 1 : 0;
  res.impossible = res.j_max - res.in_domain - res.domain_violations;

  detail::GuardedSum acc;
  constexpr std::uint64_t kDenseTermLimit = 2'000'000;
  if (res.j_max <= kDenseTermLimit) {
    res.terms.reserve(res.j_max);
    for (std::uint64_t j = 1; j <= res.j_max; ++j) {
      BoundTerm term = union_bound_term_checked(p, j);
      if (term.status == TermStatus::in_domain) acc.add(std::exp(term.log_value));
      res.terms.push_back(term);
    }
  } else if (last_in_domain > 0) {
    const auto log_term = [&](std::uint64_t j) {
      return union_bound_term_checked(p, j).log_value;
    };
    // coarse scan for the peak, then refine the step down to 1
    std::uint64_t best = 1;
    double best_log = log_term(1);
    std::uint64_t lo = 1, hi = last_in_domain;
    while (true) {
      const std::uint64_t step = std::max<std::uint64_t>(1, (hi - lo) / 2048);
      for (std::uint64_t j = lo; j <= hi; j += step) {
        const double v = log_term(j);
        if (v > best_log) {
          best_log = v;
          best = j;
        }
      }
      if (step == 1) break;
      lo = best > step ? best - step : 1;
      hi = std::min(last_in_domain, best + step);
    }
    // widen around the peak until both edges have dropped off
    constexpr double kDropoff = 46.0;  // e^-46 ~ 1e-20 relative
    std::uint64_t wlo = best, whi = best;
    while (wlo > 1 && log_term(wlo - 1) > best_log - kDropoff) --wlo;
    while (whi < last_in_domain && log_term(whi + 1) > best_log - kDropoff) ++whi;
    for (std::uint64_t j = wlo; j <= whi; ++j) {
      BoundTerm term = union_bound_term_checked(p, j);
      acc.add(std::exp(term.log_value));
      res.terms.push_back(term);
    }
    const double skipped =
        static_cast<double>(last_in_domain - (whi - wlo + 1));
    acc.add(skipped * std::exp(best_log - kDropoff));
  }

  res.raw_total = acc.sum;
  res.total = !(acc.sum > 0.0) ? 0.0 : (acc.sum > 1.0 ? 1.0 : acc.sum);
  return res;
}

}  // namespace cuckoo
