#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cuckoo {

/// Quantile of the standard normal distribution. Acklam's rational
/// approximation polished with two Halley steps against erfc, good to full
/// double precision over (0, 1).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("inverse_normal_cdf: p must be in (0, 1)");

  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }

  constexpr double sqrt2pi = 2.506628274631000502;
  for (int i = 0; i < 2; ++i) {
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * sqrt2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for a binomial proportion. Behaves sanely at 0 and
/// n successes, unlike the normal interval.
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                      double confidence = 0.95) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: trials == 0");
  if (successes > trials)
    throw std::invalid_argument("wilson_interval: successes > trials");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::domain_error("wilson_interval: confidence must be in (0, 1)");
  const double z = inverse_normal_cdf(0.5 + confidence / 2.0);
  const double nT = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / nT;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nT;
  const double center = (ph + z2 / (2.0 * nT)) / denom;
  const double half =
      z * std::sqrt(ph * (1.0 - ph) / nT + z2 / (4.0 * nT * nT)) / denom;
  WilsonInterval w;
  w.low = center - half;
  w.high = center + half;
  if (w.low < 0.0) w.low = 0.0;
  if (w.high > 1.0) w.high = 1.0;
  return w;
}

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double weight = 1.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // from the weights read as 1/Var(y)
  std::size_t points_used = 0;
};

/// Weighted least squares line through (x, y). Weights with non-positive
/// values are skipped. Needs at least two distinct x values.
inline LineFit fit_weighted_line(const std::vector<FitPoint>& pts) {
  double W = 0.0, Wx = 0.0, Wy = 0.0;
  std::size_t used = 0;
  for (const FitPoint& p : pts) {
    if (!(p.weight > 0.0)) continue;
    W += p.weight;
    Wx += p.weight * p.x;
    Wy += p.weight * p.y;
    ++used;
  }
  if (used < 2) throw std::invalid_argument("fit_weighted_line: need at least 2 weighted points");
  const double xbar = Wx / W;
  const double ybar = Wy / W;
  double sxx = 0.0, sxy = 0.0;
  for (const FitPoint& p : pts) {
    if (!(p.weight > 0.0)) continue;
    const double dx = p.x - xbar;
    sxx += p.weight * dx * dx;
    sxy += p.weight * dx * (p.y - ybar);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_weighted_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_stderr = std::sqrt(1.0 / sxx);
  fit.points_used = used;
  return fit;
}

/// Aggregated verdict of a batch of trials, with a 95% Wilson interval.
struct FailureEstimate {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

inline FailureEstimate make_failure_estimate(std::uint64_t failures,
                                             std::uint64_t trials,
                                             double confidence = 0.95) {
  FailureEstimate est;
  est.trials = trials;
  est.failures = failures;
  est.p_hat = static_cast<double>(failures) / static_cast<double>(trials);
  const WilsonInterval wi = wilson_interval(failures, trials, confidence);
  est.ci_low = wi.low;
  est.ci_high = wi.high;
  return est;
}

struct ExponentPoint {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
};

struct ExponentFit {
  double slope = 0.0;  // exponent of p over n
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<FitPoint> points;  // (log n, log p_hat, weight) actually fitted
};

/// Fits log(p_hat) = slope * log(n) + intercept across measured points.
/// Weights are the failure counts: for rare events Var(log p_hat) is about
/// 1/failures, and this choice also makes the slope exactly invariant when
/// every p_hat is scaled by a constant. A point with zero failures has an
/// undefined log and is rejected rather than dropped; min_failures (default
/// 30) guards against fitting through wild single-digit estimates.
inline ExponentFit fit_exponent(const std::vector<ExponentPoint>& pts,
                                std::uint64_t min_failures = 30) {
  if (pts.size() < 3)
    throw std::invalid_argument("fit_exponent: need at least 3 points");
  std::vector<FitPoint> fp;
  fp.reserve(pts.size());
  for (const ExponentPoint& p : pts) {
    if (p.failures == 0)
      throw std::invalid_argument(
          "fit_exponent: point n=" + std::to_string(p.n) +
          " has zero failures; increase trials");
    if (p.failures < min_failures)
      throw std::invalid_argument(
          "fit_exponent: point n=" + std::to_string(p.n) + " has only " +
          std::to_string(p.failures) + " failures (minimum " +
          std::to_string(min_failures) + ")");
    fp.push_back({std::log(static_cast<double>(p.n)),
                  std::log(static_cast<double>(p.failures) /
                           static_cast<double>(p.trials)),
                  static_cast<double>(p.failures)});
  }
  const LineFit line = fit_weighted_line(fp);
  ExponentFit fit;
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_stderr = line.slope_stderr;
  fit.points = std::move(fp);
  return fit;
}

}  // namespace cuckoo
