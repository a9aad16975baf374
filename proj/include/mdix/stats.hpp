#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mdix::stats {

inline double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample standard deviation (n-1 denominator).
inline double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Pearson correlation; nullopt when either series has zero variance.
inline std::optional<double> pearson(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson: series must have equal length >= 2");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Standard normal quantile (Acklam's rational approximation, |rel err| < 1.2e-9).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

struct Standardized {
  std::vector<double> values;
  double center = 0.0;
  double scale = 0.0;
  bool degenerate = false;  // zero spread in the raw samples
};

/// Centers and scales by the sample mean/sd; zero-spread input is flagged
/// and mapped to all zeros.
inline Standardized standardize(const std::vector<double>& raw) {
  Standardized out;
  out.center = mean(raw);
  out.scale = raw.size() > 1 ? sample_sd(raw) : 0.0;
  out.values.resize(raw.size());
  if (out.scale <= 0.0) {
    out.degenerate = true;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    return out;
  }
  for (size_t i = 0; i < raw.size(); ++i) {
    out.values[i] = (raw[i] - out.center) / out.scale;
  }
  return out;
}

/// (theoretical, sample) quantile pairs: sorted values against
/// Φ⁻¹((i+0.5)/n).
inline std::vector<std::pair<double, double>> qq_pairs(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("qq_pairs: empty input");
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out(values.size());
  const double n = static_cast<double>(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    out[i] = {normal_quantile((static_cast<double>(i) + 0.5) / n), values[i]};
  }
  return out;
}

/// Correlation between sample quantiles and standard normal quantiles.
inline double qq_correlation(const std::vector<double>& values) {
  const auto pairs = qq_pairs(values);
  std::vector<double> theo(pairs.size()), samp(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    theo[i] = pairs[i].first;
    samp[i] = pairs[i].second;
  }
  const auto rho = pearson(theo, samp);
  if (!rho) throw std::invalid_argument("qq_correlation: zero-variance sample");
  return *rho;
}

}  // namespace mdix::stats
