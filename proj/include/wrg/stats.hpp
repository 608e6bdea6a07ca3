#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"

namespace wrg::stats {

inline constexpr double kZ95 = 1.959963984540054;

/// Quantile with linear interpolation between order statistics (the usual
/// "type 7" definition: q = 0.5 is the median).
inline double quantile(std::vector<double> x, double q) {
  require(!x.empty(), Errc::invalid_parameters, "quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double h = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double median(std::span<const double> x) { return quantile({x.begin(), x.end()}, 0.5); }

inline double mean(std::span<const double> x) {
  require(!x.empty(), Errc::invalid_parameters, "mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator); zero for a single value.
inline double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Normal-approximation half-width of the confidence interval for the mean.
inline double ci_half_width(std::span<const double> x, double z = kZ95) {
  if (x.size() < 2) return 0.0;
  return z * stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

struct Summary {
  std::size_t count = 0;
  double mean = 0.0, sd = 0.0, ci_half_width = 0.0;
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double min = 0.0, max = 0.0;
};

inline Summary summarize(std::span<const double> x) {
  Summary s;
  s.count = x.size();
  if (x.empty()) return s;
  std::vector<double> v(x.begin(), x.end());
  s.mean = mean(v);
  s.sd = stddev(v);
  s.ci_half_width = ci_half_width(v);
  s.q1 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf&& cdf) {
  require(!x.empty(), Errc::invalid_parameters, "KS statistic of an empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), Errc::invalid_parameters, "KS statistic of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace wrg::stats
