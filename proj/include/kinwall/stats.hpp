#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kinwall/special.hpp"

namespace kinwall {

struct Chi2Result {
  double stat;
  int dof;
  double p_value;
};

// two-sample chi-square on a shared binning
inline Chi2Result chi2_two_sample(std::span<const std::uint64_t> a,
                                  std::span<const std::uint64_t> b) {
  double n1 = 0, n2 = 0;
  for (auto v : a) n1 += static_cast<double>(v);
  for (auto v : b) n2 += static_cast<double>(v);
  double stat = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tot = static_cast<double>(a[i]) + static_cast<double>(b[i]);
    if (tot == 0.0) continue;
    const double diff =
        std::sqrt(n2 / n1) * a[i] - std::sqrt(n1 / n2) * b[i];
    stat += diff * diff / tot;
    ++dof;
  }
  return {stat, dof, dof > 0 ? chi2_sf(stat, dof) : 1.0};
}

// goodness of fit against expected probabilities
inline Chi2Result chi2_gof(std::span<const std::uint64_t> counts,
                           std::span<const double> probs) {
  double n = 0;
  for (auto v : counts) n += static_cast<double>(v);
  double stat = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * probs[i];
    if (e <= 0.0) continue;
    const double d = counts[i] - e;
    stat += d * d / e;
    ++dof;
  }
  return {stat, dof, dof > 0 ? chi2_sf(stat, dof) : 1.0};
}

// one-sample Kolmogorov-Smirnov distance against an analytic CDF
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::fabs(f - i / n));
    d = std::max(d, std::fabs((i + 1) / n - f));
  }
  return d;
}

// asymptotic Kolmogorov p-value (Stephens' small-sample correction)
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) *
                        std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

// two-sample KS distance
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

struct RunningMoments {
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return sum / n; }
  double variance() const {
    const double m = mean();
    return sum_sq / n - m * m;
  }
  double std_error() const { return std::sqrt(variance() / n); }
};

}  // namespace kinwall
