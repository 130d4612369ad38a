#include "kinwall/ratefit.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kinwall {

RateFit fit_rate(std::span<const double> times,
                 std::span<const double> distances, FitMode mode, double t_lo,
                 double t_hi, std::span<const double> floors) {
  if (times.size() != distances.size())
    throw std::invalid_argument("fit_rate: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i], d = distances[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(d > 0.0)) continue;
    if (!floors.empty() && d <= floors[i]) continue;
    xs.push_back(mode == FitMode::Exponential ? t : std::log1p(t));
    ys.push_back(std::log(d));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 4) throw std::runtime_error("fit_rate: fewer than 4 usable points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::runtime_error("fit_rate: degenerate abscissae");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (int i = 0; i < n; ++i) {
    const double pred = intercept + slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
  }
  RateFit fit;
  fit.mode = mode;
  fit.amplitude = std::exp(intercept);
  fit.rate = -slope;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points_used = n;
  return fit;
}

}  // namespace kinwall
