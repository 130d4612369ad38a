#pragma once

#include <span>

namespace kinwall {

enum class FitMode { Exponential, Polynomial };

// amplitude * exp(-rate * t)  or  amplitude * (1+t)^{-rate}
struct RateFit {
  FitMode mode;
  double amplitude;
  double rate;
  double r_squared;
  int points_used;
};

// Least squares on log distance vs t (exponential) or vs log(1+t)
// (polynomial) over the window [t_lo, t_hi]. Points at or below their
// statistical floor are excluded; fewer than 4 usable points is refused.
RateFit fit_rate(std::span<const double> times,
                 std::span<const double> distances, FitMode mode, double t_lo,
                 double t_hi, std::span<const double> floors = {});

}  // namespace kinwall
