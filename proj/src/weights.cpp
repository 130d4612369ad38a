#include "kinwall/weights.hpp"

#include <cmath>
#include <limits>

namespace kinwall {

namespace {
const double kE2 = std::exp(2.0);
}

double c4_for_maxwell(double beta0) {
  if (beta0 >= 1.0) return 0.5;
  return 1.0 - std::pow(1.0 - beta0, 0.25);
}

double weight_base(const DomainGeometry& geom, const Vec& x, const Vec& v,
                   const WeightSpec& spec) {
  const double speed = norm(v);
  if (speed < spec.low_speed_floor)
    return std::numeric_limits<double>::infinity();
  const double tau_back = geom.exit_time(x, -v);
  return kE2 + geom.diameter() / (speed * spec.c4) - tau_back +
         std::pow(speed, 2.0 * spec.delta);
}

double weight_m_alpha(const DomainGeometry& geom, const Vec& x, const Vec& v,
                      const WeightSpec& spec) {
  return std::pow(weight_base(geom, x, v, spec), spec.alpha);
}

double weight_m(const DomainGeometry& geom, const Vec& x, const Vec& v,
                const WeightSpec& spec, double alpha) {
  return std::pow(weight_base(geom, x, v, spec), alpha);
}

double bracket_xv(const DomainGeometry& geom, const Vec& x, const Vec& v,
                  double delta) {
  const double speed = norm(v);
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + geom.exit_time(x, v) + std::pow(speed, 2.0 * delta);
}

}  // namespace kinwall
