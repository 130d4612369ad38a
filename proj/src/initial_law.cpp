#include "kinwall/initial_law.hpp"

#include <cmath>
#include <stdexcept>

namespace kinwall {

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec sample_ball(int dim, const Vec& center, double radius, Rng& rng) {
  if (dim == 2) {
    const double r = radius * std::sqrt(rng.uniform(0.0, 1.0));
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    return center + vec2(r * std::cos(phi), r * std::sin(phi));
  }
  const double r = radius * std::cbrt(rng.uniform(0.0, 1.0));
  const double cz = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(1.0 - cz * cz, 0.0));
  return center + vec3(r * s * std::cos(phi), r * s * std::sin(phi), r * cz);
}
}  // namespace

double unit_ball_volume(int dim) {
  return dim == 2 ? kPi : 4.0 / 3.0 * kPi;
}

PhaseState InitialLaw::sample(const DomainGeometry& geom, Rng& rng) const {
  PhaseState s;
  switch (spatial) {
    case Spatial::UniformDomain:
      s.x = geom.sample_interior(rng);
      break;
    case Spatial::UniformBall:
      s.x = sample_ball(geom.dim(), x_center, x_radius, rng);
      break;
    case Spatial::Point:
      s.x = x_center;
      break;
  }
  switch (velocity) {
    case Velocity::Maxwellian:
      for (int a = 0; a < geom.dim(); ++a) s.v[a] = rng.normal();
      break;
    case Velocity::UniformBall:
      s.v = sample_ball(geom.dim(), v_center, v_radius, rng);
      break;
    case Velocity::Point:
      s.v = v_center;
      break;
  }
  return s;
}

double InitialLaw::density(const DomainGeometry& geom, const Vec& x,
                           const Vec& v) const {
  const int d = geom.dim();
  double fx = 0.0;
  switch (spatial) {
    case Spatial::UniformDomain:
      fx = geom.contains(x) ? 1.0 / geom.volume() : 0.0;
      break;
    case Spatial::UniformBall:
      fx = dist(x, x_center) < x_radius
               ? 1.0 / (unit_ball_volume(d) * std::pow(x_radius, d))
               : 0.0;
      break;
    case Spatial::Point:
      throw std::logic_error("density of a point spatial law");
  }
  double fv = 0.0;
  switch (velocity) {
    case Velocity::Maxwellian:
      fv = std::exp(-0.5 * norm2(v)) / std::pow(2.0 * kPi, 0.5 * d);
      break;
    case Velocity::UniformBall:
      fv = dist(v, v_center) < v_radius
               ? 1.0 / (unit_ball_volume(d) * std::pow(v_radius, d))
               : 0.0;
      break;
    case Velocity::Point:
      throw std::logic_error("density of a point velocity law");
  }
  return fx * fv;
}

}  // namespace kinwall
