#pragma once

#include "kinwall/geometry.hpp"
#include "kinwall/rng.hpp"
#include "kinwall/vec.hpp"

namespace kinwall {

// Product initial laws: spatial part x velocity part. Normalized to unit
// mass; supports must sit inside the phase space.
struct InitialLaw {
  enum class Spatial { UniformDomain, UniformBall, Point };
  enum class Velocity { Maxwellian, UniformBall, Point };

  Spatial spatial = Spatial::UniformDomain;
  Velocity velocity = Velocity::Maxwellian;
  Vec x_center{};
  double x_radius = 0.0;
  Vec v_center{};
  double v_radius = 0.0;

  static InitialLaw uniform_maxwellian() { return InitialLaw{}; }

  // the small-ball law: uniform on eps*B(x) times uniform on eps*B(v)
  static InitialLaw f_epsilon(double eps) {
    InitialLaw law;
    law.spatial = Spatial::UniformBall;
    law.velocity = Velocity::UniformBall;
    law.x_radius = eps;
    law.v_radius = eps;
    return law;
  }

  static InitialLaw spatial_ball(const Vec& center, double radius,
                                 Velocity vel, const Vec& v_center,
                                 double v_radius) {
    InitialLaw law;
    law.spatial = Spatial::UniformBall;
    law.x_center = center;
    law.x_radius = radius;
    law.velocity = vel;
    law.v_center = v_center;
    law.v_radius = v_radius;
    return law;
  }

  static InitialLaw point_velocity(const Vec& v0) {
    InitialLaw law;
    law.velocity = Velocity::Point;
    law.v_center = v0;
    return law;
  }

  PhaseState sample(const DomainGeometry& geom, Rng& rng) const;

  bool has_density() const { return velocity != Velocity::Point; }
  // product density f(x, v); requires has_density() and a non-point spatial
  double density(const DomainGeometry& geom, const Vec& x, const Vec& v) const;
};

double unit_ball_volume(int dim);

}  // namespace kinwall
