#pragma once

#include <functional>
#include <limits>
#include <string>

#include "kinwall/rng.hpp"
#include "kinwall/vec.hpp"

namespace kinwall {

enum class ShapeKind { Disk2D, Ball3D, Implicit2D };

// Region classification of a phase point (x,v) with x on the boundary.
enum class BoundaryClass { Interior, Outgoing, Incoming, Grazing };

struct PhaseState {
  Vec x{};
  Vec v{};
};

// Exact ray geometry of the bounded domain: membership, outward normals,
// exit times, footpoints, specular map, diameter. Immutable after
// construction; all queries are safe to call from concurrent workers.
class DomainGeometry {
 public:
  static DomainGeometry disk(double radius);
  static DomainGeometry ball(double radius);
  // Presets: "superellipse4" is the level set x^4 + y^4 = 1.
  static DomainGeometry implicit2d(const std::string& preset);

  ShapeKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double diameter() const { return diameter_; }
  double bounding_radius() const { return bounding_radius_; }
  double volume() const { return volume_; }

  // x in the open set Omega
  bool contains(const Vec& x) const;

  // signed boundary residual, < 0 inside; zero on the boundary up to the
  // shape tolerance (1e-12 analytic, 1e-9 implicit)
  double boundary_residual(const Vec& x) const;
  double boundary_tolerance() const { return boundary_tol_; }

  // unit outward normal; rejects x farther than ~1e-9 from the boundary
  Vec outward_normal(const Vec& x) const;

  // inf{t>0 : x+tv on the boundary}; 0 on Sigma_+ and Sigma_0; +inf for v=0
  double exit_time(const Vec& x, const Vec& v) const;

  // x + exit_time(x,v) * v, re-projected onto the boundary
  Vec footpoint(const Vec& x, const Vec& v) const;

  Vec project_to_boundary(const Vec& x) const;

  static Vec specular(const Vec& v, const Vec& n) {
    return v - (2.0 * dot(v, n)) * n;
  }

  BoundaryClass classify(const PhaseState& s, double grazing_tol = 1e-10) const;

  Vec sample_interior(Rng& rng) const;

 private:
  DomainGeometry() = default;

  double implicit_exit_time(const Vec& x, const Vec& v) const;

  ShapeKind kind_ = ShapeKind::Disk2D;
  int dim_ = 2;
  double radius_ = 1.0;            // disk/ball
  double bounding_radius_ = 1.0;   // >= sup |x| over Omega
  double diameter_ = 2.0;
  double volume_ = 0.0;
  double boundary_tol_ = 1e-12;
  std::function<double(const Vec&)> level_;      // implicit only, <0 inside
  std::function<Vec(const Vec&)> level_grad_;    // implicit only
  std::string preset_;
};

inline double infinite_dwell() {
  return std::numeric_limits<double>::infinity();
}

}  // namespace kinwall
