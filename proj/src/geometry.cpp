#include "kinwall/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kinwall {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Largest |x-y| over boundary samples of a 2-d implicit shape, refined by a
// local golden-section polish on the boundary parameterization.
double implicit_diameter(const std::function<double(const Vec&)>& level,
                         double r_bound) {
  auto boundary_point = [&](double phi) {
    const Vec dir = vec2(std::cos(phi), std::sin(phi));
    double lo = 0.0, hi = r_bound * 1.5;
    // level(0) < 0 for the supported presets (origin inside)
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (level(mid * dir) < 0.0 ? lo : hi) = mid;
    }
    return (0.5 * (lo + hi)) * dir;
  };
  const int n = 512;
  std::vector<Vec> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = boundary_point(2.0 * kPi * i / n);
  double best = 0.0;
  int bi = 0, bj = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = dist(pts[i], pts[j]);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  // local refinement around the best angle pair
  double pi_ = 2.0 * kPi * bi / n, pj_ = 2.0 * kPi * bj / n;
  double h = 2.0 * kPi / n;
  for (int round = 0; round < 40; ++round) {
    double cur = dist(boundary_point(pi_), boundary_point(pj_));
    for (const double di : {-h, 0.0, h})
      for (const double dj : {-h, 0.0, h}) {
        const double cand =
            dist(boundary_point(pi_ + di), boundary_point(pj_ + dj));
        if (cand > cur) {
          cur = cand;
          pi_ += di;
          pj_ += dj;
        }
      }
    best = std::max(best, cur);
    h *= 0.6;
  }
  return best;
}

double implicit_area(const std::function<double(const Vec&)>& level,
                     double r_bound) {
  // midpoint grid over the bounding box
  const int n = 2048;
  const double h = 2.0 * r_bound / n;
  double count = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec p = vec2(-r_bound + (i + 0.5) * h, -r_bound + (j + 0.5) * h);
      if (level(p) < 0.0) count += 1.0;
    }
  return count * h * h;
}

}  // namespace

DomainGeometry DomainGeometry::disk(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be > 0");
  DomainGeometry g;
  g.kind_ = ShapeKind::Disk2D;
  g.dim_ = 2;
  g.radius_ = radius;
  g.bounding_radius_ = radius;
  g.diameter_ = 2.0 * radius;
  g.volume_ = kPi * radius * radius;
  g.boundary_tol_ = 1e-12;
  return g;
}

DomainGeometry DomainGeometry::ball(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
  DomainGeometry g;
  g.kind_ = ShapeKind::Ball3D;
  g.dim_ = 3;
  g.radius_ = radius;
  g.bounding_radius_ = radius;
  g.diameter_ = 2.0 * radius;
  g.volume_ = 4.0 / 3.0 * kPi * radius * radius * radius;
  g.boundary_tol_ = 1e-12;
  return g;
}

DomainGeometry DomainGeometry::implicit2d(const std::string& preset) {
  DomainGeometry g;
  g.kind_ = ShapeKind::Implicit2D;
  g.dim_ = 2;
  g.boundary_tol_ = 1e-9;
  g.preset_ = preset;
  if (preset == "superellipse4") {
    g.level_ = [](const Vec& p) {
      const double x2 = p[0] * p[0], y2 = p[1] * p[1];
      return x2 * x2 + y2 * y2 - 1.0;
    };
    g.level_grad_ = [](const Vec& p) {
      return vec2(4.0 * p[0] * p[0] * p[0], 4.0 * p[1] * p[1] * p[1]);
    };
    g.bounding_radius_ = std::pow(2.0, 0.25) + 1e-9;
  } else {
    throw std::invalid_argument("unknown level-set preset: " + preset);
  }
  g.diameter_ = implicit_diameter(g.level_, g.bounding_radius_);
  g.volume_ = implicit_area(g.level_, g.bounding_radius_);
  g.radius_ = g.bounding_radius_;
  return g;
}

bool DomainGeometry::contains(const Vec& x) const {
  switch (kind_) {
    case ShapeKind::Disk2D:
    case ShapeKind::Ball3D:
      return norm2(x) < radius_ * radius_;
    case ShapeKind::Implicit2D:
      return level_(x) < 0.0;
  }
  return false;
}

double DomainGeometry::boundary_residual(const Vec& x) const {
  switch (kind_) {
    case ShapeKind::Disk2D:
    case ShapeKind::Ball3D:
      return norm(x) - radius_;
    case ShapeKind::Implicit2D:
      return level_(x);
  }
  return 0.0;
}

Vec DomainGeometry::outward_normal(const Vec& x) const {
  if (kind_ == ShapeKind::Implicit2D) {
    if (std::fabs(level_(x)) > 1e-7)
      throw std::invalid_argument("outward_normal: x not on the boundary");
    return normalized(level_grad_(x));
  }
  if (std::fabs(norm(x) - radius_) > 1e-9 * std::max(radius_, 1.0))
    throw std::invalid_argument("outward_normal: x not on the boundary");
  return normalized(x);
}

double DomainGeometry::exit_time(const Vec& x, const Vec& v) const {
  const double v2 = norm2(v);
  if (v2 == 0.0) return infinite_dwell();
  if (kind_ == ShapeKind::Implicit2D) return implicit_exit_time(x, v);
  // |x + t v|^2 = R^2
  const double b = dot(x, v);
  const double c = norm2(x) - radius_ * radius_;
  const double disc = std::max(b * b - v2 * c, 0.0);
  const double t = (-b + std::sqrt(disc)) / v2;
  return std::max(t, 0.0);
}

double DomainGeometry::implicit_exit_time(const Vec& x, const Vec& v) const {
  // bracket inside the bounding circle, scan for the first sign change,
  // bisection, then Newton polish
  const double v2 = norm2(v);
  const double b = dot(x, v);
  const double c = norm2(x) - bounding_radius_ * bounding_radius_;
  const double disc = std::max(b * b - v2 * c, 0.0);
  const double t_bound = (-b + std::sqrt(disc)) / v2;
  if (t_bound <= 0.0) return 0.0;

  auto g = [&](double t) { return level_(x + t * v); };
  const int steps = 256;
  const double h = t_bound / steps;
  double t_lo = 0.0;
  double g_lo = g(0.0);
  if (g_lo >= 0.0) {
    // starting on (or numerically outside) the boundary: outgoing rays have
    // exit time 0, inward rays re-enter within the first step
    const double gdir = dot(level_grad_(x), v);
    if (gdir >= 0.0) return 0.0;
    t_lo = std::min(1e-9 / std::sqrt(v2), 0.5 * h);
    g_lo = g(t_lo);
    if (g_lo >= 0.0) return 0.0;
  }
  double t_hi = t_bound, g_hi = g(t_bound);
  bool bracketed = g_hi >= 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double t = i * h;
    if (t <= t_lo) continue;
    const double gt = g(t);
    if (gt >= 0.0) {
      t_hi = t;
      g_hi = gt;
      bracketed = true;
      break;
    }
    t_lo = t;
    g_lo = gt;
  }
  if (!bracketed) {
    // ray exits the bounding circle while still inside: should not happen
    // for the supported star-shaped presets; fall back to the bound
    t_hi = t_bound;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (g(mid) < 0.0)
      t_lo = mid;
    else
      t_hi = mid;
  }
  double t = 0.5 * (t_lo + t_hi);
  for (int it = 0; it < 2; ++it) {
    const Vec p = x + t * v;
    const double gp = dot(level_grad_(p), v);
    if (gp != 0.0) t -= level_(p) / gp;
  }
  return std::max(t, 0.0);
}

Vec DomainGeometry::footpoint(const Vec& x, const Vec& v) const {
  const double t = exit_time(x, v);
  if (!std::isfinite(t)) throw std::invalid_argument("footpoint: v = 0");
  return project_to_boundary(x + t * v);
}

Vec DomainGeometry::project_to_boundary(const Vec& x) const {
  if (kind_ == ShapeKind::Implicit2D) {
    Vec p = x;
    for (int it = 0; it < 30; ++it) {
      const double lvl = level_(p);
      if (std::fabs(lvl) < 1e-13) break;
      const Vec grad = level_grad_(p);
      const double g2 = norm2(grad);
      if (g2 == 0.0) break;
      p = p - (lvl / g2) * grad;
    }
    return p;
  }
  const double n = norm(x);
  if (n == 0.0) return x;
  return (radius_ / n) * x;
}

BoundaryClass DomainGeometry::classify(const PhaseState& s,
                                       double grazing_tol) const {
  if (std::fabs(boundary_residual(s.x)) >
      std::max(1e-9, boundary_tol_ * 10.0))
    return BoundaryClass::Interior;
  const Vec n = outward_normal(project_to_boundary(s.x));
  const double vn = dot(s.v, n);
  const double scale = std::max(norm(s.v), 1e-300);
  if (std::fabs(vn) < grazing_tol * scale) return BoundaryClass::Grazing;
  return vn > 0.0 ? BoundaryClass::Outgoing : BoundaryClass::Incoming;
}

Vec DomainGeometry::sample_interior(Rng& rng) const {
  if (kind_ == ShapeKind::Disk2D) {
    const double r = radius_ * std::sqrt(rng.uniform(0.0, 1.0));
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    return vec2(r * std::cos(phi), r * std::sin(phi));
  }
  if (kind_ == ShapeKind::Ball3D) {
    const double r = radius_ * std::cbrt(rng.uniform(0.0, 1.0));
    const double cz = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(1.0 - cz * cz, 0.0));
    return vec3(r * s * std::cos(phi), r * s * std::sin(phi), r * cz);
  }
  // rejection from the bounding box
  for (;;) {
    const Vec p = vec2(rng.uniform(-bounding_radius_, bounding_radius_),
                       rng.uniform(-bounding_radius_, bounding_radius_));
    if (contains(p)) return p;
  }
}

}  // namespace kinwall
