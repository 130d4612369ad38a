#pragma once

#include <array>
#include <cmath>

namespace kinwall {

// Fixed-capacity vector for d in {2,3}. The third component stays zero in 2-d
// runs, so dot/norm can run over all three slots unconditionally.
using Vec = std::array<double, 3>;

inline constexpr Vec vec2(double x, double y) { return Vec{x, y, 0.0}; }
inline constexpr Vec vec3(double x, double y, double z) { return Vec{x, y, z}; }

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
  return Vec{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec operator-(const Vec& a, const Vec& b) {
  return Vec{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec operator*(double s, const Vec& a) {
  return Vec{s * a[0], s * a[1], s * a[2]};
}

inline Vec operator-(const Vec& a) { return Vec{-a[0], -a[1], -a[2]}; }

inline Vec& operator+=(Vec& a, const Vec& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}

inline Vec normalized(const Vec& a) {
  const double n = norm(a);
  return Vec{a[0] / n, a[1] / n, a[2] / n};
}

inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

}  // namespace kinwall
