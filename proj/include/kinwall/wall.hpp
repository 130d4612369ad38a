#pragma once

#include <stdexcept>

#include "kinwall/geometry.hpp"
#include "kinwall/rng.hpp"
#include "kinwall/special.hpp"
#include "kinwall/vec.hpp"

namespace kinwall {

// Positive scalar field on the boundary (wall temperature, accommodation
// fraction). The angular variant modulates by the azimuth of the footpoint.
struct BoundaryField {
  enum class Kind { Constant, Angular };
  Kind kind = Kind::Constant;
  double base = 1.0;
  double amplitude = 0.0;
  int mode = 1;

  static BoundaryField constant(double value) {
    BoundaryField f;
    f.base = value;
    return f;
  }
  static BoundaryField angular(double base, double amplitude, int mode) {
    BoundaryField f;
    f.kind = Kind::Angular;
    f.base = base;
    f.amplitude = amplitude;
    f.mode = mode;
    return f;
  }

  double value(const Vec& x) const {
    if (kind == Kind::Constant) return base;
    const double phi = std::atan2(x[1], x[0]);
    return base * (1.0 + amplitude * std::cos(mode * phi));
  }
  double min_value() const { return base * (1.0 - std::fabs(amplitude)); }
  double max_value() const { return base * (1.0 + std::fabs(amplitude)); }
};

using TemperatureField = BoundaryField;

// Orthonormal tangent frame at a boundary point; t2 unused in 2-d.
struct TangentFrame {
  Vec n, t1, t2;
};
TangentFrame tangent_frame(const Vec& n, int dim);

struct KernelNormalization {
  double total;         // flux integral of the whole kernel
  double diffuse_part;  // Maxwell: density part alone (= beta); CL: == total
  double est_error;     // quadrature refinement estimate
};

// Reflection law at the wall: Cercignani-Lampis with normal/tangential
// accommodation, or the Maxwell diffuse/specular mixture, both at
// position-dependent temperature. Stateless; samplers take the caller's RNG.
class WallModel {
 public:
  enum class Kind { CercignaniLampis, Maxwell };

  static WallModel cercignani_lampis(double r_perp, double r_par,
                                     TemperatureField theta);
  // beta values in [0,1]; beta == 0 is a test-only specular stub
  static WallModel maxwell(BoundaryField beta, double beta0,
                           TemperatureField theta);

  Kind kind() const { return kind_; }
  double r_perp() const { return r_perp_; }
  double r_par() const { return r_par_; }
  double beta0() const { return beta0_; }
  const TemperatureField& theta() const { return theta_; }
  double beta_at(const Vec& x) const { return beta_.value(x); }
  double theta_at(const Vec& x) const { return theta_.value(x); }

  // M(x,v) = exp(-|v|^2 / 2 theta) / (theta (2 pi theta)^{(d-1)/2})
  double wall_maxwellian(const Vec& xb, const Vec& v,
                         const DomainGeometry& geom) const;

  // R(u -> v; x) for u in Sigma_+^x, v in Sigma_-^x (CL mode only)
  double cl_density(const Vec& u, const Vec& v, const Vec& xb,
                    const DomainGeometry& geom) const;

  Vec cl_sample(const Vec& u, const Vec& xb, const DomainGeometry& geom,
                Rng& rng) const;
  Vec diffuse_sample(const Vec& xb, const DomainGeometry& geom,
                     Rng& rng) const;
  Vec maxwell_sample(const Vec& u, const Vec& xb, const DomainGeometry& geom,
                     Rng& rng) const;

  // dispatch on kind(); u is the pre-collision (outgoing-trace) velocity
  Vec sample(const Vec& u, const Vec& xb, const DomainGeometry& geom,
             Rng& rng) const;

  // flux integral int R(u->v;x) |v.n| dv by adaptive product quadrature
  KernelNormalization kernel_normalization_check(
      const Vec& u, const Vec& xb, const DomainGeometry& geom) const;

 private:
  WallModel() = default;

  Kind kind_ = Kind::CercignaniLampis;
  double r_perp_ = 1.0;
  double r_par_ = 1.0;
  BoundaryField beta_ = BoundaryField::constant(1.0);
  double beta0_ = 1.0;
  TemperatureField theta_ = TemperatureField::constant(1.0);
};

}  // namespace kinwall
