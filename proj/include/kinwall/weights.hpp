#pragma once

#include "kinwall/geometry.hpp"
#include "kinwall/vec.hpp"

namespace kinwall {

// Parameters of the Lyapunov weight
//   m_alpha(x,v) = (e^2 + d(Omega)/(|v| c4) - tau(x,-v) + |v|^{2 delta})^alpha.
struct WeightSpec {
  double alpha = 1.0;
  double delta = 0.1;
  double c4 = 0.5;
  double low_speed_floor = 1e-8;  // deposits below this |v| go to a side tally
};

// c4 solving (1-c4)^4 = 1 - beta0; beta0 == 1 falls back to 1/2
double c4_for_maxwell(double beta0);

// weight base; +inf when |v| is below the floor
double weight_base(const DomainGeometry& geom, const Vec& x, const Vec& v,
                   const WeightSpec& spec);

double weight_m_alpha(const DomainGeometry& geom, const Vec& x, const Vec& v,
                      const WeightSpec& spec);

// same base, explicit exponent (m_{alpha-1} etc.)
double weight_m(const DomainGeometry& geom, const Vec& x, const Vec& v,
                const WeightSpec& spec, double alpha);

// <x,v> = 1 + tau(x,v) + |v|^{2 delta}
double bracket_xv(const DomainGeometry& geom, const Vec& x, const Vec& v,
                  double delta);

}  // namespace kinwall
