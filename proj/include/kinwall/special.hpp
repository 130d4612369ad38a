#pragma once

namespace kinwall {

struct BesselI0 {
  double value;      // I0(y); +inf if e^{|y|} overflows
  double log_value;  // log I0(y), finite for all y
};

// Modified Bessel function I0 with its logarithm. Power series up to |y|=30
// (all terms positive, no cancellation), scaled asymptotic expansion beyond.
BesselI0 bessel_i0(double y);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with `dof` degrees.
double chi2_sf(double stat, int dof);

}  // namespace kinwall
