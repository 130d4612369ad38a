#include "kinwall/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kinwall {

BesselI0 bessel_i0(double y) {
  const double z = std::fabs(y);  // I0 is even
  if (z <= 30.0) {
    // sum_k (z^2/4)^k / (k!)^2
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return {sum, std::log(sum)};
  }
  // I0(z) ~ e^z / sqrt(2 pi z) * sum_k prod_{j<=k}(2j-1)^2 / (k! (8z)^k)
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (static_cast<double>(k) * 8.0 * z);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  const double log_v =
      z - 0.5 * std::log(2.0 * 3.14159265358979323846 * z) + std::log(sum);
  const double v = (log_v < 709.0) ? std::exp(log_v)
                                   : std::numeric_limits<double>::infinity();
  return {v, log_v};
}

namespace {

// Series representation of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double stat, int dof) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

}  // namespace kinwall
