#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "kinwall/quadrature.hpp"
#include "kinwall/special.hpp"

using namespace kinwall;

namespace {

// independent oracle: direct quadrature of (1/pi) int_0^pi exp(y cos phi) dphi
double i0_quadrature(double y, int n = 10000) {
  const double pi = 3.14159265358979323846;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phi = pi * (i + 0.5) / n;
    sum += std::exp(y * std::cos(phi));
  }
  return sum / n;
}

}  // namespace

TEST_CASE("I0 basics") {
  CHECK(bessel_i0(0.0).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bessel_i0(1.0).value ==
        doctest::Approx(i0_quadrature(1.0)).epsilon(1e-12));
  CHECK(bessel_i0(2.0).value ==
        doctest::Approx(i0_quadrature(2.0)).epsilon(1e-12));
  CHECK(bessel_i0(-2.0).value == bessel_i0(2.0).value);  // even
}

TEST_CASE("I0 relative error below 1e-10 on [0, 30]") {
  for (double y = 0.0; y <= 30.0; y += 0.37) {
    const double ref = i0_quadrature(y, 20000);
    const double got = bessel_i0(y).value;
    CHECK(std::fabs(got - ref) <= 1e-10 * ref);
  }
}

TEST_CASE("log-scaled branch matches the asymptotic expansion at y = 100") {
  const double y = 100.0;
  const double pi = 3.14159265358979323846;
  // e^y / sqrt(2 pi y) with four correction terms
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= 4; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (k * 8.0 * y);
    sum += term;
  }
  const double log_ref = y - 0.5 * std::log(2.0 * pi * y) + std::log(sum);
  const double got = bessel_i0(y).log_value;
  CHECK(std::fabs(std::exp(got - log_ref) - 1.0) < 1e-6);
}

TEST_CASE("chi-square survival function") {
  // known tail points
  CHECK(chi2_sf(0.0, 5) == doctest::Approx(1.0));
  CHECK(chi2_sf(4.351, 10) == doctest::Approx(0.93).epsilon(0.01));
  CHECK(chi2_sf(18.307, 10) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi2_sf(23.209, 10) == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto f = [](double x) { return 3.0 * x * x + x - 2.0; };
  CHECK(integrate_gl(f, -1.0, 2.0, 8) ==
        doctest::Approx(9.0 + 1.5 - 6.0).epsilon(1e-13));
  const auto g = [](double x) { return std::exp(-x * x); };
  const auto r = integrate_adaptive(g, -8.0, 8.0, 1e-12);
  CHECK(r.value == doctest::Approx(std::sqrt(3.14159265358979323846))
                       .epsilon(1e-11));
}
