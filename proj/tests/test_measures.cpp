#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kinwall/field.hpp"
#include "kinwall/geometry.hpp"
#include "kinwall/quadrature.hpp"
#include "kinwall/ratefit.hpp"
#include "kinwall/rng.hpp"
#include "kinwall/stats.hpp"
#include "kinwall/weights.hpp"

using namespace kinwall;

namespace {
constexpr double kPi = 3.14159265358979323846;

GridSpec small_grid(const DomainGeometry& geom, int n_r = 6, int n_phi = 6,
                    int n_v = 8, double v_max = 6.0) {
  GridSpec g;
  g.spatial = SpatialGrid::polar(geom.bounding_radius(), n_r, n_phi);
  g.velocity = VelocityGrid(2, n_v, v_max);
  g.speed_bins = 128;
  g.speed_max = v_max * 1.8;
  return g;
}

EmpiricalField sample_field(const DomainGeometry& geom, const GridSpec& grid,
                            const WeightSpec& spec, int n, Rng& rng) {
  EmpiricalField f(grid);
  for (int i = 0; i < n; ++i) {
    const Vec x = geom.sample_interior(rng);
    const Vec v = vec2(rng.normal(), rng.normal());
    f.deposit(x, v);
    const double base = weight_base(geom, x, v, spec);
    if (std::isfinite(base)) {
      const double w = std::pow(base, spec.alpha);
      f.deposit_stats.w_alpha_sum += w;
      f.deposit_stats.w_alpha_sq_sum += w * w;
      f.deposit_stats.w_alpha_m1_sum += std::pow(base, spec.alpha - 1.0);
    } else {
      ++f.deposit_stats.low_speed;
    }
  }
  return f;
}
}  // namespace

TEST_CASE("weight values by direct substitution") {
  const auto disk = DomainGeometry::disk(1.0);
  WeightSpec spec;
  spec.alpha = 1.0;
  spec.delta = 0.1;
  spec.c4 = 0.5;
  const double w1 = weight_m_alpha(disk, vec2(0, 0), vec2(1, 0), spec);
  CHECK(w1 == doctest::Approx(std::exp(2.0) + 4.0).epsilon(1e-12));
  const double w2 = weight_m_alpha(disk, vec2(0.5, 0), vec2(1, 0), spec);
  CHECK(w2 == doctest::Approx(std::exp(2.0) + 3.5).epsilon(1e-12));
  // base decrement along the flight equals the elapsed distance
  CHECK(w1 - w2 == doctest::Approx(0.5).epsilon(1e-12));
  // v = 0 blows up
  CHECK(std::isinf(weight_base(disk, vec2(0, 0), Vec{}, spec)));
}

TEST_CASE("m_1 dominates the bracket <x,v> on random states") {
  const auto disk = DomainGeometry::disk(1.0);
  WeightSpec spec;
  spec.alpha = 1.0;
  spec.delta = 0.1;
  spec.c4 = 0.5;
  Rng rng(7, 0);
  for (int i = 0; i < 100000; ++i) {
    const Vec x = disk.sample_interior(rng);
    const Vec v = vec2(rng.normal(), rng.normal());
    if (norm(v) < 1e-9) continue;
    const double m = weight_m_alpha(disk, x, v, spec);
    const double br = bracket_xv(disk, x, v, spec.delta);
    CHECK(m >= br - 1e-12);
  }
}

TEST_CASE("weighted norm: alpha -> 0 recovers the mass, point deposits") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  WeightSpec spec;
  spec.alpha = 0.0;
  spec.delta = 0.1;
  spec.c4 = 0.5;
  Rng rng(8, 0);
  auto f = sample_field(disk, grid, spec, 20000, rng);
  CHECK(weighted_norm(f) == doctest::Approx(1.0).epsilon(1e-12));

  // single deposit at the reference state
  spec.alpha = 1.0;
  EmpiricalField g(grid);
  g.deposit(vec2(0, 0), vec2(1, 0));
  g.deposit_stats.w_alpha_sum = weight_m_alpha(disk, vec2(0, 0), vec2(1, 0), spec);
  CHECK(weighted_norm(g) ==
        doctest::Approx(std::exp(2.0) + 4.0).epsilon(1e-12));
}

TEST_CASE("weighted norm of uniform x Maxwellian against the quadrature oracle") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  WeightSpec spec;
  spec.alpha = 1.0;
  spec.delta = 0.1;
  spec.c4 = 0.5;

  // E[m_1] over uniform(disk) x M_1 reduced to (r, s, psi)
  auto inner_psi = [&](double r, double s) {
    const int npsi = 128;
    double acc = 0.0;
    for (int k = 0; k < npsi; ++k) {
      const double psi = 2.0 * kPi * (k + 0.5) / npsi;
      acc += weight_m_alpha(disk, vec2(r, 0),
                            vec2(s * std::cos(psi), s * std::sin(psi)), spec);
    }
    return acc / npsi;
  };
  auto inner_s = [&](double r) {
    return integrate_adaptive(
               [&](double s) {
                 return s * std::exp(-0.5 * s * s) * inner_psi(r, s);
               },
               1e-6, 9.0, 1e-9, 8, 16, 5)
        .value;
  };
  const double oracle =
      integrate_adaptive([&](double r) { return 2.0 * r * inner_s(r); }, 0.0,
                         1.0, 1e-8, 8, 16, 4)
          .value;

  Rng rng(9, 0);
  const int n = 200000;
  auto f = sample_field(disk, grid, spec, n, rng);
  const double est = weighted_norm(f);
  const double se = weighted_norm_std_error(f);
  CHECK(se > 0.0);
  CHECK(std::fabs(est - oracle) < 4.0 * se);
  // the estimator error shrinks with the sample: a 100x smaller sample has
  // a ~10x larger standard error
  Rng rng2(10, 1);
  auto small = sample_field(disk, grid, spec, n / 100, rng2);
  CHECK(weighted_norm_std_error(small) > 3.0 * se);
}

TEST_CASE("binned L1 distance") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  WeightSpec spec;
  Rng rng(11, 0);
  auto a = sample_field(disk, grid, spec, 50000, rng);
  CHECK(l1_distance(a, a).value == 0.0);

  // disjoint unit point masses -> total variation 2
  EmpiricalField p(grid), q(grid);
  p.deposit(vec2(0.1, 0.0), vec2(1, 0));
  q.deposit(vec2(-0.6, 0.2), vec2(-1, 0));
  CHECK(l1_distance(p, q).value == doctest::Approx(2.0));

  // two independent samples of one law sit at the statistical floor, not 0
  Rng rng2(12, 5);
  auto b = sample_field(disk, grid, spec, 50000, rng2);
  const auto d = l1_distance(a, b);
  CHECK(d.value > d.stat_floor / 3.0);
  CHECK(d.value < 3.0 * d.stat_floor);

  // grid mismatch rejected
  const GridSpec other = small_grid(disk, 5, 6);
  EmpiricalField c(other);
  c.deposit(vec2(0, 0), vec2(1, 0));
  CHECK_THROWS_AS(l1_distance(a, c), std::invalid_argument);
}

TEST_CASE("distance symmetry and triangle inequality on random fields") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  WeightSpec spec;
  Rng r1(21, 0), r2(22, 0), r3(23, 0);
  auto a = sample_field(disk, grid, spec, 20000, r1);
  auto b = sample_field(disk, grid, spec, 30000, r2);
  EmpiricalField c(grid);
  for (int i = 0; i < 25000; ++i) {
    const Vec x = disk.sample_interior(r3);
    c.deposit(x, vec2(0.5 * r3.normal() + 1.0, 0.5 * r3.normal()));
  }
  const double ab = l1_distance(a, b).value;
  const double ba = l1_distance(b, a).value;
  const double ac = l1_distance(a, c).value;
  const double cb = l1_distance(c, b).value;
  CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
  CHECK(ab <= ac + cb + 1e-12);
}

TEST_CASE("weighted norm is monotone in alpha on supports with speed >= 1") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  Rng rng(31, 0);
  WeightSpec lo, hi;
  lo.alpha = 0.8;
  hi.alpha = 1.2;
  lo.delta = hi.delta = 0.1;
  lo.c4 = hi.c4 = 0.5;
  EmpiricalField flo(grid), fhi(grid);
  for (int i = 0; i < 20000; ++i) {
    const Vec x = disk.sample_interior(rng);
    Vec v = vec2(rng.normal(), rng.normal());
    const double s = norm(v);
    if (s < 1.0) v = (1.0 + rng.uniform(0.0, 2.0)) * (1.0 / s) * v;
    flo.deposit(x, v);
    fhi.deposit(x, v);
    flo.deposit_stats.w_alpha_sum += weight_m_alpha(disk, x, v, lo);
    fhi.deposit_stats.w_alpha_sum += weight_m_alpha(disk, x, v, hi);
  }
  CHECK(weighted_norm(fhi) >= weighted_norm(flo));
}

TEST_CASE("estimator consistency: sampling error shrinks like N^{-1/2}") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  WeightSpec spec;
  std::vector<double> ns = {4000, 40000, 400000};
  std::vector<double> dist;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    Rng ra(100 + k, 0), rb(200 + k, 1);
    auto a = sample_field(disk, grid, spec, static_cast<int>(ns[k]), ra);
    auto b = sample_field(disk, grid, spec, static_cast<int>(ns[k]), rb);
    dist.push_back(l1_distance(a, b).value);
  }
  const double slope = (std::log(dist[2]) - std::log(dist[0])) /
                       (std::log(ns[2]) - std::log(ns[0]));
  CHECK(slope < -0.35);
  CHECK(slope > -0.65);
}

TEST_CASE("mu-norm combiner") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk);
  WeightSpec spec;
  spec.alpha = 1.0;
  spec.delta = 0.1;
  spec.c4 = 0.5;
  Rng r1(41, 0), r2(42, 0);
  auto a = sample_field(disk, grid, spec, 30000, r1);
  auto b = sample_field(disk, grid, spec, 30000, r2);
  const double l1 = l1_distance(a, b).value;
  const double wl1 = weighted_l1_distance(a, b, disk, spec);
  CHECK(wl1 >= l1);  // m_alpha >= 1 on the admissible region
  CHECK(mu_norm_distance(a, b, disk, spec, 0.3) ==
        doctest::Approx(l1 + 0.3 * wl1).epsilon(1e-12));
}

TEST_CASE("rate fitting on synthetic curves") {
  std::vector<double> t, d_exp, d_poly;
  for (int i = 0; i <= 30; ++i) {
    const double ti = 0.5 * i;
    t.push_back(ti);
    d_exp.push_back(3.0 * std::exp(-0.7 * ti));
    d_poly.push_back(5.0 * std::pow(1.0 + ti, -2.0));
  }
  const auto fe = fit_rate(t, d_exp, FitMode::Exponential, 0.0, 100.0);
  CHECK(fe.rate == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(fe.amplitude == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fe.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  const auto fp = fit_rate(t, d_poly, FitMode::Polynomial, 0.0, 100.0);
  CHECK(fp.rate == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fp.amplitude == doctest::Approx(5.0).epsilon(1e-9));

  // 1% multiplicative noise: rate within 5%
  Rng rng(55, 0);
  std::vector<double> noisy;
  for (double v : d_exp) noisy.push_back(v * (1.0 + 0.01 * rng.normal()));
  const auto fn = fit_rate(t, noisy, FitMode::Exponential, 0.0, 100.0);
  CHECK(std::fabs(fn.rate - 0.7) < 0.05 * 0.7);

  // refuse with fewer than 4 usable points
  std::vector<double> t2 = {0, 1, 2}, d2 = {1.0, 0.5, 0.25};
  CHECK_THROWS_AS(fit_rate(t2, d2, FitMode::Exponential, 0.0, 10.0),
                  std::runtime_error);
  // points below the floor are excluded
  std::vector<double> floors(t.size(), 10.0);
  CHECK_THROWS_AS(
      fit_rate(t, d_exp, FitMode::Exponential, 0.0, 100.0, floors),
      std::runtime_error);
}

TEST_CASE("c4 policy") {
  CHECK(c4_for_maxwell(0.5) ==
        doctest::Approx(1.0 - std::pow(0.5, 0.25)).epsilon(1e-12));
  const double c4 = c4_for_maxwell(0.5);
  CHECK(std::fabs(std::pow(1.0 - c4, 4.0) - (1.0 - 0.5)) < 1e-12);
  CHECK(c4_for_maxwell(1.0) == 0.5);
}

TEST_CASE("speed histogram CDF and overflow accounting") {
  const auto disk = DomainGeometry::disk(1.0);
  const GridSpec grid = small_grid(disk, 6, 6, 8, 2.0);  // tight v_max
  EmpiricalField f(grid);
  f.deposit(vec2(0, 0), vec2(0.5, 0));
  f.deposit(vec2(0, 0), vec2(5.0, 0));  // overflow shell
  CHECK(f.overflow_deposits() == 1);
  CHECK(f.n_deposits() == 2);
  CHECK(f.speed_cdf(grid.speed_bins) >= 0.5);
}
