#include "kinwall/wall.hpp"

#include <cmath>

#include "kinwall/quadrature.hpp"

namespace kinwall {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

TangentFrame tangent_frame(const Vec& n, int dim) {
  TangentFrame f;
  f.n = n;
  if (dim == 2) {
    f.t1 = vec2(-n[1], n[0]);
    f.t2 = Vec{0.0, 0.0, 0.0};
    return f;
  }
  // pick the axis least aligned with n
  int k = 0;
  if (std::fabs(n[1]) < std::fabs(n[k])) k = 1;
  if (std::fabs(n[2]) < std::fabs(n[k])) k = 2;
  Vec e{0.0, 0.0, 0.0};
  e[k] = 1.0;
  f.t1 = normalized(e - dot(e, n) * n);
  f.t2 = Vec{n[1] * f.t1[2] - n[2] * f.t1[1], n[2] * f.t1[0] - n[0] * f.t1[2],
             n[0] * f.t1[1] - n[1] * f.t1[0]};
  return f;
}

WallModel WallModel::cercignani_lampis(double r_perp, double r_par,
                                       TemperatureField theta) {
  if (!(r_perp > 0.0 && r_perp <= 1.0))
    throw std::invalid_argument("r_perp must lie in (0,1]");
  if (!(r_par > 0.0 && r_par < 2.0))
    throw std::invalid_argument("r_par must lie in (0,2)");
  if (!(theta.min_value() > 0.0))
    throw std::invalid_argument("wall temperature must stay positive");
  WallModel w;
  w.kind_ = Kind::CercignaniLampis;
  w.r_perp_ = r_perp;
  w.r_par_ = r_par;
  w.theta_ = theta;
  return w;
}

WallModel WallModel::maxwell(BoundaryField beta, double beta0,
                             TemperatureField theta) {
  if (beta.min_value() < 0.0 || beta.max_value() > 1.0)
    throw std::invalid_argument("beta must take values in [0,1]");
  if (beta0 > beta.min_value() + 1e-15)
    throw std::invalid_argument("beta0 must be <= inf beta");
  if (!(theta.min_value() > 0.0))
    throw std::invalid_argument("wall temperature must stay positive");
  WallModel w;
  w.kind_ = Kind::Maxwell;
  w.beta_ = beta;
  w.beta0_ = beta0;
  w.theta_ = theta;
  return w;
}

double WallModel::wall_maxwellian(const Vec& xb, const Vec& v,
                                  const DomainGeometry& geom) const {
  const double th = theta_.value(xb);
  const int d = geom.dim();
  const double pref =
      1.0 / (th * std::pow(kTwoPi * th, 0.5 * (d - 1)));
  return pref * std::exp(-norm2(v) / (2.0 * th));
}

double WallModel::cl_density(const Vec& u, const Vec& v, const Vec& xb,
                             const DomainGeometry& geom) const {
  if (kind_ != Kind::CercignaniLampis)
    throw std::logic_error("cl_density on a Maxwell wall model");
  const int d = geom.dim();
  const double th = theta_.value(xb);
  const Vec n = geom.outward_normal(xb);
  const double un = dot(u, n);
  const double vn = dot(v, n);
  const Vec u_par = u - un * n;
  const Vec v_par = v - vn * n;
  const double s = std::fabs(vn);
  const double up = std::fabs(un);

  const double tr = th * r_perp_;
  const double tpar = th * r_par_ * (2.0 - r_par_);
  // u_perp . v_perp = un*vn <= 0 and I0 is even
  const double i0_arg = std::sqrt(1.0 - r_perp_) * up * s / tr;
  const Vec dpar = v_par - (1.0 - r_par_) * u_par;
  const double log_r = -std::log(tr) - 0.5 * (d - 1) * std::log(kTwoPi * tpar)
                       - (s * s + (1.0 - r_perp_) * up * up) / (2.0 * tr)
                       + bessel_i0(i0_arg).log_value
                       - norm2(dpar) / (2.0 * tpar);
  return std::exp(log_r);
}

Vec WallModel::cl_sample(const Vec& u, const Vec& xb,
                         const DomainGeometry& geom, Rng& rng) const {
  const int d = geom.dim();
  const double th = theta_.value(xb);
  const TangentFrame f = tangent_frame(geom.outward_normal(xb), d);
  const double un = dot(u, f.n);
  const double nu = std::sqrt(1.0 - r_perp_) * std::fabs(un);
  const double sd_perp = std::sqrt(th * r_perp_);
  // Rice-distributed normal speed, vartheta fixed to 0
  const double y1 = rng.normal(nu, sd_perp);
  const double y2 = rng.normal(0.0, sd_perp);
  const double s = std::sqrt(y1 * y1 + y2 * y2);

  const double sd_par = std::sqrt(th * r_par_ * (2.0 - r_par_));
  const double u1 = dot(u, f.t1);
  Vec v = (-s) * f.n + rng.normal((1.0 - r_par_) * u1, sd_par) * f.t1;
  if (d == 3) {
    const double u2 = dot(u, f.t2);
    v += rng.normal((1.0 - r_par_) * u2, sd_par) * f.t2;
  }
  return v;
}

Vec WallModel::diffuse_sample(const Vec& xb, const DomainGeometry& geom,
                              Rng& rng) const {
  const int d = geom.dim();
  const double th = theta_.value(xb);
  const TangentFrame f = tangent_frame(geom.outward_normal(xb), d);
  const double s = std::sqrt(2.0 * th * rng.exponential());
  const double sd = std::sqrt(th);
  Vec v = (-s) * f.n + rng.normal(0.0, sd) * f.t1;
  if (d == 3) v += rng.normal(0.0, sd) * f.t2;
  return v;
}

Vec WallModel::maxwell_sample(const Vec& u, const Vec& xb,
                              const DomainGeometry& geom, Rng& rng) const {
  if (rng.bernoulli(beta_.value(xb))) return diffuse_sample(xb, geom, rng);
  return DomainGeometry::specular(u, geom.outward_normal(xb));
}

Vec WallModel::sample(const Vec& u, const Vec& xb, const DomainGeometry& geom,
                      Rng& rng) const {
  if (kind_ == Kind::CercignaniLampis) return cl_sample(u, xb, geom, rng);
  return maxwell_sample(u, xb, geom, rng);
}

KernelNormalization WallModel::kernel_normalization_check(
    const Vec& u, const Vec& xb, const DomainGeometry& geom) const {
  const int d = geom.dim();
  const double th = theta_.value(xb);
  const TangentFrame f = tangent_frame(geom.outward_normal(xb), d);
  const double un = dot(u, f.n);

  // density part: CL kernel, or beta * M for Maxwell
  const bool cl = (kind_ == Kind::CercignaniLampis);
  const double beta_here = cl ? 1.0 : beta_.value(xb);

  // truncation at 12 thermal widths around the component means
  const double nu = cl ? std::sqrt(1.0 - r_perp_) * std::fabs(un) : 0.0;
  const double sd_perp = cl ? std::sqrt(th * r_perp_) : std::sqrt(th);
  const double s_max = nu + 12.0 * sd_perp;
  const double sd_par =
      cl ? std::sqrt(th * r_par_ * (2.0 - r_par_)) : std::sqrt(th);
  const double m1 = cl ? (1.0 - r_par_) * dot(u, f.t1) : 0.0;
  const double m2 = (cl && d == 3) ? (1.0 - r_par_) * dot(u, f.t2) : 0.0;

  auto density = [&](double s, double w1, double w2) {
    Vec v = (-s) * f.n + w1 * f.t1;
    if (d == 3) v += w2 * f.t2;
    return cl ? cl_density(u, v, xb, geom) : wall_maxwellian(xb, v, geom);
  };

  auto value_at = [&](int panels) {
    auto inner_w = [&](double s) {
      auto over_w1 = [&](double w1) {
        if (d == 2) return density(s, w1, 0.0);
        const double lo2 = m2 - 12.0 * sd_par, hi2 = m2 + 12.0 * sd_par;
        const double h2 = (hi2 - lo2) / panels;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p)
          acc += integrate_gl([&](double w2) { return density(s, w1, w2); },
                              lo2 + p * h2, lo2 + (p + 1) * h2, 16);
        return acc;
      };
      const double lo1 = m1 - 12.0 * sd_par, hi1 = m1 + 12.0 * sd_par;
      const double h1 = (hi1 - lo1) / panels;
      double acc = 0.0;
      for (int p = 0; p < panels; ++p)
        acc += integrate_gl(over_w1, lo1 + p * h1, lo1 + (p + 1) * h1, 16);
      return acc;
    };
    const double hs = s_max / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p)
      acc += integrate_gl([&](double s) { return s * inner_w(s); }, p * hs,
                          (p + 1) * hs, 16);
    return acc;
  };

  double prev = value_at(2);
  double cur = prev, diff = 0.0;
  for (int panels = 4; panels <= 32; panels *= 2) {
    cur = value_at(panels);
    diff = std::fabs(cur - prev);
    if (diff <= 1e-11 * std::max(std::fabs(cur), 1.0)) break;
    prev = cur;
  }

  KernelNormalization r;
  r.diffuse_part = beta_here * cur;
  r.total = cl ? cur : beta_here * cur + (1.0 - beta_here);
  r.est_error = diff;
  return r;
}

}  // namespace kinwall
