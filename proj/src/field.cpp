#include "kinwall/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kinwall {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}
}  // namespace

SpatialGrid SpatialGrid::polar(double radius, int n_r, int n_phi) {
  SpatialGrid g;
  g.kind_ = Kind::Polar;
  g.dim_ = 2;
  g.radius_ = radius;
  g.n_r_ = n_r;
  g.n_phi_ = n_phi;
  g.n_cells_ = n_r * n_phi;
  return g;
}

SpatialGrid SpatialGrid::spherical(double radius, int n_r, int n_cos,
                                   int n_phi) {
  SpatialGrid g;
  g.kind_ = Kind::Spherical;
  g.dim_ = 3;
  g.radius_ = radius;
  g.n_r_ = n_r;
  g.n_cos_ = n_cos;
  g.n_phi_ = n_phi;
  g.n_cells_ = n_r * n_cos * n_phi;
  return g;
}

SpatialGrid SpatialGrid::cartesian(const DomainGeometry& geom, int n_axis) {
  SpatialGrid g;
  g.kind_ = Kind::Cartesian;
  g.dim_ = geom.dim();
  g.n_axis_ = n_axis;
  g.half_width_ = geom.bounding_radius();
  g.n_cells_ = ipow(n_axis, g.dim_);
  g.cart_volumes_.assign(g.n_cells_, 0.0);
  // clip cell volumes to Omega with a per-cell subgrid
  const int sub = 8;
  const double h = 2.0 * g.half_width_ / n_axis;
  const double cell_vol = std::pow(h, g.dim_);
  const int sub_count = ipow(sub, g.dim_);
  for (int c = 0; c < g.n_cells_; ++c) {
    int rem = c;
    int idx[3] = {0, 0, 0};
    for (int a = g.dim_ - 1; a >= 0; --a) {
      idx[a] = rem % n_axis;
      rem /= n_axis;
    }
    int inside = 0;
    for (int s = 0; s < sub_count; ++s) {
      int sr = s;
      Vec p{};
      for (int a = g.dim_ - 1; a >= 0; --a) {
        const int si = sr % sub;
        sr /= sub;
        p[a] = -g.half_width_ + (idx[a] + (si + 0.5) / sub) * h;
      }
      if (geom.contains(p)) ++inside;
    }
    g.cart_volumes_[c] = cell_vol * inside / sub_count;
  }
  return g;
}

int SpatialGrid::cell_of(const Vec& x) const {
  switch (kind_) {
    case Kind::Polar: {
      const double r2 = norm2(x) / (radius_ * radius_);
      if (r2 >= 1.0 + 1e-9) return -1;
      const int ir = std::min(static_cast<int>(r2 * n_r_), n_r_ - 1);
      double phi = std::atan2(x[1], x[0]);
      if (phi < 0.0) phi += kTwoPi;
      const int ip = std::min(static_cast<int>(phi / kTwoPi * n_phi_),
                              n_phi_ - 1);
      return ir * n_phi_ + ip;
    }
    case Kind::Spherical: {
      const double r3 = std::pow(norm(x) / radius_, 3.0);
      if (r3 >= 1.0 + 1e-9) return -1;
      const int ir = std::min(static_cast<int>(r3 * n_r_), n_r_ - 1);
      const double r = std::max(norm(x), 1e-300);
      const double cz = std::clamp(x[2] / r, -1.0, 1.0);
      const int ic = std::min(static_cast<int>((cz + 1.0) / 2.0 * n_cos_),
                              n_cos_ - 1);
      double phi = std::atan2(x[1], x[0]);
      if (phi < 0.0) phi += kTwoPi;
      const int ip = std::min(static_cast<int>(phi / kTwoPi * n_phi_),
                              n_phi_ - 1);
      return (ir * n_cos_ + ic) * n_phi_ + ip;
    }
    case Kind::Cartesian: {
      int cell = 0;
      for (int a = 0; a < dim_; ++a) {
        const double t = (x[a] + half_width_) / (2.0 * half_width_);
        if (t < 0.0 || t > 1.0) return -1;
        cell = cell * n_axis_ + std::min(static_cast<int>(t * n_axis_),
                                         n_axis_ - 1);
      }
      return cell;
    }
  }
  return -1;
}

Vec SpatialGrid::center(int cell) const {
  switch (kind_) {
    case Kind::Polar: {
      const int ir = cell / n_phi_, ip = cell % n_phi_;
      const double r = radius_ * std::sqrt((ir + 0.5) / n_r_);
      const double phi = kTwoPi * (ip + 0.5) / n_phi_;
      return vec2(r * std::cos(phi), r * std::sin(phi));
    }
    case Kind::Spherical: {
      const int ip = cell % n_phi_;
      const int ic = (cell / n_phi_) % n_cos_;
      const int ir = cell / (n_phi_ * n_cos_);
      const double r = radius_ * std::cbrt((ir + 0.5) / n_r_);
      const double cz = -1.0 + 2.0 * (ic + 0.5) / n_cos_;
      const double phi = kTwoPi * (ip + 0.5) / n_phi_;
      const double s = std::sqrt(std::max(1.0 - cz * cz, 0.0));
      return vec3(r * s * std::cos(phi), r * s * std::sin(phi), r * cz);
    }
    case Kind::Cartesian: {
      Vec c{};
      int rem = cell;
      const double h = 2.0 * half_width_ / n_axis_;
      for (int a = dim_ - 1; a >= 0; --a) {
        c[a] = -half_width_ + (rem % n_axis_ + 0.5) * h;
        rem /= n_axis_;
      }
      return c;
    }
  }
  return Vec{};
}

double SpatialGrid::volume(int cell) const {
  switch (kind_) {
    case Kind::Polar:
      return kPi * radius_ * radius_ / n_cells_;
    case Kind::Spherical:
      return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_ / n_cells_;
    case Kind::Cartesian:
      return cart_volumes_[cell];
  }
  return 0.0;
}

bool SpatialGrid::operator==(const SpatialGrid& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && radius_ == o.radius_ &&
         n_r_ == o.n_r_ && n_phi_ == o.n_phi_ && n_cos_ == o.n_cos_ &&
         n_axis_ == o.n_axis_ && half_width_ == o.half_width_;
}

VelocityGrid::VelocityGrid(int dim, int n_axis, double v_max)
    : dim_(dim), n_axis_(n_axis), v_max_(v_max) {
  n_cells_ = ipow(n_axis, dim) + 1;
}

int VelocityGrid::cell_of(const Vec& v) const {
  int cell = 0;
  for (int a = 0; a < dim_; ++a) {
    const double t = (v[a] + v_max_) / (2.0 * v_max_);
    if (t < 0.0 || t >= 1.0) return overflow_cell();
    cell = cell * n_axis_ + static_cast<int>(t * n_axis_);
  }
  return cell;
}

Vec VelocityGrid::center(int cell) const {
  if (cell == overflow_cell()) return Vec{};
  Vec c{};
  int rem = cell;
  const double h = 2.0 * v_max_ / n_axis_;
  for (int a = dim_ - 1; a >= 0; --a) {
    c[a] = -v_max_ + (rem % n_axis_ + 0.5) * h;
    rem /= n_axis_;
  }
  return c;
}

double VelocityGrid::volume(int cell) const {
  if (cell == overflow_cell()) return 0.0;
  return std::pow(2.0 * v_max_ / n_axis_, dim_);
}

bool VelocityGrid::operator==(const VelocityGrid& o) const {
  return dim_ == o.dim_ && n_axis_ == o.n_axis_ && v_max_ == o.v_max_;
}

EmpiricalField::EmpiricalField(const GridSpec& grid) : grid_(grid) {
  counts_.assign(grid_.n_cells(), 0);
  speed_counts_.assign(grid_.speed_bins + 1, 0);
}

void EmpiricalField::deposit(const Vec& x, const Vec& v) {
  const int cell = grid_.cell_of(x, v);
  if (cell < 0)
    throw std::logic_error("deposit outside the spatial grid coverage");
  ++counts_[cell];
  const double s = norm(v);
  int sb = static_cast<int>(s / grid_.speed_max * grid_.speed_bins);
  if (sb >= grid_.speed_bins) sb = grid_.speed_bins;  // overflow bin
  ++speed_counts_[sb];
  ++n_;
}

void EmpiricalField::merge_counts(const EmpiricalField& other) {
  if (!(grid_ == other.grid_))
    throw std::invalid_argument("merge_counts: grid mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i)
    counts_[i] += other.counts_[i];
  for (std::size_t i = 0; i < speed_counts_.size(); ++i)
    speed_counts_[i] += other.speed_counts_[i];
  n_ += other.n_;
}

std::uint64_t EmpiricalField::overflow_deposits() const {
  const int vo = grid_.velocity.overflow_cell();
  const int nv = grid_.velocity.n_cells();
  std::uint64_t total = 0;
  for (int s = 0; s < grid_.spatial.n_cells(); ++s)
    total += counts_[static_cast<std::size_t>(s) * nv + vo];
  return total;
}

double EmpiricalField::max_density() const {
  const int nv = grid_.velocity.n_cells();
  double best = 0.0;
  for (int c = 0; c < grid_.n_cells(); ++c) {
    if (counts_[c] == 0) continue;
    const int sc = c / nv, vc = c % nv;
    const double vol = grid_.spatial.volume(sc) * grid_.velocity.volume(vc);
    if (vol <= 0.0) continue;
    best = std::max(best, mass(c) / vol);
  }
  return best;
}

double EmpiricalField::speed_cdf(int edge) const {
  std::uint64_t acc = 0;
  for (int i = 0; i < edge && i < static_cast<int>(speed_counts_.size()); ++i)
    acc += speed_counts_[i];
  return static_cast<double>(acc) / static_cast<double>(n_);
}

DistanceResult l1_distance(const EmpiricalField& a, const EmpiricalField& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("l1_distance: grid mismatch");
  if (a.n_deposits() == 0 || b.n_deposits() == 0)
    throw std::invalid_argument("l1_distance: empty field");
  const double na = static_cast<double>(a.n_deposits());
  const double nb = static_cast<double>(b.n_deposits());
  const double inv = 1.0 / na + 1.0 / nb;
  double d = 0.0, floor = 0.0;
  for (int c = 0; c < a.grid().n_cells(); ++c) {
    const double pa = a.counts()[c] / na;
    const double pb = b.counts()[c] / nb;
    d += std::fabs(pa - pb);
    const double pooled = (a.counts()[c] + b.counts()[c]) / (na + nb);
    if (pooled > 0.0) floor += std::sqrt(pooled * inv);
  }
  return {d, std::sqrt(2.0 / kPi) * floor};
}

double weighted_norm(const EmpiricalField& f) {
  if (f.n_deposits() == 0) throw std::invalid_argument("weighted_norm: empty");
  return f.deposit_stats.w_alpha_sum / static_cast<double>(f.n_deposits());
}

double weighted_norm_alpha_m1(const EmpiricalField& f) {
  if (f.n_deposits() == 0) throw std::invalid_argument("weighted_norm: empty");
  return f.deposit_stats.w_alpha_m1_sum / static_cast<double>(f.n_deposits());
}

double weighted_norm_std_error(const EmpiricalField& f) {
  const double n = static_cast<double>(f.n_deposits());
  if (n < 2.0) throw std::invalid_argument("weighted_norm_std_error: empty");
  const double mean = f.deposit_stats.w_alpha_sum / n;
  const double var =
      std::max(f.deposit_stats.w_alpha_sq_sum / n - mean * mean, 0.0);
  return std::sqrt(var / n);
}

double weighted_l1_distance(const EmpiricalField& a, const EmpiricalField& b,
                            const DomainGeometry& geom,
                            const WeightSpec& spec) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("weighted_l1_distance: grid mismatch");
  const double na = static_cast<double>(a.n_deposits());
  const double nb = static_cast<double>(b.n_deposits());
  const int nv = a.grid().velocity.n_cells();
  double d = 0.0;
  for (int c = 0; c < a.grid().n_cells(); ++c) {
    const double diff = std::fabs(a.counts()[c] / na - b.counts()[c] / nb);
    if (diff == 0.0) continue;
    const int sc = c / nv, vc = c % nv;
    Vec vcen = a.grid().velocity.center(vc);
    if (vc == a.grid().velocity.overflow_cell()) {
      vcen = Vec{};
      vcen[0] = a.grid().velocity.v_max();  // edge-speed weight
    }
    d += diff * weight_m_alpha(geom, a.grid().spatial.center(sc), vcen, spec);
  }
  return d;
}

double mu_norm_distance(const EmpiricalField& a, const EmpiricalField& b,
                        const DomainGeometry& geom, const WeightSpec& spec,
                        double mu) {
  return l1_distance(a, b).value +
         mu * weighted_l1_distance(a, b, geom, spec);
}

}  // namespace kinwall
