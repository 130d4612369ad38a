#include "kinwall/collision.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kinwall {

namespace {
constexpr double kPi = 3.14159265358979323846;

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}
}  // namespace

int RelaxationTable::spatial_cells() const { return ipow(n_space, dim); }
int RelaxationTable::velocity_cells() const { return ipow(n_vel, dim); }

int RelaxationTable::spatial_cell_of(const Vec& x) const {
  int idx = 0;
  for (int a = 0; a < dim; ++a) {
    const double t = (x[a] + r_bound) / (2.0 * r_bound);
    if (t < 0.0 || t >= 1.0) return -1;
    idx = idx * n_space + static_cast<int>(t * n_space);
  }
  return idx;
}

Vec RelaxationTable::velocity_center(int vc) const {
  Vec c{};
  const double h = 2.0 * v_max / n_vel;
  for (int a = dim - 1; a >= 0; --a) {
    const int i = vc % n_vel;
    vc /= n_vel;
    c[a] = -v_max + (i + 0.5) * h;
  }
  return c;
}

double RelaxationTable::velocity_cell_volume() const {
  return std::pow(2.0 * v_max / n_vel, dim);
}

void RelaxationTable::finalize() {
  const int sc = spatial_cells(), vc = velocity_cells();
  if (static_cast<int>(values.size()) != sc * vc)
    throw std::invalid_argument("relaxation table has wrong size");
  for (double v : values)
    if (!(v >= 0.0))
      throw std::invalid_argument("relaxation table values must be >= 0");
  const double vol = velocity_cell_volume();
  cell_mass.assign(sc, 0.0);
  cdf.assign(sc, {});
  for (int s = 0; s < sc; ++s) {
    cdf[s].resize(vc);
    double acc = 0.0;
    for (int v = 0; v < vc; ++v) {
      acc += values[s * vc + v] * vol;
      cdf[s][v] = acc;
    }
    cell_mass[s] = acc;
  }
}

RelaxationTable RelaxationTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open relaxation table: " + path);
  RelaxationTable t;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string kv;
      while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const double val = std::stod(kv.substr(eq + 1));
        if (key == "dim") t.dim = static_cast<int>(val);
        else if (key == "n_space") t.n_space = static_cast<int>(val);
        else if (key == "n_vel") t.n_vel = static_cast<int>(val);
        else if (key == "r_bound") t.r_bound = val;
        else if (key == "v_max") t.v_max = val;
      }
      have_meta = true;
      t.values.assign(
          static_cast<std::size_t>(t.spatial_cells()) * t.velocity_cells(),
          0.0);
      continue;
    }
    if (line.rfind("spatial_cell", 0) == 0) continue;  // header row
    if (!have_meta)
      throw std::runtime_error("relaxation table missing '# dim=...' line");
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    const int s = std::stoi(tok);
    std::getline(ss, tok, ',');
    const int v = std::stoi(tok);
    std::getline(ss, tok, ',');
    const double val = std::stod(tok);
    if (s < 0 || s >= t.spatial_cells() || v < 0 || v >= t.velocity_cells())
      throw std::runtime_error("relaxation table index out of range");
    t.values[static_cast<std::size_t>(s) * t.velocity_cells() + v] = val;
  }
  t.finalize();
  return t;
}

void RelaxationTable::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  out << "# dim=" << dim << " n_space=" << n_space << " n_vel=" << n_vel
      << " r_bound=" << r_bound << " v_max=" << v_max << "\n";
  out << "spatial_cell,velocity_cell,value\n";
  const int vc = velocity_cells();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    out << i / vc << "," << i % vc << "," << values[i] << "\n";
  }
}

CollisionModel CollisionModel::bgk(RateField rate) {
  CollisionModel m;
  m.kind_ = Kind::Bgk;
  m.rate_ = rate;
  m.sigma_max_ = rate.sigma_max;
  m.k_inf_ = rate.sigma_max;  // times sup M_1 < 1, bounded either way
  return m;
}

CollisionModel CollisionModel::annulus(RateField rate, double a, double b) {
  if (!(a >= 0.0 && b > a))
    throw std::invalid_argument("annulus bounds need 0 <= a < b");
  CollisionModel m;
  m.kind_ = Kind::Annulus;
  m.rate_ = rate;
  m.a_ = a;
  m.b_ = b;
  m.sigma_max_ = rate.sigma_max;
  m.k_inf_ = rate.sigma_max;
  return m;
}

CollisionModel CollisionModel::relaxation(
    std::shared_ptr<RelaxationTable> table) {
  if (!table) throw std::invalid_argument("relaxation table required");
  CollisionModel m;
  m.kind_ = Kind::Relaxation;
  m.table_ = std::move(table);
  m.sigma_max_ = 0.0;
  double vmax = 0.0;
  for (double s : m.table_->cell_mass) m.sigma_max_ = std::max(m.sigma_max_, s);
  for (double v : m.table_->values) vmax = std::max(vmax, v);
  m.k_inf_ = vmax;
  return m;
}

double CollisionModel::sigma(const Vec& x) const {
  if (kind_ == Kind::Relaxation) {
    const int c = table_->spatial_cell_of(x);
    return c < 0 ? 0.0 : table_->cell_mass[c];
  }
  return rate_.value(x);
}

std::optional<CollisionEvent> CollisionModel::next_collision(const Vec& x,
                                                             const Vec& v,
                                                             double horizon,
                                                             Rng& rng) const {
  if (sigma_max_ <= 0.0) return std::nullopt;
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / sigma_max_;
    if (t >= horizon) return std::nullopt;
    const Vec p = x + t * v;
    if (rng.uniform(0.0, 1.0) * sigma_max_ < sigma(p))
      return CollisionEvent{t, p};
  }
}

Vec CollisionModel::gain_sample(const Vec& x, const Vec& /*v*/, int dim,
                                Rng& rng) const {
  switch (kind_) {
    case Kind::Bgk: {
      Vec w{};
      for (int a = 0; a < dim; ++a) w[a] = rng.normal();
      return w;
    }
    case Kind::Annulus: {
      const double u = rng.uniform(0.0, 1.0);
      const double ad = std::pow(a_, dim), bd = std::pow(b_, dim);
      const double r = std::pow(ad + u * (bd - ad), 1.0 / dim);
      Vec dir{};
      if (dim == 2) {
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        dir = vec2(std::cos(phi), std::sin(phi));
      } else {
        const double cz = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const double s = std::sqrt(std::max(1.0 - cz * cz, 0.0));
        dir = vec3(s * std::cos(phi), s * std::sin(phi), cz);
      }
      return r * dir;
    }
    case Kind::Relaxation: {
      const int c = table_->spatial_cell_of(x);
      if (c < 0 || table_->cell_mass[c] <= 0.0)
        throw std::logic_error("gain_sample where the rate vanishes");
      const auto& cdf = table_->cdf[c];
      const double target = rng.uniform(0.0, 1.0) * table_->cell_mass[c];
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
      const int vc = static_cast<int>(it - cdf.begin());
      Vec w = table_->velocity_center(vc);
      const double h = 2.0 * table_->v_max / table_->n_vel;
      for (int a = 0; a < dim; ++a) w[a] += rng.uniform(-0.5 * h, 0.5 * h);
      return w;
    }
  }
  return Vec{};
}

double CollisionModel::moment_bound_check(double delta_k, int dim) const {
  if (!(delta_k > 0.0 && delta_k < 0.5))
    throw std::invalid_argument("delta_k must lie in (0, 1/2)");
  if (sigma_max_ <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Bgk: {
      // E|Z|^{2 delta} for a standard d-dim Gaussian
      const double m = std::pow(2.0, delta_k) *
                       std::exp(std::lgamma(0.5 * dim + delta_k) -
                                std::lgamma(0.5 * dim));
      return sigma_max_ * m;
    }
    case Kind::Annulus: {
      const double p = dim + 2.0 * delta_k;
      const double m = (std::pow(b_, p) - std::pow(a_, p)) /
                       (std::pow(b_, dim) - std::pow(a_, dim)) * dim / p;
      return sigma_max_ * m;
    }
    case Kind::Relaxation: {
      const double vol = table_->velocity_cell_volume();
      const int vc = table_->velocity_cells();
      double worst = 0.0;
      for (int s = 0; s < table_->spatial_cells(); ++s) {
        double acc = 0.0;
        for (int v = 0; v < vc; ++v) {
          const double val = table_->values[static_cast<std::size_t>(s) * vc + v];
          if (val == 0.0) continue;
          acc += val * vol *
                 std::pow(norm(table_->velocity_center(v)), 2.0 * delta_k);
        }
        worst = std::max(worst, acc);
      }
      return worst;
    }
  }
  return 0.0;
}

double CollisionModel::path_integral(const Vec& x, const Vec& v,
                                     double t) const {
  if (kind_ == Kind::Relaxation)
    throw std::logic_error("path_integral: relaxation rate is not closed-form");
  const RateField& f = rate_;
  switch (f.kind) {
    case RateField::Kind::Constant:
      return f.sigma_max * t;
    case RateField::Kind::Hole: {
      // time spent inside the hole along [x, x+tv]
      const Vec rel = x - f.center;
      const double v2 = norm2(v);
      if (v2 == 0.0)
        return f.value(x) * t;
      const double b = dot(rel, v);
      const double c = norm2(rel) - f.radius * f.radius;
      const double disc = b * b - v2 * c;
      double inside = 0.0;
      if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u1 = std::clamp((-b - sq) / v2, 0.0, t);
        const double u2 = std::clamp((-b + sq) / v2, 0.0, t);
        inside = u2 - u1;
      }
      return f.sigma_max * (t - inside);
    }
    case RateField::Kind::Smooth:
      throw std::logic_error("path_integral: smooth rate is not closed-form");
  }
  return 0.0;
}

}  // namespace kinwall
