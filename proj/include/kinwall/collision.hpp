#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kinwall/rng.hpp"
#include "kinwall/vec.hpp"

namespace kinwall {

// Space-dependent total collision rate sigma(x) with a known upper bound.
struct RateField {
  enum class Kind { Constant, Hole, Smooth };
  Kind kind = Kind::Constant;
  double sigma_max = 1.0;
  Vec center{};
  double radius = 1.0;
  double width = 0.25;  // smooth ramp width

  static RateField constant(double sigma0) {
    RateField f;
    f.kind = Kind::Constant;
    f.sigma_max = sigma0;
    return f;
  }
  static RateField hole(double sigma_inf, const Vec& center, double radius) {
    RateField f;
    f.kind = Kind::Hole;
    f.sigma_max = sigma_inf;
    f.center = center;
    f.radius = radius;
    return f;
  }
  static RateField smooth_hole(double sigma_inf, const Vec& center,
                               double radius, double width) {
    RateField f;
    f.kind = Kind::Smooth;
    f.sigma_max = sigma_inf;
    f.center = center;
    f.radius = radius;
    f.width = width;
    return f;
  }

  double value(const Vec& x) const {
    switch (kind) {
      case Kind::Constant:
        return sigma_max;
      case Kind::Hole:
        return dist(x, center) < radius ? 0.0 : sigma_max;
      case Kind::Smooth: {
        const double t = (dist(x, center) - radius) / width;
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return sigma_max;
        return sigma_max * t * t * (3.0 - 2.0 * t);
      }
    }
    return 0.0;
  }
};

// Tabulated relaxation target f_{A,inf}(x, v) on a Cartesian spatial grid
// times a Cartesian velocity grid. The per-cell mass is the normalizer
// sigma(x); values are read-only shared data.
struct RelaxationTable {
  int dim = 2;
  int n_space = 1;    // cells per spatial axis over [-r_bound, r_bound]^d
  int n_vel = 16;     // cells per velocity axis over [-v_max, v_max]^d
  double r_bound = 1.0;
  double v_max = 6.0;
  std::vector<double> values;  // [spatial][velocity], nonnegative
  std::vector<double> cell_mass;       // sigma per spatial cell
  std::vector<std::vector<double>> cdf;  // per spatial cell

  int spatial_cells() const;
  int velocity_cells() const;
  int spatial_cell_of(const Vec& x) const;  // -1 if outside the box
  Vec velocity_center(int vc) const;
  double velocity_cell_volume() const;
  void finalize();  // builds cell_mass and cdf

  static RelaxationTable load_csv(const std::string& path);
  void write_csv(const std::string& path) const;
};

struct CollisionEvent {
  double time;
  Vec position;
};

// Collision mechanism: rate field + post-collision velocity law.
class CollisionModel {
 public:
  enum class Kind { Bgk, Annulus, Relaxation };

  static CollisionModel bgk(RateField rate);
  static CollisionModel annulus(RateField rate, double a, double b);
  static CollisionModel relaxation(std::shared_ptr<RelaxationTable> table);

  Kind kind() const { return kind_; }
  double sigma(const Vec& x) const;
  double sigma_max() const { return sigma_max_; }
  double k_inf() const { return k_inf_; }
  double annulus_a() const { return a_; }
  double annulus_b() const { return b_; }

  // accepted jump time along the ray x + t v with survival law
  // exp(-int_0^t sigma(x+sv) ds), none if no acceptance before `horizon`
  std::optional<CollisionEvent> next_collision(const Vec& x, const Vec& v,
                                               double horizon, Rng& rng) const;

  // draw v' from k(x, v, .)/sigma(x); requires sigma(x) > 0
  Vec gain_sample(const Vec& x, const Vec& v, int dim, Rng& rng) const;

  // sup_x sigma(x) * int law(v') |v'|^{2 delta_k} dv' (the certified moment
  // bound); throws if the tail diverges
  double moment_bound_check(double delta_k, int dim) const;

  // computes and stores the moment bound; the config factory calls this so
  // every loaded model carries a certified value
  double certify_moment_bound(double delta_k, int dim) {
    certified_moment_bound_ = moment_bound_check(delta_k, dim);
    certified_delta_k_ = delta_k;
    return certified_moment_bound_;
  }
  double certified_moment_bound() const { return certified_moment_bound_; }
  double certified_delta_k() const { return certified_delta_k_; }

  // exact path integral int_0^t sigma(x+sv) ds for Constant and Hole fields
  double path_integral(const Vec& x, const Vec& v, double t) const;

  const RateField& rate() const { return rate_; }

 private:
  CollisionModel() = default;

  Kind kind_ = Kind::Bgk;
  RateField rate_;
  double a_ = 1.0, b_ = 2.0;  // annulus bounds
  std::shared_ptr<RelaxationTable> table_;
  double sigma_max_ = 1.0;
  double k_inf_ = 0.0;
  double certified_moment_bound_ = 0.0;
  double certified_delta_k_ = 0.0;
};

}  // namespace kinwall
