#pragma once

#include <cstdint>
#include <vector>

#include "kinwall/geometry.hpp"
#include "kinwall/vec.hpp"
#include "kinwall/weights.hpp"

namespace kinwall {

// Spatial binning: polar cells on the disk, shells x angular cells on the
// ball, Cartesian cells clipped to Omega for implicit shapes.
class SpatialGrid {
 public:
  enum class Kind { Polar, Spherical, Cartesian };

  static SpatialGrid polar(double radius, int n_r, int n_phi);
  static SpatialGrid spherical(double radius, int n_r, int n_cos, int n_phi);
  static SpatialGrid cartesian(const DomainGeometry& geom, int n_axis);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int n_cells() const { return n_cells_; }
  int cell_of(const Vec& x) const;
  Vec center(int cell) const;
  double volume(int cell) const;
  double half_width() const { return half_width_; }
  int n_axis() const { return n_axis_; }

  bool operator==(const SpatialGrid& o) const;

 private:
  Kind kind_ = Kind::Polar;
  int dim_ = 2;
  double radius_ = 1.0;
  int n_r_ = 8, n_phi_ = 8, n_cos_ = 4;
  int n_axis_ = 16;
  double half_width_ = 1.0;
  int n_cells_ = 64;
  std::vector<double> cart_volumes_;  // clipped, Cartesian only
};

// Cartesian velocity cells on [-v_max, v_max]^d plus one overflow shell.
class VelocityGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(int dim, int n_axis, double v_max);

  int dim() const { return dim_; }
  int n_axis() const { return n_axis_; }
  double v_max() const { return v_max_; }
  int n_cells() const { return n_cells_; }  // includes the overflow shell
  int overflow_cell() const { return n_cells_ - 1; }
  int cell_of(const Vec& v) const;
  Vec center(int cell) const;  // overflow -> zero vector
  double volume(int cell) const;

  bool operator==(const VelocityGrid& o) const;

 private:
  int dim_ = 2;
  int n_axis_ = 16;
  double v_max_ = 6.0;
  int n_cells_ = 257;
};

struct GridSpec {
  SpatialGrid spatial;
  VelocityGrid velocity;
  int speed_bins = 512;
  double speed_max = 12.0;

  int n_cells() const { return spatial.n_cells() * velocity.n_cells(); }
  int cell_of(const Vec& x, const Vec& v) const {
    const int sc = spatial.cell_of(x);
    if (sc < 0) return -1;
    return sc * velocity.n_cells() + velocity.cell_of(v);
  }
  bool operator==(const GridSpec& o) const {
    return spatial == o.spatial && velocity == o.velocity &&
           speed_bins == o.speed_bins && speed_max == o.speed_max;
  }
};

// Per-deposit scalar accumulators that ride along with a snapshot.
struct DepositStats {
  double w_alpha_sum = 0.0;     // sum of m_alpha over deposits
  double w_alpha_sq_sum = 0.0;  // sum of m_alpha^2, for standard errors
  double w_alpha_m1_sum = 0.0;  // sum of m_{alpha-1}
  std::uint64_t low_speed = 0;  // deposits under the speed floor

  void add(const DepositStats& o) {
    w_alpha_sum += o.w_alpha_sum;
    w_alpha_sq_sum += o.w_alpha_sq_sum;
    w_alpha_m1_sum += o.w_alpha_m1_sum;
    low_speed += o.low_speed;
  }
};

// Cumulative boundary tallies from t=0 up to the snapshot time.
struct FluxStats {
  std::uint64_t hits = 0;         // all wall hits
  std::uint64_t hits_capped = 0;  // hits with |v| <= cap
  double abs_flux = 0.0;          // sum |v.n| over hits
  double abs_flux_capped = 0.0;

  void add(const FluxStats& o) {
    hits += o.hits;
    hits_capped += o.hits_capped;
    abs_flux += o.abs_flux;
    abs_flux_capped += o.abs_flux_capped;
  }
};

// Phase-space histogram of one ensemble snapshot; the discrete stand-in for
// the distribution function. Counts are integers so merges commute.
class EmpiricalField {
 public:
  EmpiricalField() = default;
  explicit EmpiricalField(const GridSpec& grid);

  void deposit(const Vec& x, const Vec& v);
  void merge_counts(const EmpiricalField& other);

  const GridSpec& grid() const { return grid_; }
  std::uint64_t n_deposits() const { return n_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  // direct access for harness self-tests (cell corruption checks)
  std::vector<std::uint32_t>& mutable_counts() { return counts_; }
  const std::vector<std::uint32_t>& speed_counts() const {
    return speed_counts_;
  }
  double mass(int cell) const {
    return static_cast<double>(counts_[cell]) / static_cast<double>(n_);
  }
  std::uint64_t overflow_deposits() const;
  double max_density() const;  // sup over cells of mass / cell phase volume

  DepositStats deposit_stats;
  FluxStats flux_stats;

  // speed-law empirical CDF evaluated at bin edge i (i in [0, speed_bins])
  double speed_cdf(int edge) const;

 private:
  GridSpec grid_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> speed_counts_;  // + overflow bin
  std::uint64_t n_ = 0;
};

struct DistanceResult {
  double value;
  double stat_floor;  // expected distance between two samples of one law
};

// Binned L1 distance between two unit-mass snapshots on identical grids.
DistanceResult l1_distance(const EmpiricalField& a, const EmpiricalField& b);

// Monte Carlo weighted norm: mean of m_alpha over deposits, times total mass.
double weighted_norm(const EmpiricalField& f);
double weighted_norm_alpha_m1(const EmpiricalField& f);
// standard error of the weighted-norm estimator
double weighted_norm_std_error(const EmpiricalField& f);

// Binned m_alpha-weighted L1 distance (cell-center weights); overflow shell
// weighted at the grid's edge speed.
double weighted_l1_distance(const EmpiricalField& a, const EmpiricalField& b,
                            const DomainGeometry& geom,
                            const WeightSpec& spec);

// ||.||_L1 + mu ||.||_{m_alpha} combiner on the binned difference.
double mu_norm_distance(const EmpiricalField& a, const EmpiricalField& b,
                        const DomainGeometry& geom, const WeightSpec& spec,
                        double mu);

}  // namespace kinwall
