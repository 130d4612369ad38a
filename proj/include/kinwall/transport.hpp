#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "kinwall/collision.hpp"
#include "kinwall/field.hpp"
#include "kinwall/geometry.hpp"
#include "kinwall/initial_law.hpp"
#include "kinwall/wall.hpp"
#include "kinwall/weights.hpp"

namespace kinwall {

struct EventCounts {
  std::uint64_t collisions = 0;
  std::uint64_t wall_hits = 0;
  std::uint64_t grazing = 0;
  std::uint64_t absorbed_wall = 0;
  std::uint64_t killed = 0;

  void add(const EventCounts& o) {
    collisions += o.collisions;
    wall_hits += o.wall_hits;
    grazing += o.grazing;
    absorbed_wall += o.absorbed_wall;
    killed += o.killed;
  }
};

// One straight free flight; opt-in debug log.
struct FlightSegment {
  Vec x0, v;
  double dt;
};

struct TransportSettings {
  bool absorbing_wall = false;    // gamma_- = 0: particle dies at the wall
  bool kill_on_collision = false; // no gain term: dies when the clock rings
  double grazing_tol = 1e-10;
  double flux_speed_cap = std::numeric_limits<double>::infinity();
};

// Event-driven particle engine: free flight raced against the earliest of
// boundary hit or accepted collision, then reflect or resample.
class ParticleTracker {
 public:
  ParticleTracker(const DomainGeometry& geom, const WallModel* wall,
                  const CollisionModel* coll, TransportSettings settings = {})
      : geom_(geom), wall_(wall), coll_(coll), settings_(settings) {}

  // advance in place from t0 to t1; false once the particle has died
  bool advance(PhaseState& state, double t0, double t1, Rng& rng,
               EventCounts& ev, FluxStats* flux = nullptr,
               std::vector<FlightSegment>* log = nullptr) const;

 private:
  const DomainGeometry& geom_;
  const WallModel* wall_;
  const CollisionModel* coll_;
  TransportSettings settings_;
};

struct EnsembleOptions {
  std::size_t n_particles = 1000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::vector<double> snapshot_times;  // sorted, nonnegative
  GridSpec grid;
  WeightSpec weights;
  TransportSettings transport;
  std::uint64_t stream_salt = 0;  // distinguishes replicas / probe bundles
  std::size_t block_size = 4096;
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<EmpiricalField> fields;
  EventCounts events;
  std::uint64_t survivors = 0;  // alive at the final snapshot
};

// Monte Carlo estimator of the semigroup: N independent particles, private
// per-worker histograms, block-ordered reduction of floating accumulators so
// the result is bit-identical for any worker count.
EnsembleResult simulate_ensemble(const DomainGeometry& geom,
                                 const WallModel* wall,
                                 const CollisionModel* coll,
                                 const InitialLaw& initial,
                                 const EnsembleOptions& opts);

// Explicit solution of the absorbing + killing problem started from an
// initial law with a density, evaluated at (t, x, v).
double killed_transport_exact(const DomainGeometry& geom,
                              const CollisionModel& coll,
                              const InitialLaw& initial, double t,
                              const Vec& x, const Vec& v);

struct SurvivalQuadrature {
  double mass;
  double est_error;
};

// Survival mass of the killed problem at time t for a uniform-ball x
// uniform-ball initial law, by tensor midpoint quadrature (ratio form).
SurvivalQuadrature killed_survival_mass(const DomainGeometry& geom,
                                        const CollisionModel& coll,
                                        const InitialLaw& initial, double t,
                                        int nodes_per_axis);

struct DuhamelCheck {
  int cells_checked = 0;
  int violations = 0;
  double worst_deficit = 0.0;
  std::vector<int> violating_cells;
};

// Empirical audit of the transport lower bound between two snapshots of one
// run (Cartesian spatial grids): arrival density must dominate the
// back-shifted earlier density times the worst-case survival factor, up to
// the statistical margin. Only cells whose whole backward flight stays in
// Omega are checked.
DuhamelCheck duhamel_lower_bound_check(const EmpiricalField& prev,
                                       const EmpiricalField& cur, double dt,
                                       double sigma_max,
                                       const DomainGeometry& geom,
                                       double n_sigma_margin = 4.0);

}  // namespace kinwall
