#pragma once

#include <optional>
#include <vector>

#include "kinwall/config.hpp"
#include "kinwall/field.hpp"
#include "kinwall/io.hpp"
#include "kinwall/ratefit.hpp"
#include "kinwall/transport.hpp"

namespace kinwall {

struct SteadyStateResult {
  EmpiricalField field;  // time-averaged after relaxation, unit mass
  double replica_distance = 0.0;
  double replica_floor = 0.0;
  bool converged = true;
  EventCounts events;
};

SteadyStateResult steady_state(const DomainGeometry& geom,
                               const WallModel& wall,
                               const CollisionModel* coll,
                               const InitialLaw& initial, const GridSpec& grid,
                               const WeightSpec& weights,
                               std::size_t n_particles, double relax_time,
                               double average_time, double snapshot_dt,
                               std::uint64_t seed, int workers);

struct RateCurve {
  std::vector<double> times;
  std::vector<double> distances;
  std::vector<double> floors;
  std::optional<RateFit> expo;
  std::optional<RateFit> poly;
};

RateCurve convergence_curve(const DomainGeometry& geom, const WallModel& wall,
                            const CollisionModel* coll,
                            const InitialLaw& initial,
                            const EmpiricalField& steady,
                            const WeightSpec& weights, std::size_t n_particles,
                            const std::vector<double>& snapshot_times,
                            double fit_lo, double fit_hi, std::uint64_t seed,
                            int workers);

struct LyapunovRow {
  double T = 0.0;
  double norm_T = 0.0;              // ||S_T f||_{m_alpha}
  double integral_alpha = 0.0;      // int_0^T ||S_s f||_{m_alpha} ds
  double integral_alpha_m1 = 0.0;   // int_0^T ||S_s f||_{m_{alpha-1}} ds
  double ratio_expo = 0.0;
  double ratio_subgeom = 0.0;
};

struct LyapunovReport {
  double alpha = 0.0;
  double sigma0 = 0.0;
  double norm_initial = 0.0;
  std::vector<std::vector<LyapunovRow>> per_law;
  // max/min of the exponential-form ratio across the T grid, per law
  std::vector<double> drift_expo;
  bool bounded(double drift_cap) const;
};

LyapunovReport lyapunov_audit(const DomainGeometry& geom,
                              const WallModel& wall,
                              const CollisionModel* coll,
                              const std::vector<InitialLaw>& laws,
                              double alpha, const std::vector<double>& t_grid,
                              double sigma0, const GridSpec& grid,
                              const WeightSpec& weights_base,
                              std::size_t n_particles, double snapshot_dt,
                              std::uint64_t seed, int workers);

struct FluxAuditReport {
  std::vector<double> times;
  std::vector<double> flux_events;    // hit count / N (capped in CL mode)
  std::vector<double> flux_momentum;  // sum |v.n| / N
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool affine_ok = false;
};

FluxAuditReport flux_audit(const DomainGeometry& geom, const WallModel& wall,
                           const CollisionModel* coll,
                           const InitialLaw& initial, const GridSpec& grid,
                           const WeightSpec& weights, std::size_t n_particles,
                           double t_end, double snapshot_dt, double speed_cap,
                           std::uint64_t seed, int workers);

struct DoeblinReport {
  double lambda = 0.0;
  double lambda0 = 0.0;  // smallest m_1 over the scanned start grid
  int n_start_cells = 0;
  std::vector<double> T_list;
  std::vector<double> floors;     // per T: min density over (start, arrival)
  std::vector<double> coverage;   // per T: fraction of pairs with deposits
  std::vector<double> spatial_coverage;  // per T: spatial cells reached from
                                         // every start bundle
  double best_T = 0.0;
  double best_floor = 0.0;
  bool positive = false;
  // the empirical minorizing measure at the best T: per arrival cell, the
  // minimum over start bundles of the deposited density
  std::vector<double> nu_best;
};

// Empirical minorization probe on the disk: bundles started from every cell
// of a coarse covering of D_Lambda, arrival densities on a polar x
// (speed-shell x angle) grid, floor = min over start cells and arrival cells.
DoeblinReport doeblin_probe(const DomainGeometry& geom, const WallModel& wall,
                            const CollisionModel* coll,
                            const WeightSpec& weights, double lambda,
                            const std::vector<double>& T_list,
                            std::uint64_t starts_per_cell, double speed_lo,
                            double speed_hi, std::uint64_t seed, int workers);

struct CounterexampleRow {
  double t = 0.0;
  double eps_t = 0.0;       // 1/(1+t)
  double lhs = 0.0;         // quadrature of the killed-transport integral
  double lhs_err = 0.0;
  double distance = 0.0;    // simulated L1 distance to the steady state
  double floor = 0.0;
  double decay_e = 0.0;     // E(t) = distance / ||f_eps - f_inf||_{m_alpha}
  double c_alpha = 0.0;     // implied constant lhs (1+t)^{-alpha} / E(t)
  double e_scaled = 0.0;    // E(t) (1+t)^alpha
};

struct CounterexampleReport {
  double alpha = 0.0;
  double eps_sim = 0.0;
  double r_in = 0.0;
  double h0_estimate = 0.0;
  double weighted_norm_gap = 0.0;  // ||f_eps - f_inf||_{m_alpha} estimate
  double weighted_norm_gap_error = 0.0;  // propagated statistical error
  std::vector<CounterexampleRow> rows;
  double tail_min_scaled = 0.0;  // min over the tail of E(t)(1+t)^alpha
  bool tail_positive = false;
};

CounterexampleReport counterexample_run(
    const DomainGeometry& geom, const WallModel& wall,
    const CollisionModel& coll, const EmpiricalField& steady, double alpha,
    double eps_sim, std::size_t n_particles,
    const std::vector<double>& t_grid, const GridSpec& grid,
    const WeightSpec& weights_base, double fit_lo, std::uint64_t seed,
    int workers);

// quadrature of the killed-transport lower-bound integral at (t, eps)
SurvivalQuadrature counterexample_lhs(const DomainGeometry& geom,
                                      const CollisionModel& coll, double eps,
                                      double t, double r_in, double h0,
                                      int nodes_per_axis);

// Subcommand drivers: write artifacts into `out`, return the exit status.
int run_simulate(const RunConfig& cfg, OutputDir& out);
int run_steady(const RunConfig& cfg, OutputDir& out);
int run_rate(const RunConfig& cfg, OutputDir& out);
int run_verify_kernel(const RunConfig& cfg, OutputDir& out);
int run_lyapunov(const RunConfig& cfg, OutputDir& out);
int run_flux(const RunConfig& cfg, OutputDir& out);
int run_doeblin(const RunConfig& cfg, OutputDir& out);
int run_counterexample(const RunConfig& cfg, OutputDir& out);

}  // namespace kinwall
