#include "kinwall/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kinwall {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> uniform_times(double t_end, double dt) {
  std::vector<double> times;
  for (double t = 0.0; t < t_end + 0.5 * dt; t += dt)
    times.push_back(std::min(t, t_end));
  if (times.back() < t_end) times.push_back(t_end);
  return times;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                 std::size_t upto) {
  double acc = 0.0;
  for (std::size_t i = 1; i <= upto; ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  return acc;
}

}  // namespace

SteadyStateResult steady_state(const DomainGeometry& geom,
                               const WallModel& wall,
                               const CollisionModel* coll,
                               const InitialLaw& initial, const GridSpec& grid,
                               const WeightSpec& weights,
                               std::size_t n_particles, double relax_time,
                               double average_time, double snapshot_dt,
                               std::uint64_t seed, int workers) {
  EnsembleOptions opts;
  opts.n_particles = n_particles;
  opts.master_seed = seed;
  opts.workers = workers;
  opts.grid = grid;
  opts.weights = weights;
  opts.snapshot_times = {};
  const int n_avg = std::max(1, static_cast<int>(average_time / snapshot_dt));
  for (int k = 0; k <= n_avg; ++k)
    opts.snapshot_times.push_back(relax_time + k * snapshot_dt);

  auto average = [&](std::uint64_t salt) {
    EnsembleOptions o = opts;
    o.stream_salt = salt;
    EnsembleResult r = simulate_ensemble(geom, &wall, coll, initial, o);
    EmpiricalField merged(grid);
    for (auto& f : r.fields) {
      merged.merge_counts(f);
      merged.deposit_stats.add(f.deposit_stats);
    }
    return std::pair<EmpiricalField, EventCounts>{std::move(merged), r.events};
  };

  auto [field, events] = average(0);
  auto [replica, events2] = average(0x5EED5EEDull);

  SteadyStateResult res;
  res.field = std::move(field);
  res.events = events;
  res.events.add(events2);
  const DistanceResult d = l1_distance(res.field, replica);
  res.replica_distance = d.value;
  res.replica_floor = d.stat_floor;
  res.converged = d.value <= 4.0 * d.stat_floor;
  return res;
}

RateCurve convergence_curve(const DomainGeometry& geom, const WallModel& wall,
                            const CollisionModel* coll,
                            const InitialLaw& initial,
                            const EmpiricalField& steady,
                            const WeightSpec& weights, std::size_t n_particles,
                            const std::vector<double>& snapshot_times,
                            double fit_lo, double fit_hi, std::uint64_t seed,
                            int workers) {
  EnsembleOptions opts;
  opts.n_particles = n_particles;
  opts.master_seed = seed;
  opts.workers = workers;
  opts.grid = steady.grid();
  opts.weights = weights;
  opts.snapshot_times = snapshot_times;
  opts.stream_salt = 0xC0FFEEull;
  const EnsembleResult run = simulate_ensemble(geom, &wall, coll, initial, opts);

  RateCurve curve;
  curve.times = run.times;
  for (const auto& f : run.fields) {
    const DistanceResult d = l1_distance(f, steady);
    curve.distances.push_back(d.value);
    curve.floors.push_back(d.stat_floor);
  }
  try {
    curve.expo = fit_rate(curve.times, curve.distances, FitMode::Exponential,
                          fit_lo, fit_hi, curve.floors);
  } catch (const std::runtime_error&) {
  }
  try {
    curve.poly = fit_rate(curve.times, curve.distances, FitMode::Polynomial,
                          fit_lo, fit_hi, curve.floors);
  } catch (const std::runtime_error&) {
  }
  return curve;
}

bool LyapunovReport::bounded(double drift_cap) const {
  for (double d : drift_expo)
    if (!(d < drift_cap)) return false;
  return !drift_expo.empty();
}

LyapunovReport lyapunov_audit(const DomainGeometry& geom,
                              const WallModel& wall,
                              const CollisionModel* coll,
                              const std::vector<InitialLaw>& laws,
                              double alpha, const std::vector<double>& t_grid,
                              double sigma0, const GridSpec& grid,
                              const WeightSpec& weights_base,
                              std::size_t n_particles, double snapshot_dt,
                              std::uint64_t seed, int workers) {
  if (!(alpha > 1.0 && alpha < geom.dim()))
    throw std::invalid_argument("lyapunov audit needs alpha in (1,d)");
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());

  WeightSpec spec = weights_base;
  spec.alpha = alpha;

  LyapunovReport report;
  report.alpha = alpha;
  report.sigma0 = sigma0;

  for (std::size_t li = 0; li < laws.size(); ++li) {
    EnsembleOptions opts;
    opts.n_particles = n_particles;
    opts.master_seed = seed;
    opts.workers = workers;
    opts.grid = grid;
    opts.weights = spec;
    opts.stream_salt = 0xA11D0000ull + li;
    opts.snapshot_times = uniform_times(t_max, snapshot_dt);
    const EnsembleResult run =
        simulate_ensemble(geom, &wall, coll, laws[li], opts);

    std::vector<double> norms, norms_m1;
    for (const auto& f : run.fields) {
      norms.push_back(weighted_norm(f));
      norms_m1.push_back(weighted_norm_alpha_m1(f));
    }
    const double norm0 = norms.front();
    if (li == 0) report.norm_initial = norm0;

    std::vector<LyapunovRow> rows;
    double rmin = 0.0, rmax = 0.0;
    for (double T : t_grid) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < run.times.size(); ++i)
        if (std::fabs(run.times[i] - T) < 1e-9) idx = i;
      LyapunovRow row;
      row.T = T;
      row.norm_T = norms[idx];
      row.integral_alpha = trapezoid(run.times, norms, idx);
      row.integral_alpha_m1 = trapezoid(run.times, norms_m1, idx);
      row.ratio_expo =
          (row.norm_T + sigma0 * row.integral_alpha - norm0) / (1.0 + T);
      row.ratio_subgeom =
          (row.norm_T + alpha * row.integral_alpha_m1 - norm0) / (1.0 + T);
      // the applicable form: exponential when sigma is bounded below,
      // subgeometric otherwise
      const double r = sigma0 > 0.0 ? row.ratio_expo : row.ratio_subgeom;
      if (rows.empty()) {
        rmin = rmax = r;
      } else {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      rows.push_back(row);
    }
    report.per_law.push_back(std::move(rows));
    report.drift_expo.push_back(rmin > 0.0 ? rmax / rmin : 1e300);
  }
  return report;
}

FluxAuditReport flux_audit(const DomainGeometry& geom, const WallModel& wall,
                           const CollisionModel* coll,
                           const InitialLaw& initial, const GridSpec& grid,
                           const WeightSpec& weights, std::size_t n_particles,
                           double t_end, double snapshot_dt, double speed_cap,
                           std::uint64_t seed, int workers) {
  EnsembleOptions opts;
  opts.n_particles = n_particles;
  opts.master_seed = seed;
  opts.workers = workers;
  opts.grid = grid;
  opts.weights = weights;
  opts.snapshot_times = uniform_times(t_end, snapshot_dt);
  opts.transport.flux_speed_cap = speed_cap;
  opts.stream_salt = 0xF1u;
  const EnsembleResult run = simulate_ensemble(geom, &wall, coll, initial, opts);

  FluxAuditReport rep;
  rep.times = run.times;
  const bool capped = wall.kind() == WallModel::Kind::CercignaniLampis;
  const double n = static_cast<double>(n_particles);
  for (const auto& f : run.fields) {
    rep.flux_events.push_back(
        static_cast<double>(capped ? f.flux_stats.hits_capped
                                   : f.flux_stats.hits) /
        n);
    rep.flux_momentum.push_back(
        (capped ? f.flux_stats.abs_flux_capped : f.flux_stats.abs_flux) / n);
  }
  // affine fit F ~ intercept + slope t
  const std::size_t m = rep.times.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += rep.times[i];
    sy += rep.flux_events[i];
    sxx += rep.times[i] * rep.times[i];
    sxy += rep.times[i] * rep.flux_events[i];
  }
  const double denom = m * sxx - sx * sx;
  rep.slope = (m * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / m;
  double ss_res = 0, ss_tot = 0, max_res_head = 0, max_res_tail = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = rep.intercept + rep.slope * rep.times[i];
    const double r = rep.flux_events[i] - pred;
    ss_res += r * r;
    ss_tot += (rep.flux_events[i] - sy / m) * (rep.flux_events[i] - sy / m);
    if (i < 2 * m / 3)
      max_res_head = std::max(max_res_head, std::fabs(r));
    else
      max_res_tail = std::max(max_res_tail, std::fabs(r));
  }
  rep.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  const double scale = std::max(rep.flux_events.back(), 1e-12);
  rep.affine_ok = rep.r_squared > 0.99 &&
                  max_res_tail <= std::max(2.0 * max_res_head, 0.02 * scale);
  return rep;
}

namespace {

// arrival binning for the minorization probe: polar position cells and
// equal-mass speed shells x angle sectors inside [speed_lo, speed_hi]
struct ArrivalGrid {
  double radius;
  int n_r = 8, n_phi = 8, n_s = 8, n_a = 8;
  std::vector<double> speed_edges;

  int n_cells() const { return n_r * n_phi * n_s * n_a; }

  void build(double speed_lo, double speed_hi) {
    // Rayleigh quantile shells (2-d unit Maxwellian speed law)
    auto cdf = [](double s) { return 1.0 - std::exp(-0.5 * s * s); };
    auto inv = [](double p) { return std::sqrt(-2.0 * std::log(1.0 - p)); };
    speed_edges.resize(n_s + 1);
    const double p0 = cdf(speed_lo), p1 = cdf(speed_hi);
    for (int k = 0; k <= n_s; ++k)
      speed_edges[k] = inv(p0 + (p1 - p0) * k / n_s);
  }

  int cell_of(const Vec& x, const Vec& v) const {
    const double r2 = norm2(x) / (radius * radius);
    if (r2 >= 1.0) return -1;
    const int ir = std::min(static_cast<int>(r2 * n_r), n_r - 1);
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0.0) phi += 2.0 * kPi;
    const int ip = std::min(static_cast<int>(phi / (2.0 * kPi) * n_phi),
                            n_phi - 1);
    const double s = norm(v);
    if (s < speed_edges.front() || s >= speed_edges.back()) return -1;
    int is = 0;
    while (is + 1 < n_s && s >= speed_edges[is + 1]) ++is;
    double va = std::atan2(v[1], v[0]);
    if (va < 0.0) va += 2.0 * kPi;
    const int ia = std::min(static_cast<int>(va / (2.0 * kPi) * n_a), n_a - 1);
    return ((ir * n_phi + ip) * n_s + is) * n_a + ia;
  }

  double cell_volume(int cell) const {
    const int ia_rest = cell / n_a;
    const int is = ia_rest % n_s;
    const double s0 = speed_edges[is], s1 = speed_edges[is + 1];
    const double spatial = kPi * radius * radius / (n_r * n_phi);
    const double vel = kPi * (s1 * s1 - s0 * s0) / n_a;
    return spatial * vel;
  }
};

struct StartCell {
  double r_lo, r_hi, phi_lo, phi_hi;   // polar position range
  double s_lo, s_hi, a_lo, a_hi;       // speed and direction range
  Vec center_x, center_v;
};

}  // namespace

DoeblinReport doeblin_probe(const DomainGeometry& geom, const WallModel& wall,
                            const CollisionModel* coll,
                            const WeightSpec& weights, double lambda,
                            const std::vector<double>& T_list,
                            std::uint64_t starts_per_cell, double speed_lo,
                            double speed_hi, std::uint64_t seed, int workers) {
  if (geom.kind() != ShapeKind::Disk2D)
    throw std::invalid_argument("doeblin probe runs on the disk");
  const double R = geom.bounding_radius();

  WeightSpec m1 = weights;
  m1.alpha = 1.0;

  // coarse covering of D_Lambda: polar position x speed shell x angle
  const int sr = 2, sp = 4, ss = 2, sa = 4;
  std::vector<StartCell> cells;
  double lambda0 = 1e300;
  for (int ir = 0; ir < sr; ++ir)
    for (int ip = 0; ip < sp; ++ip)
      for (int is = 0; is < ss; ++is)
        for (int ia = 0; ia < sa; ++ia) {
          StartCell c;
          c.r_lo = R * std::sqrt(static_cast<double>(ir) / sr);
          c.r_hi = R * std::sqrt(static_cast<double>(ir + 1) / sr);
          c.phi_lo = 2.0 * kPi * ip / sp;
          c.phi_hi = 2.0 * kPi * (ip + 1) / sp;
          c.s_lo = speed_lo + (speed_hi - speed_lo) * is / ss;
          c.s_hi = speed_lo + (speed_hi - speed_lo) * (is + 1) / ss;
          c.a_lo = 2.0 * kPi * ia / sa;
          c.a_hi = 2.0 * kPi * (ia + 1) / sa;
          const double rc = 0.5 * (c.r_lo + c.r_hi);
          const double pc = 0.5 * (c.phi_lo + c.phi_hi);
          const double sc = 0.5 * (c.s_lo + c.s_hi);
          const double ac = 0.5 * (c.a_lo + c.a_hi);
          c.center_x = vec2(rc * std::cos(pc), rc * std::sin(pc));
          c.center_v = vec2(sc * std::cos(ac), sc * std::sin(ac));
          const double m = weight_m_alpha(geom, c.center_x, c.center_v, m1);
          lambda0 = std::min(lambda0, m);
          if (m <= lambda) cells.push_back(c);
        }

  DoeblinReport rep;
  rep.lambda = lambda;
  rep.lambda0 = lambda0;
  rep.n_start_cells = static_cast<int>(cells.size());
  rep.T_list = T_list;
  if (cells.empty())
    throw std::invalid_argument("D_Lambda empty on the start grid");

  ArrivalGrid arrival;
  arrival.radius = R;
  arrival.build(speed_lo, speed_hi);
  const int n_arrival = arrival.n_cells();
  const std::size_t n_T = T_list.size();

  // per (start cell, T): arrival histogram; each start cell owned by one
  // worker, so plain integer counters suffice
  std::vector<std::vector<std::uint32_t>> counts(
      cells.size() * n_T, std::vector<std::uint32_t>(n_arrival, 0));

  std::atomic<std::size_t> next_cell{0};
  const ParticleTracker tracker(geom, &wall, coll, {});
  auto run_cell = [&](std::size_t ci) {
    const StartCell& c = cells[ci];
    for (std::uint64_t i = 0; i < starts_per_cell; ++i) {
      Rng rng(seed, mix_stream(0xD0EB000ull + ci, i));
      PhaseState s;
      const double r =
          std::sqrt(rng.uniform(c.r_lo * c.r_lo, c.r_hi * c.r_hi));
      const double phi = rng.uniform(c.phi_lo, c.phi_hi);
      const double sp_ = rng.uniform(c.s_lo, c.s_hi);
      const double an = rng.uniform(c.a_lo, c.a_hi);
      s.x = vec2(r * std::cos(phi), r * std::sin(phi));
      s.v = vec2(sp_ * std::cos(an), sp_ * std::sin(an));
      EventCounts ev;
      double t_prev = 0.0;
      for (std::size_t k = 0; k < n_T; ++k) {
        tracker.advance(s, t_prev, T_list[k], rng, ev);
        t_prev = T_list[k];
        const int cell = arrival.cell_of(s.x, s.v);
        if (cell >= 0) ++counts[ci * n_T + k][cell];
      }
    }
  };
  auto worker_loop = [&] {
    for (;;) {
      const std::size_t ci = next_cell.fetch_add(1);
      if (ci >= cells.size()) break;
      run_cell(ci);
    }
  };
  if (workers <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
    for (auto& th : pool) th.join();
  }

  const int n_spatial = arrival.n_r * arrival.n_phi;
  const int per_spatial = arrival.n_s * arrival.n_a;
  for (std::size_t k = 0; k < n_T; ++k) {
    // nu(cell) = min over start bundles of the arrival density
    std::vector<double> nu(n_arrival, 1e300);
    std::uint64_t nonzero = 0, spatial_hit = 0;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& h = counts[ci * n_T + k];
      for (int a = 0; a < n_arrival; ++a) {
        const double dens = h[a] / (static_cast<double>(starts_per_cell) *
                                    arrival.cell_volume(a));
        nu[a] = std::min(nu[a], dens);
        if (h[a] > 0) ++nonzero;
      }
      for (int sc = 0; sc < n_spatial; ++sc) {
        std::uint64_t cell_total = 0;
        for (int vc = 0; vc < per_spatial; ++vc)
          cell_total += h[sc * per_spatial + vc];
        if (cell_total > 0) ++spatial_hit;
      }
    }
    double floor = 1e300;
    for (double v : nu) floor = std::min(floor, v);
    rep.floors.push_back(floor);
    rep.coverage.push_back(static_cast<double>(nonzero) /
                           (cells.size() * n_arrival));
    rep.spatial_coverage.push_back(static_cast<double>(spatial_hit) /
                                   (cells.size() * n_spatial));
    if (rep.nu_best.empty() || floor > rep.best_floor) {
      rep.best_floor = floor;
      rep.best_T = T_list[k];
      rep.nu_best = std::move(nu);
    }
  }
  rep.positive = rep.best_floor > 0.0;
  return rep;
}

SurvivalQuadrature counterexample_lhs(const DomainGeometry& geom,
                                      const CollisionModel& coll, double eps,
                                      double t, double r_in, double h0,
                                      int nodes_per_axis) {
  const int d = geom.dim();
  const double cutoff =
      std::pow(eps, 2.0 * d) * unit_ball_volume(d) * unit_ball_volume(d) * h0;

  auto evaluate = [&](int n) {
    const double h = 2.0 * eps / n;
    double num = 0.0;
    std::uint64_t inside = 0;
    std::vector<int> idx(2 * d, 0);
    std::uint64_t total = 1;
    for (int a = 0; a < 2 * d; ++a) total *= n;
    for (std::uint64_t flat = 0; flat < total; ++flat) {
      std::uint64_t rem = flat;
      for (int a = 0; a < 2 * d; ++a) {
        idx[a] = static_cast<int>(rem % n);
        rem /= n;
      }
      Vec y{}, w{};
      for (int a = 0; a < d; ++a) {
        y[a] = -eps + (idx[a] + 0.5) * h;
        w[a] = -eps + (idx[d + a] + 0.5) * h;
      }
      if (norm(y) >= eps || norm(w) >= eps) continue;
      ++inside;
      if (t * norm(w) > r_in - eps) continue;
      const double val = std::exp(-coll.path_integral(y, w, t)) - cutoff;
      if (val > 0.0) num += val;
    }
    return num / static_cast<double>(inside);
  };

  const double coarse = evaluate(nodes_per_axis / 2);
  const double fine = evaluate(nodes_per_axis);
  return {fine, std::fabs(fine - coarse)};
}

CounterexampleReport counterexample_run(
    const DomainGeometry& geom, const WallModel& wall,
    const CollisionModel& coll, const EmpiricalField& steady, double alpha,
    double eps_sim, std::size_t n_particles,
    const std::vector<double>& t_grid, const GridSpec& grid,
    const WeightSpec& weights_base, double fit_lo, std::uint64_t seed,
    int workers) {
  CounterexampleReport rep;
  rep.alpha = alpha;
  rep.eps_sim = eps_sim;
  rep.r_in = 0.5 * geom.bounding_radius();
  if (!(rep.r_in > 1.0))
    throw std::invalid_argument(
        "counterexample needs d(boundary, 0)/2 > 1 (enlarge the domain)");
  rep.h0_estimate = steady.max_density();

  WeightSpec spec = weights_base;
  spec.alpha = alpha;

  EnsembleOptions opts;
  opts.n_particles = n_particles;
  opts.master_seed = seed;
  opts.workers = workers;
  opts.grid = grid;
  opts.weights = spec;
  opts.stream_salt = 0xCE0ull;
  opts.snapshot_times = {0.0};
  for (double t : t_grid) opts.snapshot_times.push_back(t);
  const EnsembleResult run = simulate_ensemble(
      geom, &wall, &coll, InitialLaw::f_epsilon(eps_sim), opts);

  rep.weighted_norm_gap = weighted_norm(run.fields[0]) + weighted_norm(steady);
  rep.weighted_norm_gap_error =
      weighted_norm_std_error(run.fields[0]) + weighted_norm_std_error(steady);

  double tail_min = 1e300;
  bool tail_ok = true;
  bool have_tail = false;
  for (std::size_t i = 1; i < run.times.size(); ++i) {
    CounterexampleRow row;
    row.t = run.times[i];
    row.eps_t = 1.0 / (1.0 + row.t);
    const auto lhs = counterexample_lhs(geom, coll, row.eps_t, row.t, rep.r_in,
                                        rep.h0_estimate, 32);
    row.lhs = lhs.mass;
    row.lhs_err = lhs.est_error;
    const DistanceResult dist = l1_distance(run.fields[i], steady);
    row.distance = dist.value;
    row.floor = dist.stat_floor;
    row.decay_e = row.distance / rep.weighted_norm_gap;
    row.e_scaled = row.decay_e * std::pow(1.0 + row.t, alpha);
    row.c_alpha = row.decay_e > 0.0
                      ? row.lhs * std::pow(1.0 + row.t, -alpha) / row.decay_e
                      : 1e300;
    if (row.t >= fit_lo) {
      have_tail = true;
      tail_min = std::min(tail_min, row.e_scaled);
      if (!(row.distance > row.floor)) tail_ok = false;
    }
    rep.rows.push_back(row);
  }
  rep.tail_min_scaled = have_tail ? tail_min : 0.0;
  rep.tail_positive = have_tail && tail_ok && tail_min > 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// subcommand drivers

namespace {

ordered_json fit_json(const std::optional<RateFit>& fit) {
  if (!fit) return nullptr;
  ordered_json j;
  j["mode"] = fit->mode == FitMode::Exponential ? "exponential" : "polynomial";
  j["amplitude"] = fit->amplitude;
  j["rate"] = fit->rate;
  j["r_squared"] = fit->r_squared;
  j["points_used"] = fit->points_used;
  return j;
}

struct Models {
  DomainGeometry geom;
  WallModel wall;
  std::optional<CollisionModel> coll;
  WeightSpec weights;
  GridSpec grid;
  InitialLaw initial;
};

Models build_models(const RunConfig& cfg) {
  DomainGeometry geom = make_geometry(cfg);
  WallModel wall = make_wall(cfg);
  auto coll = make_collision(cfg);
  WeightSpec weights = make_weight_spec(cfg, geom);
  GridSpec grid = make_grid(cfg, geom);
  InitialLaw initial = make_initial(cfg);
  return {std::move(geom), std::move(wall), std::move(coll), weights,
          std::move(grid), initial};
}

}  // namespace

int run_simulate(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  EnsembleOptions opts;
  opts.n_particles = cfg.simulation.n_particles;
  opts.master_seed = cfg.simulation.master_seed;
  opts.workers = cfg.simulation.workers;
  opts.grid = m.grid;
  opts.weights = m.weights;
  opts.snapshot_times = snapshot_schedule(cfg);
  opts.transport.flux_speed_cap = cfg.experiment.lambda;
  const EnsembleResult run = simulate_ensemble(
      m.geom, &m.wall, m.coll ? &*m.coll : nullptr, m.initial, opts);

  ordered_json snaps = ordered_json::array();
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
    write_field_csv(run.fields[i], out.file(name));
    ordered_json s = field_summary(run.fields[i]);
    s["time"] = run.times[i];
    s["file"] = name;
    snaps.push_back(s);
  }
  ordered_json j;
  j["snapshots"] = snaps;
  j["events"] = {{"collisions", run.events.collisions},
                 {"wall_hits", run.events.wall_hits},
                 {"grazing", run.events.grazing}};
  j["survivors"] = run.survivors;
  out.write_json("summary.json", j);
  return 0;
}

int run_steady(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  const SteadyStateResult res = steady_state(
      m.geom, m.wall, m.coll ? &*m.coll : nullptr, m.initial, m.grid,
      m.weights, cfg.simulation.n_particles, cfg.experiment.relax_time,
      cfg.experiment.average_time, cfg.simulation.snapshot_dt,
      cfg.simulation.master_seed, cfg.simulation.workers);
  write_field_csv(res.field, out.file("steady.csv"));
  ordered_json j;
  j["replica_distance"] = res.replica_distance;
  j["replica_floor"] = res.replica_floor;
  j["converged"] = res.converged;
  j["deposits"] = res.field.n_deposits();
  j["weighted_norm_alpha"] = weighted_norm(res.field);
  j["weighted_norm_std_error"] = weighted_norm_std_error(res.field);
  j["max_density"] = res.field.max_density();
  out.write_json("steady.json", j);
  return res.converged ? 0 : 1;
}

int run_rate(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  const SteadyStateResult steady = steady_state(
      m.geom, m.wall, m.coll ? &*m.coll : nullptr,
      InitialLaw::uniform_maxwellian(), m.grid, m.weights,
      cfg.simulation.n_particles, cfg.experiment.relax_time,
      cfg.experiment.average_time, cfg.simulation.snapshot_dt,
      cfg.simulation.master_seed, cfg.simulation.workers);
  const RateCurve curve = convergence_curve(
      m.geom, m.wall, m.coll ? &*m.coll : nullptr, m.initial, steady.field,
      m.weights, cfg.simulation.n_particles, snapshot_schedule(cfg),
      cfg.experiment.fit_window_lo, cfg.experiment.fit_window_hi,
      cfg.simulation.master_seed, cfg.simulation.workers);

  CsvWriter csv(out.file("rate.csv"), {"t", "distance", "stat_floor"});
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    csv.row({curve.times[i], curve.distances[i], curve.floors[i]});
  ordered_json j;
  j["steady_converged"] = steady.converged;
  j["fit_exponential"] = fit_json(curve.expo);
  j["fit_polynomial"] = fit_json(curve.poly);
  j["requested_mode"] = cfg.experiment.fit_mode;
  out.write_json("rate.json", j);
  return 0;
}

int run_verify_kernel(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  const Vec xb = m.geom.project_to_boundary(
      m.geom.dim() == 2 ? vec2(std::cos(0.35), std::sin(0.35))
                        : vec3(std::cos(0.35), std::sin(0.35), 0.4));
  const TangentFrame fr = tangent_frame(m.geom.outward_normal(xb), m.geom.dim());

  bool all_ok = true;
  CsvWriter csv(out.file("kernel_normalization.csv"),
                {"theta", "r_perp", "r_par", "u_mag", "integral", "residual",
                 "quad_error"});
  const double thetas[] = {0.25, 1.0, 4.0};
  const double rperps[] = {0.1, 0.5, 1.0};
  const double rpars[] = {0.2, 1.0, 1.8};
  const double umags[] = {0.1, 1.0, 10.0};
  if (cfg.wall.kind == "cl") {
    for (double th : thetas)
      for (double rp : rperps)
        for (double rl : rpars)
          for (double um : umags) {
            const WallModel w = WallModel::cercignani_lampis(
                rp, rl, TemperatureField::constant(th));
            const Vec u = um * (0.6 * fr.n + 0.8 * fr.t1);
            const auto chk = w.kernel_normalization_check(u, xb, m.geom);
            const double res = chk.total - 1.0;
            if (std::fabs(res) >= 1e-6) all_ok = false;
            csv.row({th, rp, rl, um, chk.total, res, chk.est_error});
          }
  } else {
    const double betas[] = {0.2, 0.6, 1.0};
    for (double th : thetas)
      for (double b : betas)
        for (double um : umags) {
          const WallModel w = WallModel::maxwell(BoundaryField::constant(b), b,
                                                 TemperatureField::constant(th));
          const Vec u = um * (0.6 * fr.n + 0.8 * fr.t1);
          const auto chk = w.kernel_normalization_check(u, xb, m.geom);
          const double res = chk.total - 1.0;
          if (std::fabs(res) >= 1e-6) all_ok = false;
          csv.row({th, b, 0.0, um, chk.total, res, chk.est_error});
        }
  }
  ordered_json j;
  j["all_within_1e-6"] = all_ok;
  out.write_json("kernel_normalization.json", j);
  return all_ok ? 0 : 1;
}

int run_lyapunov(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  const double speed = 5.0;
  std::vector<InitialLaw> laws = {
      InitialLaw::uniform_maxwellian(),
      InitialLaw::point_velocity(vec2(speed, 0.0)),
      InitialLaw::spatial_ball(Vec{}, 0.25 * m.geom.bounding_radius(),
                               InitialLaw::Velocity::UniformBall,
                               vec2(1.5, 0.0), 0.2)};
  double sigma0 = 0.0;
  if (m.coll && m.coll->rate().kind == RateField::Kind::Constant)
    sigma0 = m.coll->rate().sigma_max;
  const double alpha = cfg.weights.alpha > 1.0 ? cfg.weights.alpha : 1.5;
  const LyapunovReport rep = lyapunov_audit(
      m.geom, m.wall, m.coll ? &*m.coll : nullptr, laws, alpha,
      cfg.experiment.t_grid, sigma0, m.grid, m.weights,
      cfg.simulation.n_particles, cfg.simulation.snapshot_dt,
      cfg.simulation.master_seed, cfg.simulation.workers);

  CsvWriter csv(out.file("lyapunov.csv"),
                {"law", "T", "norm_T", "integral_alpha", "integral_alpha_m1",
                 "ratio_expo", "ratio_subgeom"});
  for (std::size_t li = 0; li < rep.per_law.size(); ++li)
    for (const auto& row : rep.per_law[li])
      csv.row({static_cast<double>(li), row.T, row.norm_T, row.integral_alpha,
               row.integral_alpha_m1, row.ratio_expo, row.ratio_subgeom});
  ordered_json j;
  j["alpha"] = rep.alpha;
  j["sigma0"] = rep.sigma0;
  j["drift_expo"] = rep.drift_expo;
  const bool ok = rep.bounded(3.0);
  j["bounded_drift_under_3"] = ok;
  out.write_json("lyapunov.json", j);
  return ok ? 0 : 1;
}

int run_flux(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  const FluxAuditReport rep = flux_audit(
      m.geom, m.wall, m.coll ? &*m.coll : nullptr, m.initial, m.grid,
      m.weights, cfg.simulation.n_particles, cfg.simulation.t_end,
      cfg.simulation.snapshot_dt, cfg.experiment.lambda,
      cfg.simulation.master_seed, cfg.simulation.workers);
  CsvWriter csv(out.file("flux.csv"), {"t", "flux_events", "flux_momentum"});
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    csv.row({rep.times[i], rep.flux_events[i], rep.flux_momentum[i]});
  ordered_json j;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["r_squared"] = rep.r_squared;
  j["affine_ok"] = rep.affine_ok;
  out.write_json("flux.json", j);
  return rep.affine_ok ? 0 : 1;
}

int run_doeblin(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  const DoeblinReport rep = doeblin_probe(
      m.geom, m.wall, m.coll ? &*m.coll : nullptr, m.weights,
      cfg.experiment.lambda, cfg.experiment.doeblin_T,
      cfg.experiment.starts_per_cell, cfg.experiment.arrival_speed_lo,
      cfg.experiment.arrival_speed_hi, cfg.simulation.master_seed,
      cfg.simulation.workers);
  CsvWriter csv(out.file("doeblin.csv"),
                {"T", "floor", "coverage", "spatial_coverage"});
  for (std::size_t i = 0; i < rep.T_list.size(); ++i)
    csv.row({rep.T_list[i], rep.floors[i], rep.coverage[i],
             rep.spatial_coverage[i]});
  // the empirical minorizing measure at the best horizon
  CsvWriter nu_csv(out.file("doeblin_nu.csv"), {"arrival_cell", "nu"});
  for (std::size_t a = 0; a < rep.nu_best.size(); ++a)
    nu_csv.row({static_cast<double>(a), rep.nu_best[a]});
  ordered_json j;
  j["lambda"] = rep.lambda;
  j["lambda0"] = rep.lambda0;
  j["n_start_cells"] = rep.n_start_cells;
  j["best_T"] = rep.best_T;
  j["best_floor"] = rep.best_floor;
  j["positive"] = rep.positive;
  if (!rep.positive) j["note"] = "not observed at this resolution";
  out.write_json("doeblin.json", j);
  return 0;
}

int run_counterexample(const RunConfig& cfg, OutputDir& out) {
  Models m = build_models(cfg);
  if (!m.coll) throw std::invalid_argument("counterexample needs a rate field");
  const SteadyStateResult steady = steady_state(
      m.geom, m.wall, &*m.coll, InitialLaw::uniform_maxwellian(), m.grid,
      m.weights, cfg.simulation.n_particles, cfg.experiment.relax_time,
      cfg.experiment.average_time, cfg.simulation.snapshot_dt,
      cfg.simulation.master_seed, cfg.simulation.workers);
  const CounterexampleReport rep = counterexample_run(
      m.geom, m.wall, *m.coll, steady.field,
      cfg.experiment.counterexample_alpha, cfg.experiment.eps,
      cfg.simulation.n_particles, cfg.experiment.t_grid, m.grid, m.weights,
      cfg.experiment.fit_window_lo, cfg.simulation.master_seed,
      cfg.simulation.workers);
  CsvWriter csv(out.file("counterexample.csv"),
                {"t", "eps", "lhs", "lhs_err", "distance", "floor", "E",
                 "C_alpha", "E_scaled"});
  for (const auto& r : rep.rows)
    csv.row({r.t, r.eps_t, r.lhs, r.lhs_err, r.distance, r.floor, r.decay_e,
             r.c_alpha, r.e_scaled});
  ordered_json j;
  j["alpha"] = rep.alpha;
  j["eps_sim"] = rep.eps_sim;
  j["r_in"] = rep.r_in;
  j["h0_estimate"] = rep.h0_estimate;
  j["h0_is_histogram_estimate"] = true;
  j["weighted_norm_gap"] = rep.weighted_norm_gap;
  j["weighted_norm_gap_error"] = rep.weighted_norm_gap_error;
  j["tail_min_scaled"] = rep.tail_min_scaled;
  j["tail_positive"] = rep.tail_positive;
  out.write_json("counterexample.json", j);
  return rep.tail_positive ? 0 : 1;
}

}  // namespace kinwall
