#include "kinwall/transport.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kinwall {

bool ParticleTracker::advance(PhaseState& state, double t0, double t1,
                              Rng& rng, EventCounts& ev, FluxStats* flux,
                              std::vector<FlightSegment>* log) const {
  double t = t0;
  const int dim = geom_.dim();
  while (t < t1) {
    const double speed2 = norm2(state.v);
    if (speed2 == 0.0) {
      // infinite dwell: no motion, collisions still ring at rate sigma(x)
      if (coll_ != nullptr) {
        auto hit = coll_->next_collision(state.x, state.v, t1 - t, rng);
        if (hit) {
          t += hit->time;
          if (settings_.kill_on_collision) {
            ++ev.killed;
            return false;
          }
          state.v = coll_->gain_sample(state.x, state.v, dim, rng);
          ++ev.collisions;
          continue;
        }
      }
      return true;
    }

    const double tau = geom_.exit_time(state.x, state.v);
    const double horizon = std::min(tau, t1 - t);

    if (coll_ != nullptr) {
      auto hit = coll_->next_collision(state.x, state.v, horizon, rng);
      if (hit) {
        if (log) log->push_back({state.x, state.v, hit->time});
        state.x = hit->position;
        t += hit->time;
        if (settings_.kill_on_collision) {
          ++ev.killed;
          return false;
        }
        state.v = coll_->gain_sample(state.x, state.v, dim, rng);
        ++ev.collisions;
        continue;
      }
    }

    if (t1 - t <= tau) {
      if (log) log->push_back({state.x, state.v, t1 - t});
      state.x += (t1 - t) * state.v;
      return true;
    }

    // boundary event
    if (log) log->push_back({state.x, state.v, tau});
    state.x = geom_.footpoint(state.x, state.v);
    t += tau;
    ++ev.wall_hits;
    const Vec n = geom_.outward_normal(state.x);
    const double un = dot(state.v, n);
    if (flux) {
      const double speed = std::sqrt(speed2);
      ++flux->hits;
      flux->abs_flux += std::fabs(un);
      if (speed <= settings_.flux_speed_cap) {
        ++flux->hits_capped;
        flux->abs_flux_capped += std::fabs(un);
      }
    }
    if (settings_.absorbing_wall) {
      ++ev.absorbed_wall;
      return false;
    }
    if (std::fabs(un) < settings_.grazing_tol * std::sqrt(speed2)) {
      // measure-zero grazing set: re-emit with a fresh wall sample
      state.v = wall_->diffuse_sample(state.x, geom_, rng);
      ++ev.grazing;
    } else {
      state.v = wall_->sample(state.v, state.x, geom_, rng);
    }
  }
  return true;
}

namespace {

struct BlockAccumulator {
  std::vector<DepositStats> deposit;  // per snapshot
  std::vector<FluxStats> flux;
  EventCounts events;
  std::uint64_t survivors = 0;
};

}  // namespace

EnsembleResult simulate_ensemble(const DomainGeometry& geom,
                                 const WallModel* wall,
                                 const CollisionModel* coll,
                                 const InitialLaw& initial,
                                 const EnsembleOptions& opts) {
  const std::size_t n_snaps = opts.snapshot_times.size();
  if (n_snaps == 0)
    throw std::invalid_argument("simulate_ensemble: no snapshot times");
  for (std::size_t i = 1; i < n_snaps; ++i)
    if (opts.snapshot_times[i] < opts.snapshot_times[i - 1])
      throw std::invalid_argument("snapshot times must be sorted");
  if (opts.n_particles == 0)
    throw std::invalid_argument("simulate_ensemble: N >= 1 required");

  const std::size_t block_size = std::max<std::size_t>(opts.block_size, 1);
  const std::size_t n_blocks =
      (opts.n_particles + block_size - 1) / block_size;
  const int workers = std::max(1, opts.workers);

  std::vector<BlockAccumulator> blocks(n_blocks);
  for (auto& b : blocks) {
    b.deposit.resize(n_snaps);
    b.flux.resize(n_snaps);
  }

  // worker-private integer histograms; merged after the join
  std::vector<std::vector<EmpiricalField>> worker_fields(
      workers, std::vector<EmpiricalField>(n_snaps, EmpiricalField(opts.grid)));

  std::atomic<std::size_t> next_block{0};
  const ParticleTracker tracker(geom, wall, coll, opts.transport);

  auto run_worker = [&](int w) {
    auto& fields = worker_fields[w];
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= n_blocks) break;
      auto& acc = blocks[b];
      const std::size_t lo = b * block_size;
      const std::size_t hi = std::min(lo + block_size, opts.n_particles);
      for (std::size_t i = lo; i < hi; ++i) {
        Rng rng(opts.master_seed, mix_stream(opts.stream_salt, i));
        PhaseState s = initial.sample(geom, rng);
        FluxStats particle_flux;
        bool alive = true;
        double t_prev = 0.0;
        for (std::size_t k = 0; k < n_snaps && alive; ++k) {
          const double t_snap = opts.snapshot_times[k];
          alive = tracker.advance(s, t_prev, t_snap, rng, acc.events,
                                  &particle_flux);
          t_prev = t_snap;
          if (!alive) break;
          fields[k].deposit(s.x, s.v);
          acc.flux[k].add(particle_flux);
          const double base = weight_base(geom, s.x, s.v, opts.weights);
          if (std::isfinite(base)) {
            const double w = std::pow(base, opts.weights.alpha);
            acc.deposit[k].w_alpha_sum += w;
            acc.deposit[k].w_alpha_sq_sum += w * w;
            acc.deposit[k].w_alpha_m1_sum +=
                std::pow(base, opts.weights.alpha - 1.0);
          } else {
            ++acc.deposit[k].low_speed;
          }
        }
        if (alive) ++acc.survivors;
      }
    }
  };

  if (workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
    for (auto& th : pool) th.join();
  }

  EnsembleResult result;
  result.times = opts.snapshot_times;
  result.fields.assign(n_snaps, EmpiricalField(opts.grid));
  for (std::size_t k = 0; k < n_snaps; ++k)
    for (int w = 0; w < workers; ++w)
      result.fields[k].merge_counts(worker_fields[w][k]);
  // floating accumulators folded in fixed block order
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t k = 0; k < n_snaps; ++k) {
      result.fields[k].deposit_stats.add(blocks[b].deposit[k]);
      result.fields[k].flux_stats.add(blocks[b].flux[k]);
    }
    result.events.add(blocks[b].events);
    result.survivors += blocks[b].survivors;
  }
  return result;
}

double killed_transport_exact(const DomainGeometry& geom,
                              const CollisionModel& coll,
                              const InitialLaw& initial, double t,
                              const Vec& x, const Vec& v) {
  const double tau_back = geom.exit_time(x, -v);
  if (tau_back < t) return 0.0;
  const Vec y = x - t * v;
  const double f0 = initial.density(geom, y, v);
  if (f0 == 0.0) return 0.0;
  return std::exp(-coll.path_integral(y, v, t)) * f0;
}

SurvivalQuadrature killed_survival_mass(const DomainGeometry& geom,
                                        const CollisionModel& coll,
                                        const InitialLaw& initial, double t,
                                        int nodes_per_axis) {
  if (initial.spatial != InitialLaw::Spatial::UniformBall ||
      initial.velocity != InitialLaw::Velocity::UniformBall)
    throw std::invalid_argument(
        "killed_survival_mass: uniform-ball x uniform-ball law required");
  const int d = geom.dim();

  auto evaluate = [&](int n) {
    // midpoint tensor rule over the product of bounding boxes, ratio form
    const double hx = 2.0 * initial.x_radius / n;
    const double hv = 2.0 * initial.v_radius / n;
    double num = 0.0;
    std::uint64_t inside = 0;
    std::vector<int> idx(2 * d, 0);
    const std::uint64_t total = [&] {
      std::uint64_t p = 1;
      for (int a = 0; a < 2 * d; ++a) p *= n;
      return p;
    }();
    for (std::uint64_t flat = 0; flat < total; ++flat) {
      std::uint64_t rem = flat;
      for (int a = 0; a < 2 * d; ++a) {
        idx[a] = static_cast<int>(rem % n);
        rem /= n;
      }
      Vec y{}, w{};
      for (int a = 0; a < d; ++a) {
        y[a] = initial.x_center[a] - initial.x_radius + (idx[a] + 0.5) * hx;
        w[a] = initial.v_center[a] - initial.v_radius + (idx[d + a] + 0.5) * hv;
      }
      if (dist(y, initial.x_center) >= initial.x_radius) continue;
      if (dist(w, initial.v_center) >= initial.v_radius) continue;
      ++inside;
      if (geom.exit_time(y, w) < t) continue;
      num += std::exp(-coll.path_integral(y, w, t));
    }
    return num / static_cast<double>(inside);
  };

  const double coarse = evaluate(nodes_per_axis / 2);
  const double fine = evaluate(nodes_per_axis);
  return {fine, std::fabs(fine - coarse)};
}

DuhamelCheck duhamel_lower_bound_check(const EmpiricalField& prev,
                                       const EmpiricalField& cur, double dt,
                                       double sigma_max,
                                       const DomainGeometry& geom,
                                       double n_sigma_margin) {
  if (!(prev.grid() == cur.grid()))
    throw std::invalid_argument("duhamel check: grid mismatch");
  const SpatialGrid& sg = cur.grid().spatial;
  if (sg.kind() != SpatialGrid::Kind::Cartesian)
    throw std::invalid_argument("duhamel check needs a Cartesian spatial grid");
  const VelocityGrid& vg = cur.grid().velocity;
  const int d = sg.dim();
  const int na = sg.n_axis();
  const double hw = sg.half_width();
  const double h = 2.0 * hw / na;
  const double np = static_cast<double>(prev.n_deposits());
  const double nc = static_cast<double>(cur.n_deposits());
  const double survival = std::exp(-sigma_max * dt);

  DuhamelCheck report;

  auto axis_cells = [&](int cell, int* out) {
    for (int a = d - 1; a >= 0; --a) {
      out[a] = cell % na;
      cell /= na;
    }
  };

  for (int vc = 0; vc < vg.n_cells() - 1; ++vc) {
    const Vec w = vg.center(vc);
    const Vec shift = dt * w;
    for (int sc = 0; sc < sg.n_cells(); ++sc) {
      int ij[3];
      axis_cells(sc, ij);
      double lo[3], hi[3];
      for (int a = 0; a < d; ++a) {
        lo[a] = -hw + ij[a] * h;
        hi[a] = lo[a] + h;
      }
      // applicability: every corner of the cell, and of its back-shifted
      // copy, lies in Omega with backward flight clear of the wall
      bool applicable = true;
      const int corners = 1 << d;
      for (int c = 0; c < corners && applicable; ++c) {
        Vec p{};
        for (int a = 0; a < d; ++a) p[a] = (c >> a) & 1 ? hi[a] : lo[a];
        if (!geom.contains(p) || !geom.contains(p - shift)) {
          applicable = false;
          break;
        }
        if (geom.exit_time(p, -w) <= dt) applicable = false;
      }
      if (!applicable) continue;

      // exact box-overlap redistribution of the earlier histogram
      double trans_count = 0.0;
      int cell_lo[3], cell_hi[3];
      bool in_range = true;
      for (int a = 0; a < d; ++a) {
        const double blo = lo[a] - shift[a], bhi = hi[a] - shift[a];
        const int c0 = static_cast<int>(std::floor((blo + hw) / h));
        const int c1 = static_cast<int>(std::floor((bhi + hw - 1e-12) / h));
        if (c0 < 0 || c1 >= na) in_range = false;
        cell_lo[a] = std::max(c0, 0);
        cell_hi[a] = std::min(c1, na - 1);
      }
      if (!in_range) continue;
      int span[3] = {1, 1, 1};
      int total = 1;
      for (int a = 0; a < d; ++a) {
        span[a] = cell_hi[a] - cell_lo[a] + 1;
        total *= span[a];
      }
      for (int k = 0; k < total; ++k) {
        int rem = k;
        int src = 0;
        double frac = 1.0;
        for (int a = 0; a < d; ++a) {
          const int ca = cell_lo[a] + rem % span[a];
          rem /= span[a];
          src = src * na + ca;
          const double clo = -hw + ca * h, chi = clo + h;
          const double blo = lo[a] - shift[a], bhi = hi[a] - shift[a];
          frac *= std::max(0.0, std::min(chi, bhi) - std::max(clo, blo)) / h;
        }
        trans_count +=
            frac * prev.counts()[static_cast<std::size_t>(src) *
                                     vg.n_cells() +
                                 vc];
      }

      const double cur_count =
          cur.counts()[static_cast<std::size_t>(sc) * vg.n_cells() + vc];
      const double lhs_mass = cur_count / nc;
      const double rhs_mass = survival * trans_count / np;
      const double stat =
          std::sqrt(std::max(cur_count, 1.0)) / nc +
          survival * std::sqrt(std::max(trans_count, 1.0)) / np;
      ++report.cells_checked;
      const double deficit = rhs_mass - lhs_mass;
      if (deficit > n_sigma_margin * stat) {
        ++report.violations;
        report.violating_cells.push_back(sc * vg.n_cells() + vc);
      }
      report.worst_deficit = std::max(report.worst_deficit, deficit);
    }
  }
  return report;
}

}  // namespace kinwall
