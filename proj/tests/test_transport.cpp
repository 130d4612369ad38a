#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kinwall/stats.hpp"
#include "kinwall/transport.hpp"

using namespace kinwall;

namespace {

GridSpec disk_grid(const DomainGeometry& geom, int n_r = 6, int n_phi = 6,
                   int n_v = 8, double v_max = 6.0) {
  GridSpec g;
  g.spatial = SpatialGrid::polar(geom.bounding_radius(), n_r, n_phi);
  g.velocity = VelocityGrid(geom.dim(), n_v, v_max);
  g.speed_bins = 128;
  g.speed_max = v_max * 1.8;
  return g;
}

WeightSpec default_weights() {
  WeightSpec w;
  w.alpha = 1.0;
  w.delta = 0.1;
  w.c4 = 0.5;
  return w;
}

}  // namespace

TEST_CASE("pure drift without collisions") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::cercignani_lampis(
      1.0, 1.0, TemperatureField::constant(1.0));
  const ParticleTracker tracker(disk, &wall, nullptr);
  PhaseState s{vec2(0, 0), vec2(1, 0)};
  Rng rng(1, 0);
  EventCounts ev;
  CHECK(tracker.advance(s, 0.0, 0.5, rng, ev));
  CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.x[1] == doctest::Approx(0.0));
  CHECK(ev.wall_hits == 0);
  CHECK(ev.collisions == 0);
}

TEST_CASE("specular stub conserves speed over many bounces") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::maxwell(BoundaryField::constant(0.0), 0.0,
                                       TemperatureField::constant(1.0));
  const ParticleTracker tracker(disk, &wall, nullptr);
  Rng rng(2, 0);
  for (int i = 0; i < 200; ++i) {
    PhaseState s{vec2(0.1 * rng.normal(), 0.1 * rng.normal()),
                 vec2(rng.normal(), rng.normal())};
    const double speed0 = norm(s.v);
    if (speed0 < 0.3) continue;
    EventCounts ev;
    tracker.advance(s, 0.0, 50.0, rng, ev);
    CHECK(ev.wall_hits > 5);
    CHECK(std::fabs(norm(s.v) - speed0) < 1e-10);
    CHECK(norm(s.x) < 1.0 + 1e-9);
  }
}

TEST_CASE("collision counts are Poisson with the constant rate") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::cercignani_lampis(
      1.0, 1.0, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(1.0));
  const ParticleTracker tracker(disk, &wall, &coll);
  Rng master(3, 0);
  RunningMoments counts;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    Rng rng(3, i + 10);
    PhaseState s{disk.sample_interior(master),
                 vec2(master.normal(), master.normal())};
    EventCounts ev;
    tracker.advance(s, 0.0, 10.0, rng, ev);
    counts.add(static_cast<double>(ev.collisions));
  }
  CHECK(std::fabs(counts.mean() - 10.0) < 4.0 * counts.std_error());
}

TEST_CASE("inter-collision times are exponential at constant rate") {
  const auto coll = CollisionModel::bgk(RateField::constant(1.4));
  Rng rng(4, 0);
  std::vector<double> gaps;
  Vec x = vec2(0, 0);
  const Vec v = vec2(0.3, 0.1);
  for (int i = 0; i < 100000; ++i) {
    const auto ev = coll.next_collision(x, v, 1e9, rng);
    REQUIRE(ev);
    gaps.push_back(ev->time);
  }
  const double d = ks_statistic(
      gaps, [&](double t) { return 1.0 - std::exp(-1.4 * t); });
  CHECK(ks_p_value(d, gaps.size()) > 0.01);
}

TEST_CASE("ensemble: mass conservation, determinism across worker counts") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::cercignani_lampis(
      0.5, 0.5, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(1.0));
  EnsembleOptions opts;
  opts.n_particles = 20000;
  opts.master_seed = 77;
  opts.grid = disk_grid(disk);
  opts.weights = default_weights();
  opts.snapshot_times = {0.0, 0.7, 2.0};
  opts.block_size = 1024;

  opts.workers = 1;
  const auto r1 = simulate_ensemble(disk, &wall, &coll,
                                    InitialLaw::uniform_maxwellian(), opts);
  opts.workers = 8;
  const auto r8 = simulate_ensemble(disk, &wall, &coll,
                                    InitialLaw::uniform_maxwellian(), opts);

  for (std::size_t k = 0; k < r1.fields.size(); ++k) {
    CHECK(r1.fields[k].n_deposits() == opts.n_particles);
    CHECK(r8.fields[k].n_deposits() == opts.n_particles);
    CHECK(r1.fields[k].counts() == r8.fields[k].counts());
    CHECK(r1.fields[k].speed_counts() == r8.fields[k].speed_counts());
    // bit-identical floating accumulators
    CHECK(r1.fields[k].deposit_stats.w_alpha_sum ==
          r8.fields[k].deposit_stats.w_alpha_sum);
    CHECK(r1.fields[k].deposit_stats.w_alpha_m1_sum ==
          r8.fields[k].deposit_stats.w_alpha_m1_sum);
    CHECK(r1.fields[k].flux_stats.abs_flux ==
          r8.fields[k].flux_stats.abs_flux);
    CHECK(r1.fields[k].flux_stats.hits == r8.fields[k].flux_stats.hits);
  }
  CHECK(r1.events.collisions == r8.events.collisions);
  CHECK(r1.events.wall_hits == r8.events.wall_hits);
}

TEST_CASE("positivity and the L1 contraction budget between two ensembles") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::cercignani_lampis(
      0.8, 0.9, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(1.0));
  EnsembleOptions opts;
  opts.n_particles = 50000;
  opts.master_seed = 5;
  opts.workers = 2;
  opts.grid = disk_grid(disk);
  opts.weights = default_weights();
  opts.snapshot_times = {0.0, 5.0};

  const auto rf = simulate_ensemble(disk, &wall, &coll,
                                    InitialLaw::uniform_maxwellian(), opts);
  EnsembleOptions opts2 = opts;
  opts2.stream_salt = 99;
  const auto rg = simulate_ensemble(
      disk, &wall, &coll,
      InitialLaw::spatial_ball(vec2(0.2, 0.0), 0.3,
                               InitialLaw::Velocity::UniformBall,
                               vec2(0.0, 0.0), 0.8),
      opts2);

  const auto d0 = l1_distance(rf.fields[0], rg.fields[0]);
  const auto dt = l1_distance(rf.fields[1], rg.fields[1]);
  CHECK(dt.value <= d0.value + 4.0 * (d0.stat_floor + dt.stat_floor));
}

TEST_CASE("weight-base transport identity along logged free flights") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::cercignani_lampis(
      0.5, 0.5, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(1.0));
  const ParticleTracker tracker(disk, &wall, &coll);
  const WeightSpec spec = default_weights();
  Rng master(6, 0);
  int segments = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(6, i + 1);
    PhaseState s{disk.sample_interior(master),
                 vec2(master.normal(), master.normal())};
    EventCounts ev;
    std::vector<FlightSegment> log;
    tracker.advance(s, 0.0, 5.0, rng, ev, nullptr, &log);
    for (const auto& seg : log) {
      if (norm(seg.v) < 1e-6 || seg.dt <= 0.0) continue;
      const double b0 = weight_base(disk, seg.x0, seg.v, spec);
      const double b1 =
          weight_base(disk, seg.x0 + seg.dt * seg.v, seg.v, spec);
      CHECK(std::fabs((b0 - b1) - seg.dt) < 1e-10 * std::max(1.0, seg.dt));
      ++segments;
    }
  }
  CHECK(segments > 500);
}

TEST_CASE("killed transport: explicit solution") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto law = InitialLaw::f_epsilon(0.2);
  // sigma = 0: pure transport of the initial density
  const auto free_coll = CollisionModel::bgk(RateField::constant(0.0));
  const Vec x = vec2(0.15, 0.02), v = vec2(0.1, 0.0);
  const double f0 = law.density(disk, x - 1.0 * v, v);
  CHECK(f0 > 0.0);
  CHECK(killed_transport_exact(disk, free_coll, law, 1.0, x, v) ==
        doctest::Approx(f0).epsilon(1e-12));

  // constant sigma: e^{-sigma t} factor
  const auto coll = CollisionModel::bgk(RateField::constant(0.6));
  CHECK(killed_transport_exact(disk, coll, law, 1.0, x, v) ==
        doctest::Approx(std::exp(-0.6) * f0).epsilon(1e-12));

  // absorbed once the backward ray leaves the domain
  const Vec fast = vec2(3.0, 0.0);
  CHECK(killed_transport_exact(disk, coll, law, 1.0, x, fast) == 0.0);
}

TEST_CASE("killed survival mass: quadrature equals the closed form, MC agrees") {
  const auto disk = DomainGeometry::disk(1.0);
  const double eps = 0.1, sigma = 0.8, t = 2.0;
  const auto law = InitialLaw::f_epsilon(eps);
  const auto coll = CollisionModel::bgk(RateField::constant(sigma));
  // support cannot reach the wall by t = 2 (max travel 0.2 from |x| <= 0.1),
  // so the survival mass is exactly e^{-sigma t}
  const auto quad = killed_survival_mass(disk, coll, law, t, 32);
  CHECK(quad.mass == doctest::Approx(std::exp(-sigma * t)).epsilon(1e-9));

  EnsembleOptions opts;
  opts.n_particles = 100000;
  opts.master_seed = 8;
  opts.workers = 2;
  opts.grid = disk_grid(disk);
  opts.weights = default_weights();
  opts.snapshot_times = {t};
  opts.transport.absorbing_wall = true;
  opts.transport.kill_on_collision = true;
  const auto run = simulate_ensemble(disk, nullptr, &coll, law, opts);
  // dead particles deposit nothing; survivors carry the mass
  const double p_emp =
      static_cast<double>(run.fields[0].n_deposits()) / opts.n_particles;
  const double se = std::sqrt(quad.mass * (1.0 - quad.mass) /
                              static_cast<double>(opts.n_particles));
  CHECK(std::fabs(p_emp - quad.mass) < 4.0 * se);
}

TEST_CASE("duhamel lower bound: exact transport self-test and corruption flag") {
  const auto disk = DomainGeometry::disk(4.0);
  const auto wall = WallModel::cercignani_lampis(
      1.0, 1.0, TemperatureField::constant(1.0));
  GridSpec grid;
  grid.spatial = SpatialGrid::cartesian(disk, 16);  // h = 0.5
  grid.velocity = VelocityGrid(2, 12, 6.0);         // centers at half-integers
  grid.speed_bins = 64;
  grid.speed_max = 11.0;

  // velocity point mass at a cell center whose drift is grid-aligned
  const Vec v0 = vec2(1.5, 0.5);
  EnsembleOptions opts;
  opts.n_particles = 40000;
  opts.master_seed = 9;
  opts.workers = 2;
  opts.grid = grid;
  opts.weights = default_weights();
  opts.snapshot_times = {0.0, 1.0};  // shift = (1.5, 0.5) = (3, 1) cells
  const auto law = InitialLaw::spatial_ball(vec2(-1.0, 0.0), 0.8,
                                            InitialLaw::Velocity::Point, v0,
                                            0.0);
  const auto run = simulate_ensemble(disk, &wall, nullptr, law, opts);

  auto check = duhamel_lower_bound_check(run.fields[0], run.fields[1], 1.0,
                                         0.0, disk, 4.0);
  CHECK(check.cells_checked > 100);
  CHECK(check.violations == 0);
  CHECK(check.worst_deficit <= 0.0);  // exact reappearance

  // corrupting one populated arrival cell by -20% must be flagged
  EmpiricalField corrupted = run.fields[1];
  int target = -1;
  for (int c = 0; c < grid.n_cells(); ++c)
    if (corrupted.counts()[c] > 2000) target = c;
  REQUIRE(target >= 0);
  corrupted.mutable_counts()[target] =
      static_cast<std::uint32_t>(corrupted.counts()[target] * 0.8);
  auto flagged = duhamel_lower_bound_check(run.fields[0], corrupted, 1.0, 0.0,
                                           disk, 4.0);
  CHECK(flagged.violations >= 1);
  bool found = false;
  for (int c : flagged.violating_cells) found = found || (c == target);
  CHECK(found);
}

TEST_CASE("duhamel lower bound holds with collisions (gain surplus)") {
  const auto disk = DomainGeometry::disk(4.0);
  const auto wall = WallModel::cercignani_lampis(
      1.0, 1.0, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(0.7));
  GridSpec grid;
  grid.spatial = SpatialGrid::cartesian(disk, 16);
  grid.velocity = VelocityGrid(2, 12, 6.0);
  grid.speed_bins = 64;
  grid.speed_max = 11.0;
  EnsembleOptions opts;
  opts.n_particles = 60000;
  opts.master_seed = 10;
  opts.workers = 2;
  opts.grid = grid;
  opts.weights = default_weights();
  opts.snapshot_times = {0.0, 1.0};
  const auto law = InitialLaw::spatial_ball(vec2(-1.0, 0.0), 0.8,
                                            InitialLaw::Velocity::Point,
                                            vec2(1.5, 0.5), 0.0);
  const auto run = simulate_ensemble(disk, &wall, &coll, law, opts);
  const auto check = duhamel_lower_bound_check(
      run.fields[0], run.fields[1], 1.0, coll.sigma_max(), disk, 4.0);
  CHECK(check.cells_checked > 100);
  CHECK(check.violations == 0);
}

TEST_CASE("implicit domain end to end on a Cartesian clipped grid") {
  const auto imp = DomainGeometry::implicit2d("superellipse4");
  const auto wall = WallModel::cercignani_lampis(
      0.6, 0.9, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(0.5));
  GridSpec grid;
  grid.spatial = SpatialGrid::cartesian(imp, 10);
  grid.velocity = VelocityGrid(2, 8, 6.0);
  grid.speed_bins = 128;
  grid.speed_max = 11.0;
  EnsembleOptions opts;
  opts.n_particles = 20000;
  opts.master_seed = 505;
  opts.workers = 2;
  opts.grid = grid;
  WeightSpec w;
  w.alpha = 1.0;
  w.delta = 0.1;
  w.c4 = 0.5;
  opts.weights = w;
  opts.snapshot_times = {0.0, 8.0};
  const auto run = simulate_ensemble(imp, &wall, &coll,
                                     InitialLaw::uniform_maxwellian(), opts);
  CHECK(run.fields[1].n_deposits() == opts.n_particles);
  CHECK(run.events.wall_hits > 0);
  // deposits only land in cells with positive clipped area
  const int nv = grid.velocity.n_cells();
  for (int c = 0; c < grid.n_cells(); ++c) {
    if (run.fields[1].counts()[c] == 0) continue;
    CHECK(grid.spatial.volume(c / nv) > 0.0);
  }
  // clipped cell areas sum to the domain area
  double total = 0.0;
  for (int sc = 0; sc < grid.spatial.n_cells(); ++sc)
    total += grid.spatial.volume(sc);
  CHECK(total == doctest::Approx(imp.volume()).epsilon(0.01));
}

TEST_CASE("three-dimensional ball: conservation and the Maxwell speed law") {
  const auto ball = DomainGeometry::ball(1.0);
  const auto wall = WallModel::cercignani_lampis(
      0.7, 0.8, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(1.0));
  GridSpec grid;
  grid.spatial = SpatialGrid::spherical(1.0, 4, 3, 4);
  grid.velocity = VelocityGrid(3, 6, 6.0);
  grid.speed_bins = 256;
  grid.speed_max = 11.0;
  EnsembleOptions opts;
  opts.n_particles = 40000;
  opts.master_seed = 404;
  opts.workers = 2;
  opts.grid = grid;
  WeightSpec w;
  w.alpha = 1.0;
  w.delta = 0.05;  // < delta_k / 3
  w.c4 = 0.5;
  opts.weights = w;
  opts.snapshot_times = {0.0, 15.0};
  const auto run = simulate_ensemble(ball, &wall, &coll,
                                     InitialLaw::uniform_maxwellian(), opts);
  CHECK(run.fields[1].n_deposits() == opts.n_particles);
  CHECK(run.events.wall_hits > 0);
  // 3-d Maxwell speed law: F(s) = erf(s/sqrt(2)) - sqrt(2/pi) s e^{-s^2/2}
  double worst = 0.0;
  for (int e = 0; e <= grid.speed_bins; e += 8) {
    const double s = grid.speed_max * e / grid.speed_bins;
    const double ref = std::erf(s / std::sqrt(2.0)) -
                       std::sqrt(2.0 / 3.14159265358979323846) * s *
                           std::exp(-0.5 * s * s);
    worst = std::max(worst, std::fabs(run.fields[1].speed_cdf(e) - ref));
  }
  CHECK(worst < 0.02);
}

TEST_CASE("zero-velocity particles dwell in place but still collide") {
  const auto disk = DomainGeometry::disk(1.0);
  const auto wall = WallModel::cercignani_lampis(
      1.0, 1.0, TemperatureField::constant(1.0));
  const auto coll = CollisionModel::bgk(RateField::constant(2.0));
  const ParticleTracker tracker(disk, &wall, &coll);
  Rng rng(11, 0);
  PhaseState s{vec2(0.3, 0.1), Vec{}};
  EventCounts ev;
  tracker.advance(s, 0.0, 10.0, rng, ev);
  CHECK(ev.collisions > 0);  // the clock rings and the particle jumps
  // without collisions it stays forever
  const ParticleTracker free_tracker(disk, &wall, nullptr);
  PhaseState s2{vec2(0.3, 0.1), Vec{}};
  EventCounts ev2;
  free_tracker.advance(s2, 0.0, 10.0, rng, ev2);
  CHECK(s2.x[0] == 0.3);
  CHECK(ev2.wall_hits == 0);
}
