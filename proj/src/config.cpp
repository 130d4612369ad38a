#include "kinwall/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace kinwall {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i)
    os << (i ? "; " : "") << parts[i];
  return os.str();
}

Vec to_vec(const std::vector<double>& v) {
  Vec r{};
  for (std::size_t a = 0; a < v.size() && a < 3; ++a) r[a] = v[a];
  return r;
}

template <typename T>
void get_if(const nlohmann::ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

FieldConfig field_from_json(const nlohmann::ordered_json& j) {
  FieldConfig f;
  get_if(j, "kind", f.kind);
  get_if(j, "base", f.base);
  get_if(j, "amplitude", f.amplitude);
  get_if(j, "mode", f.mode);
  return f;
}

nlohmann::ordered_json field_to_json(const FieldConfig& f) {
  nlohmann::ordered_json j;
  j["kind"] = f.kind;
  j["base"] = f.base;
  j["amplitude"] = f.amplitude;
  j["mode"] = f.mode;
  return j;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& v)
    : std::runtime_error("invalid configuration: " + join(v)), violations(v) {}

RunConfig config_from_json(const nlohmann::ordered_json& j) {
  RunConfig c;
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    get_if(g, "shape", c.geometry.shape);
    get_if(g, "radius", c.geometry.radius);
    get_if(g, "preset", c.geometry.preset);
  }
  if (j.contains("wall")) {
    const auto& w = j.at("wall");
    get_if(w, "kind", c.wall.kind);
    get_if(w, "r_perp", c.wall.r_perp);
    get_if(w, "r_par", c.wall.r_par);
    get_if(w, "beta0", c.wall.beta0);
    if (w.contains("beta")) {
      if (w.at("beta").is_number())
        c.wall.beta.base = w.at("beta").get<double>();
      else
        c.wall.beta = field_from_json(w.at("beta"));
    }
    if (w.contains("theta")) c.wall.theta = field_from_json(w.at("theta"));
  }
  if (j.contains("collision")) {
    const auto& k = j.at("collision");
    get_if(k, "kind", c.collision.kind);
    get_if(k, "delta_k", c.collision.delta_k);
    get_if(k, "table_path", c.collision.table_path);
    if (k.contains("sigma")) {
      const auto& s = k.at("sigma");
      get_if(s, "kind", c.collision.sigma.kind);
      get_if(s, "value", c.collision.sigma.value);
      get_if(s, "hole_center", c.collision.sigma.hole_center);
      get_if(s, "hole_radius", c.collision.sigma.hole_radius);
      get_if(s, "width", c.collision.sigma.width);
    }
    if (k.contains("annulus")) {
      get_if(k.at("annulus"), "a", c.collision.annulus_a);
      get_if(k.at("annulus"), "b", c.collision.annulus_b);
    }
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    get_if(w, "alpha", c.weights.alpha);
    get_if(w, "delta", c.weights.delta);
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    get_if(s, "n_particles", c.simulation.n_particles);
    get_if(s, "t_end", c.simulation.t_end);
    get_if(s, "snapshots", c.simulation.snapshots);
    get_if(s, "snapshot_dt", c.simulation.snapshot_dt);
    get_if(s, "master_seed", c.simulation.master_seed);
    get_if(s, "workers", c.simulation.workers);
    if (s.contains("grid")) {
      const auto& g = s.at("grid");
      get_if(g, "spatial", c.simulation.grid.spatial);
      get_if(g, "n_r", c.simulation.grid.n_r);
      get_if(g, "n_phi", c.simulation.grid.n_phi);
      get_if(g, "n_cos", c.simulation.grid.n_cos);
      get_if(g, "n_axis", c.simulation.grid.n_axis);
      get_if(g, "n_v", c.simulation.grid.n_v);
      get_if(g, "v_max", c.simulation.grid.v_max);
      get_if(g, "speed_bins", c.simulation.grid.speed_bins);
    }
    if (s.contains("initial")) {
      const auto& in = s.at("initial");
      get_if(in, "spatial", c.simulation.initial.spatial);
      get_if(in, "x_center", c.simulation.initial.x_center);
      get_if(in, "x_radius", c.simulation.initial.x_radius);
      get_if(in, "velocity", c.simulation.initial.velocity);
      get_if(in, "v_center", c.simulation.initial.v_center);
      get_if(in, "v_radius", c.simulation.initial.v_radius);
    }
  }
  if (j.contains("experiment")) {
    const auto& e = j.at("experiment");
    get_if(e, "relax_time", c.experiment.relax_time);
    get_if(e, "average_time", c.experiment.average_time);
    get_if(e, "fit_window_lo", c.experiment.fit_window_lo);
    get_if(e, "fit_window_hi", c.experiment.fit_window_hi);
    get_if(e, "fit_mode", c.experiment.fit_mode);
    get_if(e, "t_grid", c.experiment.t_grid);
    get_if(e, "lambda", c.experiment.lambda);
    get_if(e, "doeblin_T", c.experiment.doeblin_T);
    get_if(e, "starts_per_cell", c.experiment.starts_per_cell);
    get_if(e, "arrival_speed_lo", c.experiment.arrival_speed_lo);
    get_if(e, "arrival_speed_hi", c.experiment.arrival_speed_hi);
    get_if(e, "eps", c.experiment.eps);
    get_if(e, "counterexample_alpha", c.experiment.counterexample_alpha);
  }
  get_if(j, "output_dir", c.output_dir);

  const auto violations = validate(c);
  if (!violations.empty()) throw ConfigError(violations);
  return c;
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["geometry"] = {{"shape", c.geometry.shape},
                   {"radius", c.geometry.radius},
                   {"preset", c.geometry.preset}};
  nlohmann::ordered_json w;
  w["kind"] = c.wall.kind;
  w["r_perp"] = c.wall.r_perp;
  w["r_par"] = c.wall.r_par;
  w["beta"] = field_to_json(c.wall.beta);
  w["beta0"] = c.wall.beta0;
  w["theta"] = field_to_json(c.wall.theta);
  j["wall"] = w;
  nlohmann::ordered_json k;
  k["kind"] = c.collision.kind;
  k["sigma"] = {{"kind", c.collision.sigma.kind},
                {"value", c.collision.sigma.value},
                {"hole_center", c.collision.sigma.hole_center},
                {"hole_radius", c.collision.sigma.hole_radius},
                {"width", c.collision.sigma.width}};
  k["annulus"] = {{"a", c.collision.annulus_a}, {"b", c.collision.annulus_b}};
  k["table_path"] = c.collision.table_path;
  k["delta_k"] = c.collision.delta_k;
  j["collision"] = k;
  j["weights"] = {{"alpha", c.weights.alpha}, {"delta", c.weights.delta}};
  nlohmann::ordered_json s;
  s["n_particles"] = c.simulation.n_particles;
  s["t_end"] = c.simulation.t_end;
  s["snapshots"] = c.simulation.snapshots;
  s["snapshot_dt"] = c.simulation.snapshot_dt;
  s["master_seed"] = c.simulation.master_seed;
  s["workers"] = c.simulation.workers;
  s["grid"] = {{"spatial", c.simulation.grid.spatial},
               {"n_r", c.simulation.grid.n_r},
               {"n_phi", c.simulation.grid.n_phi},
               {"n_cos", c.simulation.grid.n_cos},
               {"n_axis", c.simulation.grid.n_axis},
               {"n_v", c.simulation.grid.n_v},
               {"v_max", c.simulation.grid.v_max},
               {"speed_bins", c.simulation.grid.speed_bins}};
  s["initial"] = {{"spatial", c.simulation.initial.spatial},
                  {"x_center", c.simulation.initial.x_center},
                  {"x_radius", c.simulation.initial.x_radius},
                  {"velocity", c.simulation.initial.velocity},
                  {"v_center", c.simulation.initial.v_center},
                  {"v_radius", c.simulation.initial.v_radius}};
  j["simulation"] = s;
  nlohmann::ordered_json e;
  e["relax_time"] = c.experiment.relax_time;
  e["average_time"] = c.experiment.average_time;
  e["fit_window_lo"] = c.experiment.fit_window_lo;
  e["fit_window_hi"] = c.experiment.fit_window_hi;
  e["fit_mode"] = c.experiment.fit_mode;
  e["t_grid"] = c.experiment.t_grid;
  e["lambda"] = c.experiment.lambda;
  e["doeblin_T"] = c.experiment.doeblin_T;
  e["starts_per_cell"] = c.experiment.starts_per_cell;
  e["arrival_speed_lo"] = c.experiment.arrival_speed_lo;
  e["arrival_speed_hi"] = c.experiment.arrival_speed_hi;
  e["eps"] = c.experiment.eps;
  e["counterexample_alpha"] = c.experiment.counterexample_alpha;
  j["experiment"] = e;
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::ordered_json j;
  in >> j;
  return config_from_json(j);
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> v;
  const int d = (c.geometry.shape == "ball") ? 3 : 2;

  if (c.geometry.shape != "disk" && c.geometry.shape != "ball" &&
      c.geometry.shape != "implicit")
    v.push_back("geometry.shape must be disk, ball or implicit");
  if (!(c.geometry.radius > 0.0)) v.push_back("geometry.radius must be > 0");

  if (c.wall.kind == "cl") {
    if (!(c.wall.r_perp > 0.0 && c.wall.r_perp <= 1.0))
      v.push_back("wall.r_perp must lie in (0,1]");
    if (!(c.wall.r_par > 0.0 && c.wall.r_par < 2.0))
      v.push_back("wall.r_par must lie in (0,2), open at both ends");
  } else if (c.wall.kind == "maxwell") {
    const double bmin = c.wall.beta.base * (1.0 - std::fabs(c.wall.beta.amplitude));
    const double bmax = c.wall.beta.base * (1.0 + std::fabs(c.wall.beta.amplitude));
    if (!(bmin > 0.0 && bmax <= 1.0))
      v.push_back("wall.beta must take values in (0,1]");
    const double beta0 = c.wall.beta0 < 0.0 ? bmin : c.wall.beta0;
    if (!(beta0 > 0.0 && beta0 <= 1.0))
      v.push_back("wall.beta0 must lie in (0,1]");
    if (beta0 > bmin + 1e-12)
      v.push_back("wall.beta0 must not exceed inf beta");
  } else {
    v.push_back("wall.kind must be cl or maxwell");
  }
  if (!(c.wall.theta.base > 0.0) ||
      !(c.wall.theta.base * (1.0 - std::fabs(c.wall.theta.amplitude)) > 0.0))
    v.push_back("wall.theta must stay positive and continuous");

  if (c.collision.kind != "bgk" && c.collision.kind != "linear_boltzmann" &&
      c.collision.kind != "relaxation" && c.collision.kind != "none")
    v.push_back("collision.kind must be bgk, linear_boltzmann, relaxation or none");
  if (!(c.collision.sigma.value >= 0.0))
    v.push_back("collision.sigma.value must be >= 0");
  if (c.collision.sigma.kind != "constant" &&
      c.collision.sigma.kind != "hole" && c.collision.sigma.kind != "smooth")
    v.push_back("collision.sigma.kind must be constant, hole or smooth");
  if (!(c.collision.delta_k > 0.0 && c.collision.delta_k < 0.5))
    v.push_back("collision.delta_k must lie in (0, 1/2)");
  if (c.collision.kind == "linear_boltzmann" &&
      !(c.collision.annulus_a >= 0.0 &&
        c.collision.annulus_b > c.collision.annulus_a))
    v.push_back("collision.annulus needs 0 <= a < b");
  if (c.collision.kind == "relaxation" && c.collision.table_path.empty())
    v.push_back("collision.table_path required for the relaxation preset");

  if (!(c.weights.alpha > 0.0 && c.weights.alpha < d))
    v.push_back("weights.alpha must lie in (0,d)");
  if (c.weights.delta >= 0.0 &&
      !(c.weights.delta > 0.0 && c.weights.delta < c.collision.delta_k / d))
    v.push_back("weights.delta must lie in (0, delta_k/d)");

  if (c.simulation.n_particles < 1)
    v.push_back("simulation.n_particles must be >= 1");
  if (!(c.simulation.t_end >= 0.0))
    v.push_back("simulation.t_end must be >= 0");
  if (!c.simulation.snapshots.empty()) {
    double prev = -1.0;
    for (double t : c.simulation.snapshots) {
      if (t < prev) v.push_back("simulation.snapshots must be sorted");
      if (t < 0.0 || t > c.simulation.t_end)
        v.push_back("simulation.snapshots must lie in [0, t_end]");
      prev = t;
    }
  } else if (!(c.simulation.snapshot_dt > 0.0)) {
    v.push_back("simulation.snapshot_dt must be > 0");
  }
  if (c.simulation.workers < 1) v.push_back("simulation.workers must be >= 1");
  if (!(c.simulation.grid.v_max > 0.0))
    v.push_back("simulation.grid.v_max must be > 0");

  if (c.simulation.initial.spatial != "uniform" &&
      c.simulation.initial.spatial != "ball" &&
      c.simulation.initial.spatial != "point")
    v.push_back("simulation.initial.spatial must be uniform, ball or point");
  if (c.simulation.initial.velocity != "maxwellian" &&
      c.simulation.initial.velocity != "ball" &&
      c.simulation.initial.velocity != "point")
    v.push_back("simulation.initial.velocity must be maxwellian, ball or point");

  return v;
}

DomainGeometry make_geometry(const RunConfig& c) {
  if (c.geometry.shape == "disk") return DomainGeometry::disk(c.geometry.radius);
  if (c.geometry.shape == "ball") return DomainGeometry::ball(c.geometry.radius);
  return DomainGeometry::implicit2d(c.geometry.preset);
}

WallModel make_wall(const RunConfig& c) {
  TemperatureField theta =
      c.wall.theta.kind == "angular"
          ? TemperatureField::angular(c.wall.theta.base, c.wall.theta.amplitude,
                                      c.wall.theta.mode)
          : TemperatureField::constant(c.wall.theta.base);
  if (c.wall.kind == "cl")
    return WallModel::cercignani_lampis(c.wall.r_perp, c.wall.r_par, theta);
  BoundaryField beta =
      c.wall.beta.kind == "angular"
          ? BoundaryField::angular(c.wall.beta.base, c.wall.beta.amplitude,
                                   c.wall.beta.mode)
          : BoundaryField::constant(c.wall.beta.base);
  const double beta0 = c.wall.beta0 < 0.0 ? beta.min_value() : c.wall.beta0;
  return WallModel::maxwell(beta, beta0, theta);
}

std::optional<CollisionModel> make_collision(const RunConfig& c) {
  if (c.collision.kind == "none") return std::nullopt;
  RateField rate = RateField::constant(c.collision.sigma.value);
  if (c.collision.sigma.kind == "hole")
    rate = RateField::hole(c.collision.sigma.value,
                           to_vec(c.collision.sigma.hole_center),
                           c.collision.sigma.hole_radius);
  else if (c.collision.sigma.kind == "smooth")
    rate = RateField::smooth_hole(c.collision.sigma.value,
                                  to_vec(c.collision.sigma.hole_center),
                                  c.collision.sigma.hole_radius,
                                  c.collision.sigma.width);
  const int d = (c.geometry.shape == "ball") ? 3 : 2;
  CollisionModel model = [&] {
    if (c.collision.kind == "bgk") return CollisionModel::bgk(rate);
    if (c.collision.kind == "linear_boltzmann")
      return CollisionModel::annulus(rate, c.collision.annulus_a,
                                     c.collision.annulus_b);
    auto table = std::make_shared<RelaxationTable>(
        RelaxationTable::load_csv(c.collision.table_path));
    return CollisionModel::relaxation(std::move(table));
  }();
  model.certify_moment_bound(c.collision.delta_k, d);
  return model;
}

WeightSpec make_weight_spec(const RunConfig& c, const DomainGeometry& geom) {
  WeightSpec spec;
  spec.alpha = c.weights.alpha;
  const int d = geom.dim();
  spec.delta = c.weights.delta > 0.0
                   ? c.weights.delta
                   : std::min(0.1, 0.8 * c.collision.delta_k / d);
  if (c.wall.kind == "maxwell") {
    const double bmin =
        c.wall.beta.base * (1.0 - std::fabs(c.wall.beta.amplitude));
    const double beta0 = c.wall.beta0 < 0.0 ? bmin : c.wall.beta0;
    spec.c4 = c4_for_maxwell(beta0);
  } else {
    spec.c4 = 0.5;
  }
  return spec;
}

GridSpec make_grid(const RunConfig& c, const DomainGeometry& geom) {
  GridSpec g;
  std::string kind = c.simulation.grid.spatial;
  if (kind.empty()) {
    switch (geom.kind()) {
      case ShapeKind::Disk2D: kind = "polar"; break;
      case ShapeKind::Ball3D: kind = "spherical"; break;
      case ShapeKind::Implicit2D: kind = "cartesian"; break;
    }
  }
  if (kind == "polar")
    g.spatial = SpatialGrid::polar(geom.bounding_radius(),
                                   c.simulation.grid.n_r,
                                   c.simulation.grid.n_phi);
  else if (kind == "spherical")
    g.spatial = SpatialGrid::spherical(geom.bounding_radius(),
                                       c.simulation.grid.n_r,
                                       c.simulation.grid.n_cos,
                                       c.simulation.grid.n_phi);
  else
    g.spatial = SpatialGrid::cartesian(geom, c.simulation.grid.n_axis);
  g.velocity =
      VelocityGrid(geom.dim(), c.simulation.grid.n_v, c.simulation.grid.v_max);
  g.speed_bins = c.simulation.grid.speed_bins;
  g.speed_max = c.simulation.grid.v_max * std::sqrt(3.0);
  return g;
}

InitialLaw make_initial(const RunConfig& c) {
  InitialLaw law;
  const auto& in = c.simulation.initial;
  if (in.spatial == "uniform") {
    law.spatial = InitialLaw::Spatial::UniformDomain;
  } else if (in.spatial == "ball") {
    law.spatial = InitialLaw::Spatial::UniformBall;
    law.x_center = to_vec(in.x_center);
    law.x_radius = in.x_radius;
  } else {
    law.spatial = InitialLaw::Spatial::Point;
    law.x_center = to_vec(in.x_center);
  }
  if (in.velocity == "maxwellian") {
    law.velocity = InitialLaw::Velocity::Maxwellian;
  } else if (in.velocity == "ball") {
    law.velocity = InitialLaw::Velocity::UniformBall;
    law.v_center = to_vec(in.v_center);
    law.v_radius = in.v_radius;
  } else {
    law.velocity = InitialLaw::Velocity::Point;
    law.v_center = to_vec(in.v_center);
  }
  return law;
}

std::vector<double> snapshot_schedule(const RunConfig& c) {
  if (!c.simulation.snapshots.empty()) return c.simulation.snapshots;
  std::vector<double> times;
  const double dt = c.simulation.snapshot_dt;
  for (double t = 0.0; t < c.simulation.t_end + 0.5 * dt; t += dt)
    times.push_back(std::min(t, c.simulation.t_end));
  if (times.back() < c.simulation.t_end)
    times.push_back(c.simulation.t_end);
  return times;
}

}  // namespace kinwall
