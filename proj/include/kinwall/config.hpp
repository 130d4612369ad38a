#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinwall/collision.hpp"
#include "kinwall/field.hpp"
#include "kinwall/geometry.hpp"
#include "kinwall/initial_law.hpp"
#include "kinwall/wall.hpp"
#include "kinwall/weights.hpp"

namespace kinwall {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::vector<std::string>& violations);
  std::vector<std::string> violations;
};

struct GeometryConfig {
  std::string shape = "disk";  // disk | ball | implicit
  double radius = 1.0;
  std::string preset = "superellipse4";
};

struct FieldConfig {
  std::string kind = "constant";  // constant | angular
  double base = 1.0;
  double amplitude = 0.0;
  int mode = 1;
};

struct WallConfig {
  std::string kind = "cl";  // cl | maxwell
  double r_perp = 1.0;
  double r_par = 1.0;
  FieldConfig beta;          // Maxwell accommodation field
  double beta0 = -1.0;       // <0: defaults to inf beta
  FieldConfig theta;
};

struct SigmaConfig {
  std::string kind = "constant";  // constant | hole | smooth
  double value = 1.0;             // sigma_0 / sigma_inf
  std::vector<double> hole_center = {0.0, 0.0, 0.0};
  double hole_radius = 1.0;
  double width = 0.25;
};

struct CollisionConfig {
  std::string kind = "bgk";  // bgk | linear_boltzmann | relaxation | none
  SigmaConfig sigma;
  double annulus_a = 1.0;
  double annulus_b = 2.0;
  std::string table_path;
  double delta_k = 0.25;
};

struct WeightsConfig {
  double alpha = 1.0;
  double delta = -1.0;  // <0: defaulted from delta_k and d
  double c4 = -1.0;     // derived; kept for the config echo
};

struct GridConfig {
  int n_r = 8;
  int n_phi = 8;
  int n_cos = 4;
  int n_axis = 16;           // Cartesian fallback
  std::string spatial = "";  // "", polar, spherical, cartesian
  int n_v = 16;
  double v_max = 6.0;
  int speed_bins = 512;
};

struct InitialConfig {
  std::string spatial = "uniform";  // uniform | ball | point(=ball r 0)
  std::vector<double> x_center = {0.0, 0.0, 0.0};
  double x_radius = 0.1;
  std::string velocity = "maxwellian";  // maxwellian | ball | point
  std::vector<double> v_center = {0.0, 0.0, 0.0};
  double v_radius = 0.1;
};

struct SimulationConfig {
  std::uint64_t n_particles = 100000;
  double t_end = 10.0;
  std::vector<double> snapshots;  // explicit; else generated by snapshot_dt
  double snapshot_dt = 1.0;
  std::uint64_t master_seed = 1;
  int workers = 1;
  GridConfig grid;
  InitialConfig initial;
};

struct ExperimentConfig {
  double relax_time = 20.0;
  double average_time = 20.0;
  double fit_window_lo = 5.0;
  double fit_window_hi = 1e30;
  std::string fit_mode = "exponential";  // exponential | polynomial
  std::vector<double> t_grid = {2.0, 5.0, 10.0, 20.0};
  double lambda = 15.0;
  std::vector<double> doeblin_T = {5.0, 10.0, 20.0};
  std::uint64_t starts_per_cell = 100000;
  double arrival_speed_lo = 0.15;
  double arrival_speed_hi = 2.0;
  double eps = 0.1;
  double counterexample_alpha = 1.0;
};

struct RunConfig {
  GeometryConfig geometry;
  WallConfig wall;
  CollisionConfig collision;
  WeightsConfig weights;
  SimulationConfig simulation;
  ExperimentConfig experiment;
  std::string output_dir = "out";
};

RunConfig config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

// resolved, validated model factories
DomainGeometry make_geometry(const RunConfig& cfg);
WallModel make_wall(const RunConfig& cfg);
std::optional<CollisionModel> make_collision(const RunConfig& cfg);
WeightSpec make_weight_spec(const RunConfig& cfg, const DomainGeometry& geom);
GridSpec make_grid(const RunConfig& cfg, const DomainGeometry& geom);
InitialLaw make_initial(const RunConfig& cfg);
std::vector<double> snapshot_schedule(const RunConfig& cfg);

// cross-field validation; returns every violation, empty when valid
std::vector<std::string> validate(const RunConfig& cfg);

}  // namespace kinwall
