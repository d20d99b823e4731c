#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "greenlab/coeff.hpp"
#include "greenlab/sparse.hpp"

namespace greenlab {

/// A field written as `family[:p1:p2...]`, e.g. `nonsym_skew:0.3:0:0.5`.
struct FieldSpec {
  Family family = Family::identity;
  std::vector<double> params;

  PeriodicField make(int dim) const;
  std::string label() const;
  bool operator==(const FieldSpec&) const = default;
};

FieldSpec parse_field_spec(std::string_view text);

enum class Experiment { solve, decay, lorentz, lift, monotone, adjoint, uniform };
std::string_view to_string(Experiment e);
std::vector<Experiment> parse_experiments(std::string_view text);

/// Everything a run needs. Grids for single-domain experiments are given per
/// dimension (half-width and node count); nested-domain experiments use
/// `half_widths` with a fixed spacing per dimension.
struct ExperimentConfig {
  std::string name = "custom";
  std::vector<Experiment> experiments{Experiment::solve};
  std::vector<int> dims{2};
  std::vector<FieldSpec> fields{FieldSpec{}};

  double half_width_2d = 4.0;
  int nodes_2d = 129;
  double half_width_3d = 2.0;
  int nodes_3d = 65;
  std::vector<double> half_widths{1.0, 2.0, 4.0};
  double spacing_2d = 1.0 / 16;
  double spacing_3d = 1.0 / 8;
  std::vector<Point> sources{Point{}};

  // Decay fits.
  std::vector<std::string> quantities{"G"};
  double window_cap_2d = 0.5;  // upper end of log-growth fits (normalized columns)
  int radii_count = 8;
  double eta = 0.1;
  double expected_exponent_shift = 0.0;  // added to every expected exponent
  double exponent_tol = 0.1;
  double gradient_tol = 0.15;
  double mixed_tol = 0.2;
  double log_residual_tol = 0.1;
  double log_slope_tol = 0.15;

  // Ratio checks.
  std::vector<double> ratio_radii{0.25, 0.5, 1.0};
  std::vector<Point> ratio_points{Point{1.5, 0.0, 0.0}};
  double ratio_variation = 4.0;
  double analytic_radius = 0.5;
  Point analytic_point{0.75, 0.0, 0.0};
  double analytic_tol = 0.15;

  // Domain growth and uniformity.
  double monotone_tol = 1e-10;
  double drift_tol = 0.1;
  double uniform_tol = 0.25;

  // Oracle and adjoint comparisons.
  double oracle_tol = 1e-8;
  double adjoint_tol = 1e-8;
  int max_columns = 400;  // columns compared per system; sampled beyond this

  // Lorentz suite.
  int lorentz_trials = 1000;
  int lorentz_size = 100;
  int lorentz_nodes = 257;
  double lorentz_tol = 0.02;

  // Lifting.
  double kappa_factor = 4.0;
  double lift_tol_constant = 0.15;
  double lift_tol_variable = 0.2;
  double lift_exponent_tol = 0.2;

  SolverSettings solver{};
  std::uint64_t seed = 20240101;
  int threads = 0;
  std::string out = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys and malformed values throw ConfigError. Keys not given keep the
/// values already in `base`.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Applies `key=value` overrides in order.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Every key in canonical order; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& cfg);
std::map<std::string, std::string> to_map(const ExperimentConfig& cfg);

/// Range checks on every parameter; throws ConfigError.
void validate(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ExperimentConfig preset(std::string_view name);

}  // namespace greenlab
