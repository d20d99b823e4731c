#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "greenlab/green.hpp"
#include "greenlab/grid.hpp"
#include "greenlab/sparse.hpp"

namespace greenlab {

enum class Quantity { G, grad_x, grad_y, mixed };
std::string_view to_string(Quantity q);

struct FitWindow {
  double r_min = 0.0;
  double r_max = 0.0;

  bool contains(double r) const;
};

/// [4h, R/4], R the smallest half-width of the grid.
FitWindow default_window(const BoxGrid& grid);

/// `count` radii spaced geometrically from r_min to r_max inclusive.
std::vector<double> geometric_radii(const FitWindow& w, int count);
/// r_min * 2^j for all j with r_min * 2^j <= r_max.
std::vector<double> dyadic_radii(double r_min, double r_max);

struct AnnulusSpec {
  Point center{};
  double eta = 0.1;  // relative shell half-thickness
  std::vector<double> radii;
};

/// Mean of |values| over the nodes in each shell r(1 - eta) <= |x - c| <= r(1 + eta).
/// Throws PreconditionError if a shell holds fewer than 8 nodes.
std::vector<double> annulus_average(std::span<const double> values, const BoxGrid& grid,
                                    const AnnulusSpec& spec);

/// Signed mean over the same shells.
std::vector<double> annulus_mean(std::span<const double> values, const BoxGrid& grid,
                                 const AnnulusSpec& spec);

/// sup_t t mu(|f| >= t)^{1/p} with mu = node count * cell_volume.
double weak_lorentz_norm(std::span<const double> values, double cell_volume, double p);
double lp_norm(std::span<const double> values, double cell_volume, double p);

/// Valid for 0 < beta <= p - 1.
/// Constant C(p, beta, Omega) for which C ||f||_{p-beta} <= ||f||_{p,inf}
/// holds on every domain of measure mu: (beta/p)^{1/(p-beta)} mu^{-beta/(p(p-beta))}.
double embedding_constant(double p, double beta, double measure);
/// The same expression with p/beta in place of beta/p. Does not give a valid
/// lower bound (f = 1 on a unit-measure set is a counterexample); kept so the
/// counterexample can be reproduced.
double inverted_embedding_constant(double p, double beta, double measure);

struct SandwichResult {
  double lower_norm = 0.0;  // ||f||_{p - beta}
  double weak_norm = 0.0;   // ||f||_{p, inf}
  double upper_norm = 0.0;  // ||f||_p
  double constant = 0.0;
  double inverted_constant = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  bool inverted_lower_ok = false;
};

SandwichResult lorentz_sandwich_check(std::span<const double> values, double cell_volume, double p,
                                      double beta);

struct DecayReport {
  Quantity quantity = Quantity::G;
  std::vector<double> radii;
  std::vector<double> annulus_stats;
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;
  FitWindow window;
  double rms_log_residual = 0.0;
};

/// Least squares of ln f against ln r over the radii inside `window`
/// (at least 5). Throws PreconditionError on f <= 0 or too few radii.
DecayReport fit_power_decay(std::span<const double> radii, std::span<const double> stats,
                            const FitWindow& window, Quantity quantity = Quantity::G);

/// Constant C of f(r) ~ C r^exponent with the exponent held fixed:
/// exp(mean(ln f - exponent ln r)) over the radii inside `window`.
double fixed_exponent_constant(std::span<const double> radii, std::span<const double> stats,
                               const FitWindow& window, double exponent);

struct LogGrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double mean_value = 0.0;
};

/// Least squares of f against (1 + |ln r|) over the radii inside `window`.
LogGrowthFit fit_log_growth(std::span<const double> radii, std::span<const double> stats,
                            const FitWindow& window);

/// Annulus statistics of |values| around the source of `grid` plus a power fit.
DecayReport measure_decay(std::span<const double> magnitudes, const BoxGrid& grid, const Point& center,
                          const FitWindow& window, int radii_count, Quantity quantity,
                          double eta = 0.1);

struct RatioSample {
  Index x = 0;
  double radius = 0.0;
  double ratio = 0.0;
};

struct LipschitzReport {
  std::vector<RatioSample> samples;
  std::vector<double> radii;
  std::vector<double> max_per_radius;
  double max_ratio = 0.0;
  double variation = 0.0;  // max / min of max_per_radius
  bool pass = false;
};

/// ratio(x, r) = r sup_{B_{r/2}(x)} |grad G| / sup_{B_r(x)} |G| for every
/// x in `points` and r in `radii`. Pass when the per-radius maxima vary by
/// less than a factor 4.
LipschitzReport lipschitz_ratio_check(const GreenColumn& col, std::span<const Index> points,
                                      std::span<const double> radii);

struct LocalSupReport {
  std::vector<double> radii;
  std::vector<double> sup_norm;
  std::vector<double> l2_norm;
  std::vector<double> constant;  // sup * R^{d/2} / ||v||_{L2}
  double variation = 0.0;
  bool pass = false;
};

/// For each R compares sup |v| with R^{-d/2} ||v||_{L2} on the annulus
/// R <= |x - y| <= 2R. Requires K v = 0 (to `harmonic_tol` relative) on the
/// rows whose whole stencil lies inside the annulus.
LocalSupReport local_sup_check(const CsrMatrix& system, const BoxGrid& grid,
                               std::span<const double> values, const Point& y,
                               std::span<const double> radii, double harmonic_tol = 1e-8);

struct UniformOptions {
  bool include_mixed = false;
  int radii_count = 6;
  double eta = 0.1;
  double tolerance = 0.25;
  SolverSettings solver;
};

struct UniformEntry {
  double half_width = 0.0;
  Point source{};
  double weak_gradient_norm = 0.0;  // ||grad G_R||_{d/(d-1), inf} over the box
  std::optional<double> g_constant;      // d = 3: C in f ~ C r^{2-d}; d = 2: log slope
  std::optional<double> grad_constant;   // C in |grad G| ~ C r^{1-d}
  std::optional<double> mixed_constant;  // C in |grad grad G| ~ C r^{-d}
};

struct UniformReport {
  std::vector<UniformEntry> entries;
  FitWindow window;
  bool fits_available = false;
  double weak_norm_variation = 0.0;
  double g_variation = 0.0;
  double grad_variation = 0.0;
  double mixed_variation = 0.0;
  bool pass = false;
};

/// Decay constants and weak gradient norms of G_R(., y) over nested boxes
/// and several sources; passes when each varies by less than
/// `tolerance` (max / min - 1). Fits use the common window [4h, R_min / 4]
/// and are skipped when it holds no radius.
UniformReport uniform_bound_check(const PeriodicField& field, const std::vector<Point>& sources,
                                  const std::vector<double>& half_widths, double h,
                                  const UniformOptions& options = {});

}  // namespace greenlab
