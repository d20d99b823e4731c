#include "greenlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "greenlab/errors.hpp"

namespace greenlab {

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::G: return "G";
    case Quantity::grad_x: return "grad_x";
    case Quantity::grad_y: return "grad_y";
    case Quantity::mixed: return "mixed";
  }
  return "unknown";
}

bool FitWindow::contains(double r) const {
  const double slack = 1e-12 * std::max(1.0, r_max);
  return r >= r_min - slack && r <= r_max + slack;
}

FitWindow default_window(const BoxGrid& grid) {
  double half = grid.half_width(0);
  for (int k = 1; k < grid.dim(); ++k) half = std::min(half, grid.half_width(k));
  return {4.0 * grid.spacing(), half / 4.0};
}

std::vector<double> geometric_radii(const FitWindow& w, int count) {
  if (count < 1 || !(w.r_min > 0.0) || w.r_max < w.r_min)
    throw ConfigError("invalid radius window");
  if (count == 1) return {w.r_min};
  std::vector<double> r(static_cast<std::size_t>(count));
  const double ratio = std::log(w.r_max / w.r_min) / (count - 1);
  for (int j = 0; j < count; ++j) r[j] = w.r_min * std::exp(ratio * j);
  r.back() = w.r_max;
  return r;
}

std::vector<double> dyadic_radii(double r_min, double r_max) {
  if (!(r_min > 0.0)) throw ConfigError("dyadic radii need r_min > 0");
  std::vector<double> r;
  for (double v = r_min; v <= r_max * (1 + 1e-12); v *= 2.0) r.push_back(v);
  return r;
}

namespace {

template <class Reduce>
std::vector<double> shell_statistic(std::span<const double> values, const BoxGrid& grid,
                                    const AnnulusSpec& spec, Reduce transform) {
  if (!(spec.eta > 0.0 && spec.eta < 0.5)) throw ConfigError("shell thickness must lie in (0, 0.5)");
  if (static_cast<Index>(values.size()) != grid.node_count())
    throw ConfigError("nodal vector length does not match the grid");
  const std::size_t nr = spec.radii.size();
  std::vector<double> sum(nr, 0.0);
  std::vector<Index> count(nr, 0);
  for (Index i = 0; i < grid.node_count(); ++i) {
    const double s = distance(grid.coordinate(i), spec.center);
    for (std::size_t k = 0; k < nr; ++k) {
      const double r = spec.radii[k];
      if (s >= r * (1.0 - spec.eta) && s <= r * (1.0 + spec.eta)) {
        sum[k] += transform(values[i]);
        ++count[k];
      }
    }
  }
  for (std::size_t k = 0; k < nr; ++k) {
    if (count[k] < 8)
      throw PreconditionError("annulus shell at r = " + std::to_string(spec.radii[k]) + " holds " +
                              std::to_string(count[k]) + " nodes (need 8)");
    sum[k] /= static_cast<double>(count[k]);
  }
  return sum;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit abscissae are degenerate");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

void select_window(std::span<const double> radii, std::span<const double> stats,
                   const FitWindow& window, std::size_t min_points, std::vector<double>& r,
                   std::vector<double>& f) {
  if (radii.size() != stats.size()) throw ConfigError("radii and statistics differ in length");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!window.contains(radii[i])) continue;
    r.push_back(radii[i]);
    f.push_back(stats[i]);
  }
  if (r.size() < min_points)
    throw PreconditionError("fit window holds " + std::to_string(r.size()) + " radii, need " +
                            std::to_string(min_points));
}

}  // namespace

std::vector<double> annulus_average(std::span<const double> values, const BoxGrid& grid,
                                    const AnnulusSpec& spec) {
  return shell_statistic(values, grid, spec, [](double v) { return std::abs(v); });
}

std::vector<double> annulus_mean(std::span<const double> values, const BoxGrid& grid,
                                 const AnnulusSpec& spec) {
  return shell_statistic(values, grid, spec, [](double v) { return v; });
}

double weak_lorentz_norm(std::span<const double> values, double cell_volume, double p) {
  if (!(p >= 1.0)) throw ConfigError("weak L^p norm needs p >= 1");
  std::vector<double> mag(values.size());
  std::transform(values.begin(), values.end(), mag.begin(), [](double v) { return std::abs(v); });
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double best = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k)
    best = std::max(best, mag[k] * std::pow(static_cast<double>(k + 1) * cell_volume, 1.0 / p));
  return best;
}

double lp_norm(std::span<const double> values, double cell_volume, double p) {
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p);
  return std::pow(s * cell_volume, 1.0 / p);
}

double embedding_constant(double p, double beta, double measure) {
  return std::pow(beta / p, 1.0 / (p - beta)) * std::pow(measure, -beta / (p * (p - beta)));
}

double inverted_embedding_constant(double p, double beta, double measure) {
  return std::pow(p / beta, 1.0 / (p - beta)) * std::pow(measure, -beta / (p * (p - beta)));
}

SandwichResult lorentz_sandwich_check(std::span<const double> values, double cell_volume, double p,
                                      double beta) {
  if (!(beta > 0.0 && beta <= p - 1.0)) throw ConfigError("need 0 < beta <= p - 1");
  if (values.empty() || !(cell_volume > 0.0)) throw ConfigError("empty field or cell volume");
  const double measure = static_cast<double>(values.size()) * cell_volume;
  SandwichResult s;
  s.lower_norm = lp_norm(values, cell_volume, p - beta);
  s.weak_norm = weak_lorentz_norm(values, cell_volume, p);
  s.upper_norm = lp_norm(values, cell_volume, p);
  s.constant = embedding_constant(p, beta, measure);
  s.inverted_constant = inverted_embedding_constant(p, beta, measure);
  const double slack = 1.0 + 1e-12;
  s.upper_ok = s.weak_norm <= s.upper_norm * slack;
  s.lower_ok = s.constant * s.lower_norm <= s.weak_norm * slack;
  s.inverted_lower_ok = s.inverted_constant * s.lower_norm <= s.weak_norm * slack;
  return s;
}

DecayReport fit_power_decay(std::span<const double> radii, std::span<const double> stats,
                            const FitWindow& window, Quantity quantity) {
  DecayReport rep;
  rep.quantity = quantity;
  rep.window = window;
  select_window(radii, stats, window, 5, rep.radii, rep.annulus_stats);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    if (!(rep.annulus_stats[i] > 0.0))
      throw PreconditionError("non-positive statistic inside the fit window");
    lx.push_back(std::log(rep.radii[i]));
    ly.push_back(std::log(rep.annulus_stats[i]));
  }
  const LinearFit f = least_squares(lx, ly);
  rep.fitted_exponent = f.slope;
  rep.fitted_constant = std::exp(f.intercept);
  rep.rms_log_residual = f.rms;
  return rep;
}

double fixed_exponent_constant(std::span<const double> radii, std::span<const double> stats,
                               const FitWindow& window, double exponent) {
  std::vector<double> r, f;
  select_window(radii, stats, window, 1, r, f);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(f[i] > 0.0)) throw PreconditionError("non-positive statistic inside the fit window");
    s += std::log(f[i]) - exponent * std::log(r[i]);
  }
  return std::exp(s / static_cast<double>(r.size()));
}

LogGrowthFit fit_log_growth(std::span<const double> radii, std::span<const double> stats,
                            const FitWindow& window) {
  std::vector<double> r, f;
  select_window(radii, stats, window, 5, r, f);
  std::vector<double> x(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) x[i] = 1.0 + std::abs(std::log(r[i]));
  const LinearFit fit = least_squares(x, f);
  LogGrowthFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.rms_residual = fit.rms;
  out.mean_value = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  return out;
}

DecayReport measure_decay(std::span<const double> magnitudes, const BoxGrid& grid, const Point& center,
                          const FitWindow& window, int radii_count, Quantity quantity, double eta) {
  AnnulusSpec spec{center, eta, geometric_radii(window, radii_count)};
  const auto stats = annulus_average(magnitudes, grid, spec);
  return fit_power_decay(spec.radii, stats, window, quantity);
}

LipschitzReport lipschitz_ratio_check(const GreenColumn& col, std::span<const Index> points,
                                      std::span<const double> radii) {
  const BoxGrid& g = col.grid;
  const double h = g.spacing();
  const Point y = g.coordinate(col.source);
  for (Index x : points) {
    const Point px = g.coordinate(x);
    for (double r : radii) {
      if (r < 8.0 * h * (1 - 1e-12)) throw PreconditionError("ball radius below 8h");
      if (!(r < distance(px, y))) throw PreconditionError("ball around x reaches the source");
      if (!g.contains_box(px, r)) throw PreconditionError("ball around x leaves the domain");
    }
  }
  const auto grad = magnitude(gradient_field(col.values, g), g.dim());

  LipschitzReport rep;
  rep.radii.assign(radii.begin(), radii.end());
  rep.max_per_radius.assign(radii.size(), 0.0);
  for (Index x : points) {
    const Point px = g.coordinate(x);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double r = radii[k];
      double sup_grad = 0.0, sup_val = 0.0;
      for (Index i = 0; i < g.node_count(); ++i) {
        const double s = distance(g.coordinate(i), px);
        if (s <= r * (1 + 1e-12)) sup_val = std::max(sup_val, std::abs(col.values[i]));
        if (s <= 0.5 * r * (1 + 1e-12)) sup_grad = std::max(sup_grad, grad[i]);
      }
      if (!(sup_val > 0.0)) throw PreconditionError("column vanishes on a test ball");
      const double ratio = r * sup_grad / sup_val;
      rep.samples.push_back({x, r, ratio});
      rep.max_per_radius[k] = std::max(rep.max_per_radius[k], ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
  }
  const auto [lo, hi] = std::minmax_element(rep.max_per_radius.begin(), rep.max_per_radius.end());
  rep.variation = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  rep.pass = std::isfinite(rep.max_ratio) && rep.variation < 4.0;
  return rep;
}

LocalSupReport local_sup_check(const CsrMatrix& system, const BoxGrid& grid,
                               std::span<const double> values, const Point& y,
                               std::span<const double> radii, double harmonic_tol) {
  if (static_cast<Index>(values.size()) != grid.node_count())
    throw ConfigError("nodal vector length does not match the grid");
  const int d = grid.dim();
  const double h = grid.spacing();
  const double reach = std::sqrt(static_cast<double>(d)) * h;

  // K applied to the full nodal vector: boundary values enter through the
  // eliminated columns, so interior rows touching the boundary are skipped.
  std::vector<double> interior(static_cast<std::size_t>(grid.interior_count()));
  for (Index r = 0; r < grid.interior_count(); ++r) interior[r] = values[grid.interior_node(r)];
  const auto kv = matvec(system, interior);
  std::vector<double> row_scale(interior.size(), 0.0);
  for (Index r = 0; r < system.rows; ++r)
    for (auto k = system.row_ptr[r]; k < system.row_ptr[r + 1]; ++k)
      row_scale[r] += std::abs(system.val[k] * interior[system.col[k]]);

  LocalSupReport rep;
  const double cell = grid.cell_volume();
  for (double R : radii) {
    if (!grid.contains_box(y, 2.0 * R)) throw PreconditionError("annulus leaves the domain");
    double worst = 0.0, scale = 0.0;
    double sup = 0.0, l2 = 0.0;
    for (Index i = 0; i < grid.node_count(); ++i) {
      const double s = distance(grid.coordinate(i), y);
      if (s < R || s > 2.0 * R) continue;
      sup = std::max(sup, std::abs(values[i]));
      l2 += values[i] * values[i] * cell;
      const Index r = grid.interior_index(i);
      if (r >= 0 && s > R + reach && s < 2.0 * R - reach) {
        worst = std::max(worst, std::abs(kv[r]));
        scale = std::max(scale, row_scale[r]);
      }
    }
    if (worst > harmonic_tol * scale)
      throw PreconditionError("field is not discrete-harmonic on the annulus at R = " +
                              std::to_string(R));
    l2 = std::sqrt(l2);
    rep.radii.push_back(R);
    rep.sup_norm.push_back(sup);
    rep.l2_norm.push_back(l2);
    rep.constant.push_back(l2 > 0.0 ? sup * std::pow(R, 0.5 * d) / l2 : 0.0);
  }
  if (!rep.constant.empty()) {
    const auto [lo, hi] = std::minmax_element(rep.constant.begin(), rep.constant.end());
    rep.variation = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  }
  rep.pass = rep.variation < 4.0;
  return rep;
}

namespace {

double variation(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo - 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

UniformReport uniform_bound_check(const PeriodicField& field, const std::vector<Point>& sources,
                                  const std::vector<double>& half_widths, double h,
                                  const UniformOptions& options) {
  if (sources.empty() || half_widths.empty()) throw ConfigError("need sources and half-widths");
  const int d = field.dim;
  UniformReport rep;
  const double r_small = *std::min_element(half_widths.begin(), half_widths.end());
  rep.window = {4.0 * h, r_small / 4.0};
  rep.fits_available = rep.window.r_max >= rep.window.r_min;
  const int count = rep.window.r_max > rep.window.r_min ? options.radii_count : 1;

  std::vector<double> weak, gconst, gradconst, mixconst;
  for (const Point& y : sources) {
    for (double R : half_widths) {
      const BoxGrid grid = BoxGrid::cube(d, R, nested_nodes(R, h));
      const auto src = grid.node_at(y);
      if (!src) throw ConfigError("source is not a node of every nested grid");
      const GreenSolver solver(field, grid, options.solver);
      const GreenColumn col = solver.column(*src);
      const auto grad = magnitude(gradient_field(col.values, grid), d);

      UniformEntry e;
      e.half_width = R;
      e.source = y;
      e.weak_gradient_norm =
          weak_lorentz_norm(grad, grid.cell_volume(), static_cast<double>(d) / (d - 1));
      weak.push_back(e.weak_gradient_norm);

      if (rep.fits_available) {
        AnnulusSpec spec{y, options.eta, geometric_radii(rep.window, count)};
        if (d == 2) {
          const auto mean = annulus_mean(col.values, grid, spec);
          if (spec.radii.size() >= 5) {
            e.g_constant = fit_log_growth(spec.radii, mean, rep.window).slope;
            gconst.push_back(*e.g_constant);
          }
        } else {
          const auto f = annulus_average(col.values, grid, spec);
          e.g_constant = fixed_exponent_constant(spec.radii, f, rep.window, 2.0 - d);
          gconst.push_back(*e.g_constant);
        }
        const auto fg = annulus_average(grad, grid, spec);
        e.grad_constant = fixed_exponent_constant(spec.radii, fg, rep.window, 1.0 - d);
        gradconst.push_back(*e.grad_constant);
        if (options.include_mixed) {
          const auto mixed = frobenius(mixed_derivative(solver, *src), d);
          const auto fm = annulus_average(mixed, grid, spec);
          e.mixed_constant = fixed_exponent_constant(spec.radii, fm, rep.window, -1.0 * d);
          mixconst.push_back(*e.mixed_constant);
        }
      }
      rep.entries.push_back(e);
    }
  }
  rep.weak_norm_variation = variation(weak);
  rep.g_variation = variation(gconst);
  rep.grad_variation = variation(gradconst);
  rep.mixed_variation = variation(mixconst);
  rep.pass = rep.weak_norm_variation < options.tolerance && rep.g_variation < options.tolerance &&
             rep.grad_variation < options.tolerance && rep.mixed_variation < options.tolerance;
  return rep;
}

}  // namespace greenlab
