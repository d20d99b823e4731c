#include "greenlab/lift.hpp"

#include <algorithm>
#include <cmath>

#include "greenlab/assembly.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/green.hpp"

namespace greenlab {

namespace {

int layer_steps(double kappa, double h) {
  const double steps = kappa / h;
  const double rounded = std::nearbyint(steps);
  if (!(kappa > 0.0) || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    throw ConfigError("kappa must be a positive multiple of the grid spacing");
  return static_cast<int>(rounded);
}

}  // namespace

SlabGrid build_slab(const BoxGrid& base, double kappa_max) {
  if (base.dim() != 2) throw ConfigError("the lifted construction needs a two-dimensional base grid");
  const int steps = layer_steps(kappa_max, base.spacing());
  if (steps < 2) throw ConfigError("slab needs at least two layers on each side of t = 0");
  SlabGrid s;
  s.base = base;
  s.kappa_max = kappa_max;
  s.volume = BoxGrid::box(3, {base.nodes(0), base.nodes(1), 2 * steps + 1}, base.spacing());
  return s;
}

CsrMatrix assemble_lifted(const PeriodicField& field, const SlabGrid& slab) {
  if (field.dim != 2) throw ConfigError("the lifted operator needs a two-dimensional field");
  const Coefficient coeff = [&field](const Point& x) {
    const Matrix a = evaluate(field, {x[0], x[1], 0.0});
    Matrix m{3, {}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = a(i, j);
    m(2, 2) = 1.0;
    return m;
  };
  return assemble_coefficient(slab.volume, coeff, field.is_symmetric());
}

LiftedColumn lifted_column(const PeriodicField& field, const SlabGrid& slab, Index base_source,
                           SolverSettings settings) {
  if (slab.base.is_boundary(base_source))
    throw SourcePlacementError("lifted source lies on the boundary");
  const MultiIndex m = slab.base.multi_index(base_source);
  const Index source = slab.volume.node_index({m[0], m[1], (slab.layers() - 1) / 2});
  const CsrMatrix k = assemble_lifted(field, slab);
  const auto sol = solve(k, load_delta(slab.volume, source), settings);
  LiftedColumn col;
  col.slab = slab;
  col.base_source = base_source;
  col.values = extend_to_nodes(slab.volume, sol.x);
  col.iterations = sol.iterations;
  return col;
}

std::vector<double> kappa_integral(const LiftedColumn& col, double kappa) {
  const SlabGrid& s = col.slab;
  const double h = s.base.spacing();
  const int steps = layer_steps(kappa, h);
  const int centre = (s.layers() - 1) / 2;
  if (steps > centre) throw ConfigError("kappa exceeds the slab half-height");
  std::vector<double> out(static_cast<std::size_t>(s.base.node_count()), 0.0);
  for (Index i = 0; i < s.base.node_count(); ++i) {
    const MultiIndex m = s.base.multi_index(i);
    const Index first = s.volume.node_index({m[0], m[1], 0});
    double sum = 0.0;
    for (int j = centre - steps; j <= centre + steps; ++j) {
      const double w = (j == centre - steps || j == centre + steps) ? 0.5 : 1.0;
      sum += w * col.values[first + j];
    }
    out[i] = h * sum;
  }
  return out;
}

std::vector<double> kappa_integral(const PeriodicField& field, const SlabGrid& slab, Index base_source,
                                   double kappa, SolverSettings settings) {
  return kappa_integral(lifted_column(field, slab, base_source, settings), kappa);
}

double arctan_kernel(double r, double kappa) { return 2.0 * std::atan(kappa / r) / r; }

LiftReport compare_lift(const PeriodicField& field, const BoxGrid& base, Index base_source,
                        double kappa, const FitWindow& window, int radii_count,
                        SolverSettings settings) {
  const double half = std::min(base.half_width(0), base.half_width(1));
  if (kappa < 4.0 * half * (1 - 1e-12))
    throw PreconditionError("kappa must be at least four times the domain half-width");

  const SlabGrid slab = build_slab(base, kappa);
  const LiftedColumn lifted = lifted_column(field, slab, base_source, settings);
  const auto g_kappa = kappa_integral(lifted, kappa);
  const double h = base.spacing();
  const double half_kappa = h * std::floor(0.5 * kappa / h + 1e-9);
  const auto g_half = kappa_integral(lifted, half_kappa);
  const GreenColumn direct = green_column(field, base, base_source, settings);

  LiftReport rep;
  rep.kappa = kappa;
  rep.window = window;
  rep.lifted_iterations = lifted.iterations;
  rep.positive = std::all_of(g_kappa.begin(), g_kappa.end(),
                             [&](double v) { return v >= -1e-12 * g_kappa[base_source]; });
  rep.monotone_in_kappa = true;
  for (std::size_t i = 0; i < g_kappa.size(); ++i)
    if (g_half[i] > g_kappa[i] + 1e-12 * g_kappa[base_source]) rep.monotone_in_kappa = false;

  const VectorField grad_k = gradient_field(g_kappa, base);
  const VectorField grad_2d = gradient_field(direct.values, base);
  const Point y = base.coordinate(base_source);
  double sum = 0.0;
  for (Index i = 0; i < base.node_count(); ++i) {
    if (!window.contains(distance(base.coordinate(i), y))) continue;
    const double dx = grad_k[i][0] - grad_2d[i][0];
    const double dy = grad_k[i][1] - grad_2d[i][1];
    const double ref = std::hypot(grad_2d[i][0], grad_2d[i][1]);
    const double rel = std::hypot(dx, dy) / ref;
    rep.max_relative_discrepancy = std::max(rep.max_relative_discrepancy, rel);
    sum += rel;
    ++rep.nodes_compared;
  }
  if (rep.nodes_compared == 0) throw PreconditionError("fit window contains no nodes");
  rep.mean_relative_discrepancy = sum / static_cast<double>(rep.nodes_compared);

  const auto mag_k = magnitude(grad_k, 2);
  rep.lifted_decay = measure_decay(mag_k, base, y, window, radii_count, Quantity::grad_x);
  AnnulusSpec spec{y, 0.1, rep.lifted_decay.radii};
  rep.full_kappa_constant =
      fixed_exponent_constant(spec.radii, annulus_average(mag_k, base, spec), window, -1.0);
  const auto mag_half = magnitude(gradient_field(g_half, base), 2);
  rep.half_kappa_constant =
      fixed_exponent_constant(spec.radii, annulus_average(mag_half, base, spec), window, -1.0);
  return rep;
}

}  // namespace greenlab
