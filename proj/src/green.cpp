#include "greenlab/green.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenlab/errors.hpp"

namespace greenlab {

double GreenColumn::max_value() const { return *std::max_element(values.begin(), values.end()); }
double GreenColumn::min_value() const { return *std::min_element(values.begin(), values.end()); }

GreenSolver::GreenSolver(PeriodicField field, BoxGrid grid, SolverSettings settings)
    : field_(std::move(field)), grid_(std::move(grid)), settings_(settings),
      system_(assemble(field_, grid_)) {}

GreenColumn GreenSolver::column(Index source) const {
  const auto rhs = load_delta(grid_, source);
  const auto sol = solve(system_, rhs, settings_);
  GreenColumn col;
  col.grid = grid_;
  col.field = field_;
  col.source = source;
  col.values = extend_to_nodes(grid_, sol.x);
  col.iterations = sol.iterations;
  return col;
}

GreenColumn green_column(const PeriodicField& field, const BoxGrid& grid, Index source,
                         SolverSettings settings) {
  // Validate placement before paying for assembly.
  load_delta(grid, source);
  return GreenSolver(field, grid, settings).column(source);
}

GreenColumn adjoint_column(const PeriodicField& field, const BoxGrid& grid, Index x,
                           SolverSettings settings) {
  return green_column(transpose(field), grid, x, settings);
}

GreenColumn normalize_2d(GreenColumn col) {
  const BoxGrid& g = col.grid;
  if (g.dim() != 2) throw ConfigError("normalize_2d applies to two-dimensional columns only");
  const Point y = g.coordinate(col.source);
  if (!g.contains_box(y, 1.0))
    throw PreconditionError("unit ball around the source is not contained in the domain");
  double sum = 0.0;
  Index count = 0;
  for (Index i = 0; i < g.node_count(); ++i) {
    if (distance(g.coordinate(i), y) <= 1.0 + 1e-12) {
      sum += col.values[i];
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  for (double& v : col.values) v -= mean;
  col.normalization_offset += mean;
  return col;
}

int nested_nodes(double half_width, double h) {
  const double cells = 2.0 * half_width / h;
  const double rounded = std::nearbyint(cells);
  if (!(half_width > 0.0) || std::abs(cells - rounded) > 1e-9 * cells || rounded < 4)
    throw ConfigError("box half-width " + std::to_string(half_width) +
                      " is not a multiple of the spacing; grids are not nested");
  return static_cast<int>(rounded) + 1;
}

namespace {

// Node of `big` at the same position as node i of `small` (both centred).
Index embed(const BoxGrid& small, const BoxGrid& big, Index i) {
  MultiIndex m = small.multi_index(i);
  for (int k = 0; k < small.dim(); ++k) m[k] += (big.nodes(k) - small.nodes(k)) / 2;
  return big.node_index(m);
}

}  // namespace

DomainGrowth domain_growth(const PeriodicField& field, const Point& y,
                           const std::vector<double>& half_widths, double h,
                           SolverSettings settings) {
  if (half_widths.empty()) throw ConfigError("domain_growth needs at least one half-width");
  for (std::size_t k = 1; k < half_widths.size(); ++k)
    if (!(half_widths[k] > half_widths[k - 1]))
      throw ConfigError("half-widths must be strictly increasing");

  DomainGrowth out;
  for (double r : half_widths) {
    const BoxGrid grid = BoxGrid::cube(field.dim, r, nested_nodes(r, h));
    const auto src = grid.node_at(y);
    if (!src) throw ConfigError("source is not a node of every nested grid");
    out.columns.push_back(green_column(field, grid, *src, settings));
  }

  const BoxGrid& smallest = out.columns.front().grid;
  for (std::size_t a = 0; a < out.columns.size(); ++a) {
    for (std::size_t b = a + 1; b < out.columns.size(); ++b) {
      const auto& inner = out.columns[a];
      const auto& outer = out.columns[b];
      const double scale = std::max(inner.max_value(), outer.max_value());
      for (Index i = 0; i < inner.grid.node_count(); ++i) {
        const double diff = outer.values[embed(inner.grid, outer.grid, i)] - inner.values[i];
        out.worst_violation = std::min(out.worst_violation, diff / scale);
      }
    }
  }
  out.monotone = out.worst_violation >= -1e-10;

  for (std::size_t k = 1; k < out.columns.size(); ++k) {
    const auto& prev = out.columns[k - 1];
    const auto& next = out.columns[k];
    double worst = 0.0;
    for (Index i = 0; i < smallest.node_count(); ++i) {
      const double a = prev.values[embed(smallest, prev.grid, i)];
      const double b = next.values[embed(smallest, next.grid, i)];
      worst = std::max(worst, std::abs(b - a));
    }
    out.successive_difference.push_back(worst);
    out.source_drift.push_back(next.values[next.source] - prev.values[prev.source]);
  }
  return out;
}

TensorField mixed_from_columns(const BoxGrid& grid, const std::vector<std::vector<double>>& plus,
                               const std::vector<std::vector<double>>& minus) {
  const int d = grid.dim();
  if (static_cast<int>(plus.size()) != d || static_cast<int>(minus.size()) != d)
    throw ConfigError("mixed derivative needs one column pair per axis");
  const double h = grid.spacing();
  TensorField t(static_cast<std::size_t>(grid.node_count()));
  std::vector<double> dy(static_cast<std::size_t>(grid.node_count()));
  for (int j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < dy.size(); ++i) dy[i] = (plus[j][i] - minus[j][i]) / (2.0 * h);
    const VectorField gx = gradient_field(dy, grid);
    for (std::size_t i = 0; i < dy.size(); ++i)
      for (int k = 0; k < d; ++k) t[i][3 * k + j] = gx[i][k];
  }
  return t;
}

TensorField mixed_derivative(const GreenSolver& solver, Index source) {
  const BoxGrid& grid = solver.grid();
  const int d = grid.dim();
  std::vector<std::vector<double>> plus, minus;
  for (int j = 0; j < d; ++j) {
    const Index up = source + grid.stride(j);
    const Index down = source - grid.stride(j);
    const MultiIndex m = grid.multi_index(source);
    if (m[j] + 1 >= grid.nodes(j) - 1 || m[j] - 1 <= 0)
      throw SourcePlacementError("a neighbour of the source lies on the boundary");
    plus.push_back(solver.column(up).values);
    minus.push_back(solver.column(down).values);
  }
  return mixed_from_columns(grid, plus, minus);
}

TensorField mixed_derivative(const PeriodicField& field, const BoxGrid& grid, Index source,
                             SolverSettings settings) {
  return mixed_derivative(GreenSolver(field, grid, settings), source);
}

std::vector<double> frobenius(const TensorField& t, int dim) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) s += t[i][3 * k + j] * t[i][3 * k + j];
    out[i] = std::sqrt(s);
  }
  return out;
}

}  // namespace greenlab
