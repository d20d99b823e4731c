#pragma once

#include <array>
#include <optional>
#include <vector>

#include "greenlab/assembly.hpp"
#include "greenlab/coeff.hpp"
#include "greenlab/grid.hpp"
#include "greenlab/sparse.hpp"

namespace greenlab {

/// Discrete Green function x -> G_h(x, y) for one source node y.
struct GreenColumn {
  BoxGrid grid;
  PeriodicField field;
  Index source = 0;
  std::vector<double> values;        // one per node, zero on the boundary before normalization
  double normalization_offset = 0.0;
  int iterations = 0;

  double max_value() const;
  double min_value() const;
};

/// Assembles the system for one (field, grid) once and solves for as many
/// source columns as needed.
class GreenSolver {
 public:
  GreenSolver(PeriodicField field, BoxGrid grid, SolverSettings settings = {});

  GreenColumn column(Index source) const;

  const CsrMatrix& system() const { return system_; }
  const BoxGrid& grid() const { return grid_; }
  const PeriodicField& field() const { return field_; }
  const SolverSettings& settings() const { return settings_; }

 private:
  PeriodicField field_;
  BoxGrid grid_;
  SolverSettings settings_;
  CsrMatrix system_;
};

GreenColumn green_column(const PeriodicField& field, const BoxGrid& grid, Index source,
                         SolverSettings settings = {});

/// Green column of the adjoint operator -div(A^T grad .) with source x.
GreenColumn adjoint_column(const PeriodicField& field, const BoxGrid& grid, Index x,
                           SolverSettings settings = {});

/// Subtracts the mean over the nodes with |x - y| <= 1 (uniform weights,
/// i.e. the volume-weighted mean on a uniform grid) and records the offset.
/// Requires d = 2 and the unit ball around y inside the box.
GreenColumn normalize_2d(GreenColumn col);

struct DomainGrowth {
  std::vector<GreenColumn> columns;
  bool monotone = true;
  double worst_violation = 0.0;  // most negative G_{R'} - G_R seen, relative to max
  /// max |G_{R_k} - G_{R_{k-1}}| over the nodes of the smallest box, k >= 1.
  std::vector<double> successive_difference;
  /// G_{R_k}(y, y) - G_{R_{k-1}}(y, y), k >= 1.
  std::vector<double> source_drift;
};

/// Green columns on nested cubes [-R, R]^d sharing spacing h, plus the
/// maximum-principle monotonicity verdict G_{R'} >= G_R - 1e-10 max.
DomainGrowth domain_growth(const PeriodicField& field, const Point& y,
                           const std::vector<double>& half_widths, double h,
                           SolverSettings settings = {});

/// Node count per axis of the cube [-R, R]^d with spacing h; throws if R is
/// not an integer multiple of h.
int nested_nodes(double half_width, double h);

/// Per-node d x d tensor T_ij = d/dx_i d/dy_j G(x, y), row-major.
using TensorField = std::vector<std::array<double, 9>>;

/// Mixed derivative by central differences in y over the neighbouring
/// source nodes, followed by the nodal gradient in x.
TensorField mixed_derivative(const GreenSolver& solver, Index source);
TensorField mixed_derivative(const PeriodicField& field, const BoxGrid& grid, Index source,
                             SolverSettings settings = {});

/// The same tensor from precomputed columns at y + h e_j (plus[j]) and
/// y - h e_j (minus[j]), j < d.
TensorField mixed_from_columns(const BoxGrid& grid, const std::vector<std::vector<double>>& plus,
                               const std::vector<std::vector<double>>& minus);

std::vector<double> frobenius(const TensorField& t, int dim);

}  // namespace greenlab
