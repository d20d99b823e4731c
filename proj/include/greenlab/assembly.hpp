#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "greenlab/coeff.hpp"
#include "greenlab/grid.hpp"
#include "greenlab/sparse.hpp"

namespace greenlab {

using Coefficient = std::function<Matrix(const Point&)>;
using VectorField = std::vector<std::array<double, 3>>;

/// Q1 stiffness matrix of -div(A grad .) on the interior unknowns of `grid`
/// (Dirichlet rows and columns eliminated), with tensor 2-point Gauss
/// quadrature per element.
///
/// Every row is accumulated independently, visiting its elements in
/// increasing element index and quadrature points in a fixed order, and the
/// integrand is evaluated in a form that is exactly symmetric under swapping
/// the two basis functions. Consequences relied on elsewhere:
///   - the result does not depend on the number of threads;
///   - symmetric A gives an exactly symmetric matrix;
///   - assemble(transpose(A)) is exactly the transpose of assemble(A).
CsrMatrix assemble(const PeriodicField& field, const BoxGrid& grid);

/// Single-threaded reference for `assemble`; bitwise identical output.
CsrMatrix assemble_serial(const PeriodicField& field, const BoxGrid& grid);

/// Assembly for an arbitrary coefficient callable (used by the lifted
/// operator). `coeff` must return a grid.dim() x grid.dim() matrix and be
/// safe to call concurrently.
CsrMatrix assemble_coefficient(const BoxGrid& grid, const Coefficient& coeff, bool symmetric,
                               bool parallel = true);

/// Right-hand side of the weak form for a unit point source at node y.
/// Throws SourcePlacementError if y is a boundary node.
std::vector<double> load_delta(const BoxGrid& grid, Index y);

/// Nodal vector (zeros on the boundary) from interior unknowns.
std::vector<double> extend_to_nodes(const BoxGrid& grid, std::span<const double> interior);

/// Gradient of the Q1 interpolant: element gradients at element centres,
/// averaged over the elements sharing each node.
VectorField gradient_field(std::span<const double> values, const BoxGrid& grid);

std::vector<double> magnitude(const VectorField& v, int dim);

}  // namespace greenlab
