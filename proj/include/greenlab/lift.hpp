#pragma once

#include <vector>

#include "greenlab/analysis.hpp"
#include "greenlab/coeff.hpp"
#include "greenlab/grid.hpp"
#include "greenlab/sparse.hpp"

namespace greenlab {

// Dimension lifting: 2D gradient bounds obtained from the 3D operator
//   -div_x(A(x) grad_x u) - d^2u/dt^2
// by integrating its Green function over t. This is a verification of that
// construction, not a way to compute 2D Green functions (direct 2D solves
// are far cheaper).

/// A 2D base grid extruded along t in [-kappa_max, kappa_max] with the same
/// spacing. The 3D volume grid has t as its last (fastest) axis.
struct SlabGrid {
  BoxGrid base;
  double kappa_max = 0.0;
  BoxGrid volume;

  int layers() const { return volume.nodes(2); }
};

SlabGrid build_slab(const BoxGrid& base, double kappa_max);

/// Q1 assembly of the lifted operator with coefficient diag(A(x), 1) and
/// Dirichlet conditions on every face of the slab.
CsrMatrix assemble_lifted(const PeriodicField& field, const SlabGrid& slab);

/// Nodal values of the lifted Green function with source (y, t = 0) on the slab volume.
struct LiftedColumn {
  SlabGrid slab;
  Index base_source = 0;
  std::vector<double> values;
  int iterations = 0;
};

LiftedColumn lifted_column(const PeriodicField& field, const SlabGrid& slab, Index base_source,
                           SolverSettings settings = {});

/// G_kappa(x) = integral over [-kappa, kappa] of the lifted column, by the
/// trapezoid rule over t-layers; kappa must be a multiple of the spacing.
std::vector<double> kappa_integral(const LiftedColumn& col, double kappa);
std::vector<double> kappa_integral(const PeriodicField& field, const SlabGrid& slab, Index base_source,
                                   double kappa, SolverSettings settings = {});

/// Closed form of the t-integral of 1 / (r^2 + t^2) over [-kappa, kappa].
double arctan_kernel(double r, double kappa);

struct LiftReport {
  double kappa = 0.0;
  FitWindow window;
  Index nodes_compared = 0;
  double max_relative_discrepancy = 0.0;  // max |grad G_kappa - grad G_2d| / |grad G_2d|
  double mean_relative_discrepancy = 0.0;
  DecayReport lifted_decay;                // of |grad G_kappa|
  double half_kappa_constant = 0.0;        // same fit for G_{kappa/2}, exponent -1 fixed
  double full_kappa_constant = 0.0;
  bool positive = false;                   // G_kappa >= 0 at every node
  bool monotone_in_kappa = false;          // G_{kappa/2} <= G_kappa at every node
  int lifted_iterations = 0;
};

/// Compares grad G_kappa with the gradient of the direct 2D Green column on
/// `base` with the slab truncated at t = +-kappa (kappa >= 4 * half-width).
LiftReport compare_lift(const PeriodicField& field, const BoxGrid& base, Index base_source,
                        double kappa, const FitWindow& window, int radii_count = 6,
                        SolverSettings settings = {});

}  // namespace greenlab
