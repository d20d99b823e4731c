#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "greenlab/coeff.hpp"

namespace greenlab {

using Index = std::int64_t;
using MultiIndex = std::array<int, 3>;

/// Uniform tensor grid centred at the origin with spacing h and an odd number
/// of nodes along every axis, so the origin is always a node. Nodes are
/// numbered lexicographically with axis 0 slowest. Nodes on any face are
/// Dirichlet nodes; the rest are numbered consecutively as unknowns.
class BoxGrid {
 public:
  BoxGrid() = default;

  /// The cube [-R, R]^d with n nodes per axis, h = 2R / (n - 1).
  static BoxGrid cube(int dim, double half_width, int nodes_per_axis);

  /// A centred box with possibly different odd node counts per axis.
  static BoxGrid box(int dim, const MultiIndex& nodes_per_axis, double spacing);

  int dim() const { return dim_; }
  double spacing() const { return h_; }
  int nodes(int axis) const { return n_[axis]; }
  double half_width(int axis) const { return h_ * ((n_[axis] - 1) / 2); }
  Index node_count() const { return node_count_; }
  Index interior_count() const { return interior_count_; }
  double cell_volume() const;

  MultiIndex multi_index(Index node) const;
  Index node_index(const MultiIndex& m) const;
  Point coordinate(Index node) const;
  double coordinate(int axis, int i) const { return (i - (n_[axis] - 1) / 2) * h_; }

  /// Node at exactly `x` (up to 1e-9 h), if any.
  std::optional<Index> node_at(const Point& x) const;
  Index center_node() const;

  bool is_boundary(Index node) const;
  /// Unknown number of an interior node, -1 for boundary nodes.
  Index interior_index(Index node) const { return interior_of_node_[static_cast<std::size_t>(node)]; }
  Index interior_node(Index unknown) const { return node_of_interior_[static_cast<std::size_t>(unknown)]; }

  /// Whether the closed axis-aligned box around `x` of half-width r lies
  /// inside the grid's domain.
  bool contains_box(const Point& x, double r) const;

  Index stride(int axis) const { return stride_[axis]; }

 private:
  int dim_ = 0;
  double h_ = 0.0;
  MultiIndex n_{1, 1, 1};
  std::array<Index, 3> stride_{0, 0, 0};
  Index node_count_ = 0;
  Index interior_count_ = 0;
  std::vector<Index> interior_of_node_;
  std::vector<Index> node_of_interior_;
};

BoxGrid build_grid(int dim, double half_width, int nodes_per_axis);

double distance(const Point& a, const Point& b);

}  // namespace greenlab
