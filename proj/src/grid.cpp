#include "greenlab/grid.hpp"

#include <cmath>
#include <string>

#include "greenlab/errors.hpp"

namespace greenlab {

BoxGrid BoxGrid::cube(int dim, double half_width, int nodes_per_axis) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("grid half-width must be positive");
  if (nodes_per_axis < 5 || nodes_per_axis % 2 == 0)
    throw ConfigError("nodes per axis must be odd and >= 5, got " + std::to_string(nodes_per_axis));
  MultiIndex n{1, 1, 1};
  for (int i = 0; i < dim; ++i) n[i] = nodes_per_axis;
  return box(dim, n, 2.0 * half_width / (nodes_per_axis - 1));
}

BoxGrid BoxGrid::box(int dim, const MultiIndex& nodes_per_axis, double spacing) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
  BoxGrid g;
  g.dim_ = dim;
  g.h_ = spacing;
  for (int i = 0; i < dim; ++i) {
    if (nodes_per_axis[i] < 3 || nodes_per_axis[i] % 2 == 0)
      throw ConfigError("nodes per axis must be odd");
    g.n_[i] = nodes_per_axis[i];
  }
  g.stride_[dim - 1] = 1;
  for (int i = dim - 2; i >= 0; --i) g.stride_[i] = g.stride_[i + 1] * g.n_[i + 1];
  g.node_count_ = g.stride_[0] * g.n_[0];

  g.interior_of_node_.assign(static_cast<std::size_t>(g.node_count_), -1);
  Index next = 0;
  for (Index k = 0; k < g.node_count_; ++k) {
    if (!g.is_boundary(k)) {
      g.interior_of_node_[static_cast<std::size_t>(k)] = next++;
      g.node_of_interior_.push_back(k);
    }
  }
  g.interior_count_ = next;
  return g;
}

double BoxGrid::cell_volume() const { return std::pow(h_, dim_); }

MultiIndex BoxGrid::multi_index(Index node) const {
  MultiIndex m{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    m[i] = static_cast<int>(node / stride_[i]);
    node %= stride_[i];
  }
  return m;
}

Index BoxGrid::node_index(const MultiIndex& m) const {
  Index k = 0;
  for (int i = 0; i < dim_; ++i) k += m[i] * stride_[i];
  return k;
}

Point BoxGrid::coordinate(Index node) const {
  const MultiIndex m = multi_index(node);
  Point x{};
  for (int i = 0; i < dim_; ++i) x[i] = coordinate(i, m[i]);
  return x;
}

std::optional<Index> BoxGrid::node_at(const Point& x) const {
  MultiIndex m{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    const double s = x[i] / h_ + (n_[i] - 1) / 2;
    const double r = std::nearbyint(s);
    if (std::abs(s - r) > 1e-9 || r < 0 || r > n_[i] - 1) return std::nullopt;
    m[i] = static_cast<int>(r);
  }
  return node_index(m);
}

Index BoxGrid::center_node() const {
  MultiIndex m{0, 0, 0};
  for (int i = 0; i < dim_; ++i) m[i] = (n_[i] - 1) / 2;
  return node_index(m);
}

bool BoxGrid::is_boundary(Index node) const {
  const MultiIndex m = multi_index(node);
  for (int i = 0; i < dim_; ++i)
    if (m[i] == 0 || m[i] == n_[i] - 1) return true;
  return false;
}

bool BoxGrid::contains_box(const Point& x, double r) const {
  const double slack = 1e-12 * h_;
  for (int i = 0; i < dim_; ++i)
    if (std::abs(x[i]) + r > half_width(i) + slack) return false;
  return true;
}

BoxGrid build_grid(int dim, double half_width, int nodes_per_axis) {
  return BoxGrid::cube(dim, half_width, nodes_per_axis);
}

double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace greenlab
