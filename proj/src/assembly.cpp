#include "greenlab/assembly.hpp"

#include <cmath>
#include <string>

#include "greenlab/errors.hpp"

namespace greenlab {

namespace {

constexpr int kMaxLocal = 8;     // 2^3 nodes per element
constexpr int kMaxStencil = 27;  // 3^3 neighbours per row

// Reference-element data for Q1 on [0,1]^d. Local node a has coordinate bit
// (a >> (d - 1 - k)) & 1 along axis k, so axis 0 is the most significant bit,
// matching the lexicographic node numbering.
struct ReferenceElement {
  int dim = 0;
  int local = 0;
  std::array<std::array<double, 3>, kMaxLocal> point{};                       // quadrature points
  std::array<std::array<std::array<double, 3>, kMaxLocal>, kMaxLocal> grad{};  // [q][a][k]

  explicit ReferenceElement(int d) : dim(d), local(1 << d) {
    const double g = 0.5 / std::sqrt(3.0);
    const double xi[2] = {0.5 - g, 0.5 + g};
    for (int q = 0; q < local; ++q) {
      for (int k = 0; k < d; ++k) point[q][k] = xi[bit(q, k)];
      for (int a = 0; a < local; ++a) {
        for (int k = 0; k < d; ++k) {
          double v = bit(a, k) ? 1.0 : -1.0;
          for (int l = 0; l < d; ++l)
            if (l != k) v *= bit(a, l) ? point[q][l] : 1.0 - point[q][l];
          grad[q][a][k] = v;
        }
      }
    }
  }

  int bit(int a, int k) const { return (a >> (dim - 1 - k)) & 1; }
};

// Symmetric and skew parts of A, split so that the bilinear form below is
// exactly antisymmetric in its skew part under argument exchange.
struct SplitCoefficient {
  std::array<double, 9> sym{};
  std::array<double, 9> skew{};

  SplitCoefficient(const Matrix& a, int d) {
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        sym[3 * k + l] = 0.5 * (a(k, l) + a(l, k));
        skew[3 * k + l] = 0.5 * (a(k, l) - a(l, k));
      }
  }

  // g^T A f
  double form(const std::array<double, 3>& g, const std::array<double, 3>& f, int d) const {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += sym[4 * k] * (g[k] * f[k]);
    for (int k = 0; k < d; ++k)
      for (int l = k + 1; l < d; ++l) {
        const double gf = g[k] * f[l];
        const double fg = g[l] * f[k];
        s += sym[3 * k + l] * (gf + fg) + skew[3 * k + l] * (gf - fg);
      }
    return s;
  }
};

int stencil_size(int d) { return d == 2 ? 9 : 27; }

// Slot of neighbour offset delta in {-1,0,1}^d, lexicographic (axis 0 slowest).
int stencil_slot(const MultiIndex& delta, int d) {
  int s = 0;
  for (int k = 0; k < d; ++k) s = 3 * s + (delta[k] + 1);
  return s;
}

template <class Coeff>
void assemble_row(const BoxGrid& grid, const ReferenceElement& ref, const Coeff& coeff, Index node,
                  std::array<double, kMaxStencil>& acc) {
  const int d = grid.dim();
  const double h = grid.spacing();
  // (h^d / 2^d) quadrature weight times (1/h)^2 from the two gradients.
  const double scale = std::pow(h, d - 2) / ref.local;
  const MultiIndex m = grid.multi_index(node);
  acc.fill(0.0);

  // Decreasing local offset o == increasing element index.
  for (int o = ref.local - 1; o >= 0; --o) {
    MultiIndex corner{0, 0, 0};
    for (int k = 0; k < d; ++k) corner[k] = m[k] - ref.bit(o, k);
    std::array<int, kMaxLocal> slot{};
    for (int b = 0; b < ref.local; ++b) {
      MultiIndex delta{0, 0, 0};
      for (int k = 0; k < d; ++k) delta[k] = ref.bit(b, k) - ref.bit(o, k);
      slot[b] = stencil_slot(delta, d);
    }
    for (int q = 0; q < ref.local; ++q) {
      Point x{};
      for (int k = 0; k < d; ++k) x[k] = grid.coordinate(k, corner[k]) + h * ref.point[q][k];
      const SplitCoefficient a(coeff(x), d);
      const auto& gq = ref.grad[q];
      for (int b = 0; b < ref.local; ++b) acc[slot[b]] += scale * a.form(gq[o], gq[b], d);
    }
  }
}

template <class Coeff>
CsrMatrix assemble_impl(const BoxGrid& grid, const Coeff& coeff, bool symmetric, bool parallel) {
  const int d = grid.dim();
  const ReferenceElement ref(d);
  const int width = stencil_size(d);
  const Index rows = grid.interior_count();

  std::array<Index, kMaxStencil> offset{};
  for (int s = 0; s < width; ++s) {
    int rem = s;
    Index off = 0;
    for (int k = d - 1; k >= 0; --k) {
      off += static_cast<Index>(rem % 3 - 1) * grid.stride(k);
      rem /= 3;
    }
    offset[s] = off;
  }

  CsrMatrix out;
  out.rows = rows;
  out.symmetric = symmetric;
  out.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (Index r = 0; r < rows; ++r) {
    const Index node = grid.interior_node(r);
    Index count = 0;
    for (int s = 0; s < width; ++s) count += grid.interior_index(node + offset[s]) >= 0;
    out.row_ptr[r + 1] = out.row_ptr[r] + count;
  }
  out.col.resize(static_cast<std::size_t>(out.row_ptr.back()));
  out.val.resize(static_cast<std::size_t>(out.row_ptr.back()));

  auto fill_row = [&](Index r) {
    const Index node = grid.interior_node(r);
    std::array<double, kMaxStencil> acc;
    assemble_row(grid, ref, coeff, node, acc);
    Index k = out.row_ptr[r];
    for (int s = 0; s < width; ++s) {
      const Index j = grid.interior_index(node + offset[s]);
      if (j < 0) continue;
      out.col[k] = static_cast<std::int32_t>(j);
      out.val[k] = acc[s];
      ++k;
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (Index r = 0; r < rows; ++r) fill_row(r);
  } else {
    for (Index r = 0; r < rows; ++r) fill_row(r);
  }
  return out;
}

struct FieldCoefficient {
  const PeriodicField& field;
  Matrix operator()(const Point& x) const { return evaluate(field, x); }
};

void check_dims(const PeriodicField& field, const BoxGrid& grid) {
  if (field.dim != grid.dim())
    throw ConfigError("field dimension " + std::to_string(field.dim) +
                      " does not match grid dimension " + std::to_string(grid.dim()));
}

}  // namespace

CsrMatrix assemble(const PeriodicField& field, const BoxGrid& grid) {
  check_dims(field, grid);
  return assemble_impl(grid, FieldCoefficient{field}, field.is_symmetric(), true);
}

CsrMatrix assemble_serial(const PeriodicField& field, const BoxGrid& grid) {
  check_dims(field, grid);
  return assemble_impl(grid, FieldCoefficient{field}, field.is_symmetric(), false);
}

CsrMatrix assemble_coefficient(const BoxGrid& grid, const Coefficient& coeff, bool symmetric,
                               bool parallel) {
  return assemble_impl(grid, coeff, symmetric, parallel);
}

std::vector<double> load_delta(const BoxGrid& grid, Index y) {
  if (y < 0 || y >= grid.node_count()) throw SourcePlacementError("source node out of range");
  const Index k = grid.interior_index(y);
  if (k < 0) throw SourcePlacementError("source node lies on the Dirichlet boundary");
  std::vector<double> b(static_cast<std::size_t>(grid.interior_count()), 0.0);
  b[static_cast<std::size_t>(k)] = 1.0;
  return b;
}

std::vector<double> extend_to_nodes(const BoxGrid& grid, std::span<const double> interior) {
  if (static_cast<Index>(interior.size()) != grid.interior_count())
    throw ConfigError("interior vector length does not match the grid");
  std::vector<double> v(static_cast<std::size_t>(grid.node_count()), 0.0);
  for (Index r = 0; r < grid.interior_count(); ++r) v[grid.interior_node(r)] = interior[r];
  return v;
}

VectorField gradient_field(std::span<const double> values, const BoxGrid& grid) {
  if (static_cast<Index>(values.size()) != grid.node_count())
    throw ConfigError("nodal vector length does not match the grid");
  const int d = grid.dim();
  const int local = 1 << d;
  const double h = grid.spacing();
  const double w = 1.0 / (local / 2);  // |d phi / d xi_k| at the centre is 2^{1-d}

  // Elements are indexed by their lower corner; corners with any index at
  // n-1 do not start an element and are skipped.
  const Index nodes = grid.node_count();
  VectorField elem(static_cast<std::size_t>(nodes), {0.0, 0.0, 0.0});
  auto starts_element = [&](const MultiIndex& m) {
    for (int k = 0; k < d; ++k)
      if (m[k] >= grid.nodes(k) - 1) return false;
    return true;
  };

#pragma omp parallel for schedule(static)
  for (Index e = 0; e < nodes; ++e) {
    const MultiIndex m = grid.multi_index(e);
    if (!starts_element(m)) continue;
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (int a = 0; a < local; ++a) {
      Index node = e;
      for (int k = 0; k < d; ++k)
        if ((a >> (d - 1 - k)) & 1) node += grid.stride(k);
      const double u = values[node];
      for (int k = 0; k < d; ++k) g[k] += ((a >> (d - 1 - k)) & 1) ? u : -u;
    }
    for (int k = 0; k < d; ++k) elem[e][k] = g[k] * w / h;
  }

  VectorField out(static_cast<std::size_t>(nodes), {0.0, 0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < nodes; ++i) {
    const MultiIndex m = grid.multi_index(i);
    std::array<double, 3> g{0.0, 0.0, 0.0};
    int count = 0;
    for (int o = local - 1; o >= 0; --o) {
      MultiIndex c = m;
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        c[k] -= (o >> (d - 1 - k)) & 1;
        ok = ok && c[k] >= 0 && c[k] < grid.nodes(k) - 1;
      }
      if (!ok) continue;
      const auto& ge = elem[grid.node_index(c)];
      for (int k = 0; k < d; ++k) g[k] += ge[k];
      ++count;
    }
    for (int k = 0; k < d; ++k) out[i][k] = g[k] / count;
  }
  return out;
}

std::vector<double> magnitude(const VectorField& v, int dim) {
  std::vector<double> m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += v[i][k] * v[i][k];
    m[i] = std::sqrt(s);
  }
  return m;
}

}  // namespace greenlab
