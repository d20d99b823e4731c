#include <cmath>

#include <gtest/gtest.h>

#include "greenlab/assembly.hpp"
#include "greenlab/errors.hpp"

using namespace greenlab;

namespace {

const Family kFamilies[] = {Family::identity, Family::scalar_trig, Family::diag_aniso, Family::nonsym_skew};

PeriodicField field_for(int d, Family fam) {
  // Modulated skew so the non-symmetric case is non-trivial.
  return fam == Family::nonsym_skew ? make_field(d, fam, {0.3, 0.2, 0.5}) : make_field(d, fam);
}

// Naive Q1 stiffness on all nodes, element by element, with the gradient of
// each trilinear basis function written out explicitly.
std::vector<double> naive_stiffness(const PeriodicField& f, const BoxGrid& g) {
  const int d = g.dim();
  const Index nn = g.node_count();
  const double h = g.spacing();
  std::vector<double> k(static_cast<std::size_t>(nn * nn), 0.0);
  const int corners = 1 << d;
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  MultiIndex cells{g.nodes(0) - 1, g.nodes(1) - 1, d == 3 ? g.nodes(2) - 1 : 1};
  for (int e0 = 0; e0 < cells[0]; ++e0)
    for (int e1 = 0; e1 < cells[1]; ++e1)
      for (int e2 = 0; e2 < cells[2]; ++e2) {
        const MultiIndex base{e0, e1, d == 3 ? e2 : 0};
        for (int q = 0; q < corners; ++q) {
          double xi[3] = {0, 0, 0};
          for (int k2 = 0; k2 < d; ++k2) xi[k2] = gp[(q >> k2) & 1];
          Point x{};
          for (int k2 = 0; k2 < d; ++k2) x[k2] = g.coordinate(k2, base[k2]) + h * xi[k2];
          const Matrix a = evaluate(f, x);
          double grads[8][3];
          Index nodes[8];
          for (int c = 0; c < corners; ++c) {
            MultiIndex m = base;
            for (int k2 = 0; k2 < d; ++k2) m[k2] += (c >> k2) & 1;
            nodes[c] = g.node_index(m);
            for (int k2 = 0; k2 < d; ++k2) {
              double gr = 1.0;
              for (int l = 0; l < d; ++l) {
                const int bit = (c >> l) & 1;
                if (l == k2) gr *= (bit ? 1.0 : -1.0) / h;
                else gr *= bit ? xi[l] : 1.0 - xi[l];
              }
              grads[c][k2] = gr;
            }
          }
          const double w = std::pow(h, d) / corners;
          for (int i = 0; i < corners; ++i)
            for (int j = 0; j < corners; ++j) {
              double s = 0;
              for (int r = 0; r < d; ++r)
                for (int c2 = 0; c2 < d; ++c2) s += grads[i][r] * a(r, c2) * grads[j][c2];
              k[static_cast<std::size_t>(nodes[i] * nn + nodes[j])] += w * s;
            }
        }
      }
  return k;
}

}  // namespace

TEST(Assembly, LaplacianStencilIn2D) {
  for (int n : {9, 17}) {
    const BoxGrid g = build_grid(2, 1.0, n);
    const auto k = assemble(make_field(2, Family::identity), g);
    const Index c = g.interior_index(g.center_node());
    const Index cn = g.center_node();
    EXPECT_NEAR(k.at(c, c), 8.0 / 3, 1e-15);
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (!di && !dj) continue;
        const Index j = g.interior_index(cn + di * g.stride(0) + dj * g.stride(1));
        EXPECT_NEAR(k.at(c, j), -1.0 / 3, 1e-15);
      }
  }
}

TEST(Assembly, LaplacianStencilIn3D) {
  const BoxGrid g = build_grid(3, 1.0, 9);
  const double h = g.spacing();
  const auto k = assemble(make_field(3, Family::identity), g);
  const Index cn = g.center_node();
  const Index c = g.interior_index(cn);
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int e = -1; e <= 1; ++e) {
        const int off = std::abs(a) + std::abs(b) + std::abs(e);
        const double expected = off == 0 ? 8.0 * h / 3 : off == 1 ? 0.0 : off == 2 ? -h / 6 : -h / 12;
        const Index j = g.interior_index(cn + a * g.stride(0) + b * g.stride(1) + e * g.stride(2));
        EXPECT_NEAR(k.at(c, j), expected, 1e-15);
      }
}

TEST(Assembly, MatchesNaiveElementAssembly) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const BoxGrid g = build_grid(d, 1.0, d == 2 ? 9 : 5);
      const auto f = field_for(d, fam);
      const auto k = assemble(f, g);
      const auto naive = naive_stiffness(f, g);
      const Index nn = g.node_count();
      for (Index i = 0; i < k.rows; ++i)
        for (Index j = 0; j < k.rows; ++j) {
          const double ref = naive[static_cast<std::size_t>(g.interior_node(i) * nn + g.interior_node(j))];
          EXPECT_NEAR(k.at(i, j), ref, 1e-13) << to_string(fam) << " d=" << d;
        }
    }
}

TEST(Assembly, ParallelMatchesSerialBitwise) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const BoxGrid g = build_grid(d, 1.0, d == 2 ? 33 : 13);
      const auto f = field_for(d, fam);
      const auto a = assemble(f, g), b = assemble_serial(f, g);
      EXPECT_EQ(a.row_ptr, b.row_ptr);
      EXPECT_EQ(a.col, b.col);
      EXPECT_EQ(a.val, b.val);
    }
}

TEST(Assembly, TransposedFieldGivesTransposedMatrixExactly) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const BoxGrid g = build_grid(d, 1.0, d == 2 ? 17 : 9);
      const auto f = field_for(d, fam);
      const auto kt = assemble(transpose(f), g);
      const auto tk = transpose(assemble(f, g));
      EXPECT_EQ(kt.row_ptr, tk.row_ptr);
      EXPECT_EQ(kt.col, tk.col);
      EXPECT_EQ(kt.val, tk.val);
    }
}

TEST(Assembly, SymmetricFieldsGiveExactlySymmetricMatrices) {
  for (int d : {2, 3})
    for (Family fam : {Family::identity, Family::scalar_trig, Family::diag_aniso}) {
      const auto k = assemble(make_field(d, fam), build_grid(d, 1.0, d == 2 ? 17 : 9));
      EXPECT_TRUE(k.symmetric);
      const auto t = transpose(k);
      EXPECT_EQ(t.val, k.val);
      EXPECT_TRUE(check_invariants(k));
    }
}

TEST(Assembly, InvariantsAndPositiveDiagonal) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const auto k = assemble(field_for(d, fam), build_grid(d, 1.0, d == 2 ? 17 : 9));
      EXPECT_TRUE(check_invariants(k));
      for (double v : k.diagonal()) EXPECT_GT(v, 0.0);
    }
}

TEST(Assembly, StencilLocalityAndZeroRowSums) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const BoxGrid g = build_grid(d, 1.0, d == 2 ? 11 : 7);
      const auto k = assemble(field_for(d, fam), g);
      for (Index r = 0; r < k.rows; ++r) {
        const MultiIndex mr = g.multi_index(g.interior_node(r));
        bool deep = true;
        for (int a = 0; a < d; ++a) deep = deep && mr[a] >= 2 && mr[a] <= g.nodes(a) - 3;
        double sum = 0, scale = 0;
        for (auto p = k.row_ptr[r]; p < k.row_ptr[r + 1]; ++p) {
          const MultiIndex mc = g.multi_index(g.interior_node(k.col[p]));
          for (int a = 0; a < d; ++a) EXPECT_LE(std::abs(mc[a] - mr[a]), 1);
          sum += k.val[p];
          scale += std::abs(k.val[p]);
        }
        if (deep) { EXPECT_LE(std::abs(sum), 1e-14 * scale); }
      }
    }
}

TEST(Assembly, AffineFunctionsAreInTheKernelOfDeepRows) {
  for (Family fam : kFamilies) {
    if (fam != Family::identity && fam != Family::nonsym_skew) continue;  // constant A only
    const BoxGrid g = build_grid(2, 1.0, 11);
    const auto k = assemble(make_field(2, fam), g);
    std::vector<double> u(static_cast<std::size_t>(k.rows));
    for (Index r = 0; r < k.rows; ++r) {
      const Point x = g.coordinate(g.interior_node(r));
      u[r] = 0.3 + 2.0 * x[0] - 1.5 * x[1];
    }
    const auto ku = matvec(k, u);
    for (Index r = 0; r < k.rows; ++r) {
      const MultiIndex m = g.multi_index(g.interior_node(r));
      if (m[0] >= 2 && m[0] <= 8 && m[1] >= 2 && m[1] <= 8) { EXPECT_NEAR(ku[r], 0.0, 1e-13); }
    }
  }
}

TEST(Assembly, DimensionMismatchRejected) {
  EXPECT_THROW(assemble(make_field(3, Family::identity), build_grid(2, 1.0, 5)), ConfigError);
}

TEST(LoadDelta, Examples) {
  const BoxGrid g = build_grid(2, 1.0, 9);
  const auto b = load_delta(g, g.center_node());
  EXPECT_EQ(std::count(b.begin(), b.end(), 1.0), 1);
  EXPECT_EQ(b[g.interior_index(g.center_node())], 1.0);
  EXPECT_THROW(load_delta(g, 0), SourcePlacementError);
  EXPECT_THROW(load_delta(g, g.node_count()), SourcePlacementError);
  const auto c = load_delta(g, g.center_node() + 1);
  double dot = 0;
  for (std::size_t i = 0; i < b.size(); ++i) dot += b[i] * c[i];
  EXPECT_EQ(dot, 0.0);
}

TEST(Gradient, LinearReproduction) {
  for (int d : {2, 3}) {
    const BoxGrid g = build_grid(d, 1.0, 9);
    std::vector<double> v(static_cast<std::size_t>(g.node_count()));
    for (Index i = 0; i < g.node_count(); ++i) {
      const Point x = g.coordinate(i);
      v[i] = 1.0 + 2.0 * x[0] - 3.0 * x[1] + (d == 3 ? 0.5 * x[2] : 0.0);
    }
    const auto grad = gradient_field(v, g);
    for (Index i = 0; i < g.node_count(); ++i) {
      EXPECT_NEAR(grad[i][0], 2.0, 1e-13);
      EXPECT_NEAR(grad[i][1], -3.0, 1e-13);
      if (d == 3) { EXPECT_NEAR(grad[i][2], 0.5, 1e-13); }
    }
  }
}

TEST(Gradient, ConstantGivesZero) {
  const BoxGrid g = build_grid(3, 1.0, 7);
  const std::vector<double> v(static_cast<std::size_t>(g.node_count()), 4.2);
  for (const auto& gr : gradient_field(v, g))
    for (double c : gr) EXPECT_NEAR(c, 0.0, 1e-14);  // one-sided boundary stencil rounds
}

TEST(Gradient, BilinearMonomialSecondOrder) {
  double prev = 0;
  for (int n : {17, 33, 65}) {
    const BoxGrid g = build_grid(2, 1.0, n);
    std::vector<double> v(static_cast<std::size_t>(g.node_count()));
    for (Index i = 0; i < g.node_count(); ++i) {
      const Point x = g.coordinate(i);
      v[i] = x[0] * x[1] + x[0] * x[0] * x[0];
    }
    const auto grad = gradient_field(v, g);
    double err = 0;
    for (Index i = 0; i < g.node_count(); ++i) {
      if (g.is_boundary(i)) continue;
      const Point x = g.coordinate(i);
      err = std::max(err, std::hypot(grad[i][0] - (x[1] + 3 * x[0] * x[0]), grad[i][1] - x[0]));
    }
    EXPECT_LE(err, 1.5 * g.spacing() * g.spacing());
    if (prev > 0) { EXPECT_LT(err, 0.3 * prev); }
    prev = err;
  }
}
