#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "greenlab/assembly.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/green.hpp"
#include "greenlab/lift.hpp"

using namespace greenlab;

TEST(Slab, Shape) {
  const BoxGrid base = build_grid(2, 1.0, 9);
  const SlabGrid s = build_slab(base, 4.0);
  EXPECT_EQ(s.volume.dim(), 3);
  EXPECT_EQ(s.layers(), 33);
  EXPECT_EQ(s.volume.node_count(), 81 * 33);
  EXPECT_THROW(build_slab(base, 4.1), ConfigError);
  EXPECT_THROW(build_slab(build_grid(3, 1.0, 9), 4.0), ConfigError);
}

TEST(LiftedOperator, IdentityMatchesThreeDimensionalLaplacian) {
  const SlabGrid s = build_slab(build_grid(2, 1.0, 9), 2.0);
  const auto lifted = assemble_lifted(make_field(2, Family::identity), s);
  const auto direct = assemble(make_field(3, Family::identity), s.volume);
  EXPECT_EQ(lifted.row_ptr, direct.row_ptr);
  EXPECT_EQ(lifted.col, direct.col);
  EXPECT_EQ(lifted.val, direct.val);
}

TEST(LiftedOperator, SymmetryAndTranspose) {
  const SlabGrid s = build_slab(build_grid(2, 1.0, 9), 1.0);
  const auto sym = assemble_lifted(make_field(2, Family::scalar_trig), s);
  EXPECT_TRUE(sym.symmetric);
  const auto st = transpose(sym);
  EXPECT_EQ(st.val, sym.val);

  const auto skew = make_field(2, Family::nonsym_skew, {0.3, 0.2, 0.5});
  const auto k = assemble_lifted(skew, s);
  EXPECT_FALSE(k.symmetric);
  const auto kt = assemble_lifted(transpose(skew), s);
  const auto t = transpose(k);
  EXPECT_EQ(kt.row_ptr, t.row_ptr);
  EXPECT_EQ(kt.col, t.col);
  EXPECT_EQ(kt.val, t.val);
}

TEST(KappaIntegral, PositiveAndIncreasingInKappa) {
  const BoxGrid base = build_grid(2, 1.0, 17);
  const auto field = make_field(2, Family::scalar_trig);
  const SlabGrid s = build_slab(base, 4.0);
  const auto col = lifted_column(field, s, base.center_node());
  const auto full = kappa_integral(col, 4.0), half = kappa_integral(col, 2.0);
  ASSERT_EQ(full.size(), static_cast<std::size_t>(base.node_count()));
  for (Index i = 0; i < base.node_count(); ++i) {
    EXPECT_GE(full[i], 0.0);
    EXPECT_LE(half[i], full[i]);
    if (base.is_boundary(i)) { EXPECT_EQ(full[i], 0.0); }
  }
  EXPECT_GT(full[base.center_node()], 0.0);
  EXPECT_THROW(kappa_integral(col, 4.5), ConfigError);
  EXPECT_THROW(kappa_integral(col, 0.03), ConfigError);
}

TEST(ArctanKernel, ValuesAndLimit) {
  EXPECT_NEAR(arctan_kernel(1.0, 100.0), 2 * std::atan(100.0), 1e-15);
  EXPECT_NEAR(arctan_kernel(1.0, 100.0), 3.12159, 1e-5);
  EXPECT_NEAR(arctan_kernel(2.0, 1.0), std::atan(0.5), 1e-15);
  for (double r : {0.01, 0.5, 3.0}) EXPECT_NEAR(r * arctan_kernel(r, 1e14 * r), std::numbers::pi, 1e-12);
}

// Gradient of the kappa-integral against the gradient of the direct 2D
// column, node by node in an annulus away from source and boundary.
TEST(Lift, GradientMatchesDirectTwoDimensionalColumn) {
  const BoxGrid base = build_grid(2, 1.0, 33);
  const auto field = make_field(2, Family::identity);
  const SlabGrid s = build_slab(base, 4.0);
  const auto gk = kappa_integral(field, s, base.center_node(), 4.0);
  const auto g2 = green_column(field, base, base.center_node());
  const auto a = magnitude(gradient_field(gk, base), 2);
  const auto b = magnitude(gradient_field(g2.values, base), 2);
  int compared = 0;
  double worst = 0;
  for (Index i = 0; i < base.node_count(); ++i) {
    const double r = distance(base.coordinate(i), {});
    if (r < 3 * base.spacing() || r > 0.5) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / b[i]);
    ++compared;
  }
  EXPECT_GT(compared, 100);
  EXPECT_LE(worst, 0.15);
}

TEST(Lift, CompareRejectsShortSlab) {
  const BoxGrid base = build_grid(2, 1.0, 17);
  EXPECT_THROW(compare_lift(make_field(2, Family::identity), base, base.center_node(), 2.0, default_window(base)),
               PreconditionError);
}
