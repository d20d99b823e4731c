#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "greenlab/analysis.hpp"
#include "greenlab/assembly.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/green.hpp"

using namespace greenlab;

namespace {

const Family kFamilies[] = {Family::identity, Family::scalar_trig, Family::diag_aniso, Family::nonsym_skew};
constexpr double kPi = std::numbers::pi;

PeriodicField field_for(int d, Family fam) {
  return fam == Family::nonsym_skew ? make_field(d, fam, {0.3, 0.2, 0.5}) : make_field(d, fam);
}

double shell_mean(const GreenColumn& c, double r) {
  const Point y = c.grid.coordinate(c.source);
  return annulus_mean(c.values, c.grid, AnnulusSpec{y, 0.1, {r}}).front();
}

}  // namespace

TEST(GreenColumn, BoundaryZeroPositiveAndPeakedAtSource) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const BoxGrid g = build_grid(d, 1.0, d == 2 ? 33 : 17);
      const auto col = green_column(field_for(d, fam), g, g.center_node());
      for (Index i = 0; i < g.node_count(); ++i)
        if (g.is_boundary(i)) { EXPECT_EQ(col.values[i], 0.0); }
      EXPECT_GE(col.min_value(), -1e-12 * col.max_value()) << to_string(fam) << " d=" << d;
      EXPECT_EQ(col.values[col.source], col.max_value());
    }
}

TEST(GreenColumn, OffCentreSourceStaysPositive) {
  const BoxGrid g = build_grid(3, 1.0, 17);
  const Index src = g.center_node() + 3 * g.stride(0) - 2 * g.stride(2);
  const auto col = green_column(make_field(3, Family::diag_aniso), g, src);
  EXPECT_GE(col.min_value(), -1e-12 * col.max_value());
  EXPECT_EQ(col.values[src], col.max_value());
}

TEST(GreenColumn, BoundarySourceRejected) {
  const BoxGrid g = build_grid(2, 1.0, 9);
  EXPECT_THROW(green_column(make_field(2, Family::identity), g, 0), SourcePlacementError);
}

// The Dirichlet corrector is nearly constant near the source, so the
// difference of shell values isolates the singular part 1/(4 pi r).
TEST(GreenColumn, ThreeDimensionalDifferenceMatchesFundamentalSolution) {
  const BoxGrid g = build_grid(3, 2.0, 65);
  const auto col = green_column(make_field(3, Family::identity), g, g.center_node());
  const double r1 = 4 * g.spacing(), r2 = 0.5;
  const double measured = shell_mean(col, r1) - shell_mean(col, r2);
  const double expected = (1.0 / r1 - 1.0 / r2) / (4 * kPi);
  EXPECT_NEAR(measured / expected, 1.0, 0.1);
}

TEST(GreenColumn, TwoDimensionalDifferenceMatchesLogKernel) {
  const BoxGrid g = build_grid(2, 1.0, 65);
  const auto col = green_column(make_field(2, Family::identity), g, g.center_node());
  const double r1 = 4 * g.spacing(), r2 = 0.25;
  const double measured = shell_mean(col, r1) - shell_mean(col, r2);
  EXPECT_NEAR(measured / (std::log(r2 / r1) / (2 * kPi)), 1.0, 0.05);
}

TEST(Normalize2d, ConstantColumnBecomesZero) {
  const BoxGrid g = build_grid(2, 2.0, 17);
  GreenColumn c;
  c.grid = g;
  c.source = g.center_node();
  c.values.assign(static_cast<std::size_t>(g.node_count()), 2.5);
  const auto n = normalize_2d(c);
  for (double v : n.values) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(n.normalization_offset, 2.5);
}

TEST(Normalize2d, MeanZeroAndIdempotent) {
  const BoxGrid g = build_grid(2, 2.0, 33);
  const auto n = normalize_2d(green_column(make_field(2, Family::scalar_trig), g, g.center_node()));
  double sum = 0, scale = 0;
  Index count = 0;
  for (Index i = 0; i < g.node_count(); ++i)
    if (distance(g.coordinate(i), {}) <= 1.0) sum += n.values[i], scale += std::abs(n.values[i]), ++count;
  EXPECT_LE(std::abs(sum), 1e-13 * scale);
  const auto again = normalize_2d(n);
  EXPECT_NEAR(again.normalization_offset, n.normalization_offset, 1e-13 * scale / count);
  for (std::size_t i = 0; i < n.values.size(); ++i) EXPECT_NEAR(again.values[i], n.values[i], 1e-14);
}

TEST(Normalize2d, Preconditions) {
  const BoxGrid g3 = build_grid(3, 2.0, 9);
  GreenColumn c3;
  c3.grid = g3;
  c3.values.assign(static_cast<std::size_t>(g3.node_count()), 0.0);
  EXPECT_THROW(normalize_2d(c3), ConfigError);
  const BoxGrid g = build_grid(2, 1.0, 17);
  const Index off = *g.node_at({0.5, 0, 0});
  EXPECT_THROW(normalize_2d(green_column(make_field(2, Family::identity), g, off)), PreconditionError);
}

TEST(Normalize2d, ConstantOfLogFitReproducibleAcrossResolutions) {
  std::vector<double> c0;
  for (int n : {65, 129}) {
    const BoxGrid g = build_grid(2, 4.0, n);
    const auto col = normalize_2d(green_column(make_field(2, Family::identity), g, g.center_node()));
    double sum = 0;
    int count = 0;
    for (Index i = 0; i < g.node_count(); ++i) {
      const double r = distance(g.coordinate(i), {});
      if (r < 4 * g.spacing() || r > 1.0) continue;
      sum += col.values[i] + std::log(r) / (2 * kPi);
      ++count;
    }
    c0.push_back(sum / count);
  }
  EXPECT_NEAR(c0[1] / c0[0], 1.0, 0.02);
}

TEST(DomainGrowth, ThreeDimensionalMonotoneAndConverging) {
  const auto g = domain_growth(make_field(3, Family::identity), {}, {1, 2, 4}, 1.0 / 8);
  EXPECT_TRUE(g.monotone);
  ASSERT_EQ(g.successive_difference.size(), 2u);
  EXPECT_LT(g.successive_difference[1], g.successive_difference[0]);
}

TEST(DomainGrowth, TwoDimensionalDriftIsLogarithmic) {
  const auto g = domain_growth(make_field(2, Family::identity), {}, {1, 2, 4}, 1.0 / 16);
  EXPECT_TRUE(g.monotone);
  for (double drift : g.source_drift) EXPECT_NEAR(drift / (std::log(2.0) / (2 * kPi)), 1.0, 0.1);
}

TEST(DomainGrowth, MonotoneForEveryField) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const auto g = domain_growth(field_for(d, fam), {}, {1, 2}, d == 2 ? 1.0 / 16 : 1.0 / 8);
      EXPECT_TRUE(g.monotone) << to_string(fam) << " d=" << d << " worst " << g.worst_violation;
    }
}

TEST(DomainGrowth, SingleBoxAndBadInput) {
  EXPECT_TRUE(domain_growth(make_field(2, Family::identity), {}, {1}, 0.25).monotone);
  EXPECT_THROW(domain_growth(make_field(2, Family::identity), {}, {2, 1}, 0.25), ConfigError);
  EXPECT_THROW(domain_growth(make_field(2, Family::identity), {}, {1, 2}, 0.3), ConfigError);
  EXPECT_THROW(domain_growth(make_field(2, Family::identity), {0.1, 0, 0}, {1, 2}, 0.25), ConfigError);
}

TEST(Adjoint, SymmetricFieldGivesSameColumn) {
  const BoxGrid g = build_grid(2, 1.0, 17);
  const auto f = make_field(2, Family::scalar_trig);
  const Index x = g.center_node() + 2;
  const auto a = adjoint_column(f, g, x), b = green_column(f, g, x);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
}

TEST(Adjoint, IdentityRecoversLaplacianColumn) {
  const BoxGrid g = build_grid(3, 1.0, 9);
  const auto f = make_field(3, Family::identity);
  const auto a = adjoint_column(f, g, g.center_node());
  const auto k = assemble(f, g);
  const auto ref = extend_to_nodes(g, dense_solve(k, load_delta(g, g.center_node())));
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(a.values[i], ref[i], 1e-10);
}

TEST(Adjoint, TransposeIdentityForSkewFields) {
  const BoxGrid g = build_grid(2, 1.0, 17);
  for (const auto& params : {std::vector<double>{}, std::vector<double>{0.3, 0.2, 0.5}}) {
    const auto f = make_field(2, Family::nonsym_skew, params);
    const SolverSettings tight{1e-12, 0};
    double scale = 0, gap = 0;
    const Index c = g.center_node();
    const Index xs[] = {c, c + 3, c - 2 * g.stride(0) + 1, c + 5 * g.stride(0) - 4};
    for (Index x : xs) {
      const auto adj = adjoint_column(f, g, x, tight);
      for (Index y : xs) {
        const auto col = green_column(f, g, y, tight);
        gap = std::max(gap, std::abs(adj.values[y] - col.values[x]));
        scale = std::max(scale, col.max_value());
      }
    }
    EXPECT_LE(gap, 1e-8 * scale);
  }
}

TEST(Mixed, TwoDimensionalExponent) {
  const BoxGrid g = build_grid(2, 4.0, 129);
  const auto m = frobenius(mixed_derivative(make_field(2, Family::identity), g, g.center_node()), 2);
  const auto rep = measure_decay(m, g, {}, default_window(g), 8, Quantity::mixed);
  EXPECT_NEAR(rep.fitted_exponent, -2.0, 0.2);
}

TEST(Mixed, ConstantShiftLeavesTensorUnchanged) {
  const BoxGrid g = build_grid(2, 1.0, 17);
  const GreenSolver solver(make_field(2, Family::scalar_trig), g);
  const Index c = g.center_node();
  std::vector<std::vector<double>> plus, minus, plus_s, minus_s;
  for (int j = 0; j < 2; ++j) {
    plus.push_back(solver.column(c + g.stride(j)).values);
    minus.push_back(solver.column(c - g.stride(j)).values);
    plus_s.push_back(plus.back());
    minus_s.push_back(minus.back());
    for (double& v : plus_s.back()) v += 3.0;
    for (double& v : minus_s.back()) v += 3.0;
  }
  const auto a = mixed_from_columns(g, plus, minus), b = mixed_from_columns(g, plus_s, minus_s);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(a[i][k], b[i][k], 1e-12);
}

TEST(Mixed, SymmetricKernelGivesTransposedTensor) {
  const BoxGrid g = build_grid(2, 1.0, 65);
  const GreenSolver solver(make_field(2, Family::identity), g);
  const Index y = g.center_node() - 8 * g.stride(0);
  const Index x = g.center_node() + 8 * g.stride(0) + 4 * g.stride(1);
  const auto ty = mixed_derivative(solver, y);
  const auto tx = mixed_derivative(solver, x);
  double scale = 0;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) scale = std::max(scale, std::abs(ty[x][3 * k + j]));
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(ty[x][3 * k + j], tx[y][3 * j + k], 0.1 * scale);
}

TEST(Mixed, NeighbourOnBoundaryRejected) {
  const BoxGrid g = build_grid(2, 1.0, 9);
  const Index near_edge = g.node_index({1, 4, 0});
  EXPECT_THROW(mixed_derivative(make_field(2, Family::identity), g, near_edge), SourcePlacementError);
}
