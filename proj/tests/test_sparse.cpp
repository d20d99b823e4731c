#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "greenlab/assembly.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/sparse.hpp"

using namespace greenlab;

namespace {

CsrMatrix dense_to_csr(const std::vector<std::vector<double>>& a, bool symmetric) {
  std::vector<std::int64_t> r;
  std::vector<std::int32_t> c;
  std::vector<double> v;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != 0.0) {
        r.push_back(static_cast<std::int64_t>(i));
        c.push_back(static_cast<std::int32_t>(j));
        v.push_back(a[i][j]);
      }
  return CsrMatrix::from_triplets(static_cast<std::int64_t>(a.size()), r, c, v, symmetric);
}

const CsrMatrix kSpd = dense_to_csr({{2, -1}, {-1, 2}}, true);
const CsrMatrix kGeneral = dense_to_csr({{2, 1}, {-1, 2}}, false);

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Csr, InvariantsAndDuplicateMerging) {
  const auto m = CsrMatrix::from_triplets(2, {1, 0, 0, 1}, {1, 1, 0, 1}, {1.0, 2.0, 3.0, 4.0}, false);
  EXPECT_TRUE(check_invariants(m));
  EXPECT_EQ(m.at(1, 1), 5.0);
  EXPECT_EQ(m.at(0, 1), 2.0);
  EXPECT_EQ(m.at(1, 0), 0.0);
  EXPECT_EQ(m.nnz(), 3);
}

TEST(Csr, TransposeIsInvolution) {
  const auto t = transpose(kGeneral);
  EXPECT_EQ(t.at(0, 1), -1.0);
  EXPECT_EQ(t.at(1, 0), 1.0);
  const auto tt = transpose(t);
  EXPECT_EQ(tt.row_ptr, kGeneral.row_ptr);
  EXPECT_EQ(tt.col, kGeneral.col);
  EXPECT_EQ(tt.val, kGeneral.val);
}

TEST(Matvec, SmallExamples) {
  const auto id = dense_to_csr({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, true);
  const std::vector<double> x{0.5, -2, 7};
  EXPECT_EQ(matvec(id, x), x);
  EXPECT_EQ(matvec(kSpd, std::vector<double>{1, 1}), (std::vector<double>{1, 1}));
  EXPECT_EQ(matvec(kSpd, std::vector<double>{1, 0}), (std::vector<double>{2, -1}));
  EXPECT_THROW(matvec(kSpd, std::vector<double>{1, 0, 0}), ConfigError);
}

TEST(Kernels, ParallelMatvecAndDotMatchSerialBitwise) {
  const auto field = make_field(3, Family::scalar_trig);
  const auto k = assemble(field, build_grid(3, 1.0, 17));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(static_cast<std::size_t>(k.rows)), y1(x.size()), y2(x.size());
  for (double& v : x) v = u(rng);
  kernels::matvec(k, x, y1);
  kernels::matvec_serial(k, x, y2);
  EXPECT_EQ(y1, y2);
  EXPECT_EQ(kernels::dot(x, y1), kernels::dot_serial(x, y1));
  // Lengths straddling the reduction block size.
  for (std::size_t n : {1u, 2047u, 2048u, 2049u, 10000u}) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = u(rng), b[i] = u(rng);
    EXPECT_EQ(kernels::dot(a, b), kernels::dot_serial(a, b));
  }
}

TEST(SolveSpd, TwoByTwo) {
  const auto r = solve_spd(kSpd, std::vector<double>{1, 0});
  EXPECT_NEAR(r.x[0], 2.0 / 3, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0 / 3, 1e-12);
  EXPECT_LE(r.relative_residual, 1e-10);
}

TEST(SolveSpd, ZeroRhsGivesZero) {
  const auto r = solve_spd(kSpd, std::vector<double>{0, 0});
  EXPECT_EQ(r.x, (std::vector<double>{0, 0}));
  EXPECT_EQ(r.iterations, 0);
}

TEST(SolveSpd, RequiresSymmetricFlag) { EXPECT_THROW(solve_spd(kGeneral, std::vector<double>{1, 0}), ConfigError); }

TEST(SolveSpd, RejectsBadTolerance) {
  SolverSettings s;
  s.rel_tol = 1.5;
  EXPECT_THROW(solve_spd(kSpd, std::vector<double>{1, 0}, s), ConfigError);
}

TEST(SolveSpd, LaplacianColumnMatchesDenseOracle) {
  const BoxGrid g = build_grid(2, 1.0, 17);
  const auto k = assemble(make_field(2, Family::identity), g);
  const auto b = load_delta(g, g.center_node());
  const auto it = solve_spd(k, b);
  EXPECT_LE(max_diff(it.x, dense_solve(k, b)), 1e-8);
  // Residual contract re-checked with one extra matvec.
  const auto kx = matvec(k, it.x);
  double rr = 0, bb = 0;
  for (std::size_t i = 0; i < kx.size(); ++i) rr += (kx[i] - b[i]) * (kx[i] - b[i]), bb += b[i] * b[i];
  EXPECT_LE(std::sqrt(rr / bb), 1e-10);
}

TEST(SolveSpd, IterationCapRaisesConvergenceError) {
  const BoxGrid g = build_grid(2, 1.0, 33);
  const auto k = assemble(make_field(2, Family::identity), g);
  SolverSettings s;
  s.max_iter = 3;
  try {
    solve_spd(k, load_delta(g, g.center_node()), s);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-10);
    EXPECT_GE(e.iterations(), 3);
  }
}

TEST(SolveGeneral, SmallExamples) {
  const auto a = solve_general(kSpd, std::vector<double>{1, 0});
  EXPECT_NEAR(a.x[0], 2.0 / 3, 1e-12);
  EXPECT_NEAR(a.x[1], 1.0 / 3, 1e-12);
  const auto b = solve_general(kGeneral, std::vector<double>{3, 1});
  EXPECT_NEAR(b.x[0], 1.0, 1e-12);
  EXPECT_NEAR(b.x[1], 1.0, 1e-12);
}

TEST(SolveGeneral, SkewFieldMatchesDenseOracle) {
  const BoxGrid g = build_grid(2, 1.0, 17);
  for (const auto& params : {std::vector<double>{}, std::vector<double>{0.3, 0.2, 0.5}}) {
    const auto k = assemble(make_field(2, Family::nonsym_skew, params), g);
    const auto b = load_delta(g, g.center_node() + 3);
    EXPECT_LE(max_diff(solve_general(k, b).x, dense_solve(k, b)), 1e-8);
  }
}

TEST(Solve, DeterministicAcrossRuns) {
  const BoxGrid g = build_grid(3, 1.0, 17);
  const auto k = assemble(make_field(3, Family::diag_aniso), g);
  const auto b = load_delta(g, g.center_node());
  EXPECT_EQ(solve(k, b).x, solve(k, b).x);
}

TEST(Dense, SmallExamples) {
  const auto id = dense_to_csr({{1, 0}, {0, 1}}, true);
  EXPECT_EQ(dense_solve(id, std::vector<double>{4, 5}), (std::vector<double>{4, 5}));
  const auto x = dense_solve(kSpd, std::vector<double>{1, 0});
  EXPECT_NEAR(x[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(x[1], 1.0 / 3, 1e-15);
  EXPECT_THROW(dense_solve(dense_to_csr({{1, 1}, {1, 1}}, true), std::vector<double>{1, 0}), SingularMatrixError);
}

TEST(Dense, PivotingHandlesZeroLeadingEntry) {
  const auto a = dense_to_csr({{0, 1}, {1, 0}}, true);
  const auto x = dense_solve(a, std::vector<double>{2, 3});
  EXPECT_DOUBLE_EQ(x[0], 3);
  EXPECT_DOUBLE_EQ(x[1], 2);
}

TEST(Dense, RejectsOversizedSystems) {
  const BoxGrid g = build_grid(2, 1.0, 67);  // 65^2 = 4225 unknowns
  const auto k = assemble(make_field(2, Family::identity), g);
  EXPECT_THROW(DenseLu{k}, ConfigError);
}
