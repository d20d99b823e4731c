#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "greenlab/coeff.hpp"
#include "greenlab/errors.hpp"

using namespace greenlab;

namespace {

const Family kFamilies[] = {Family::identity, Family::scalar_trig, Family::diag_aniso, Family::nonsym_skew};

// Smallest eigenvalue of the symmetric part by brute-force minimisation of
// the Rayleigh quotient over a fine sphere sampling.
double rayleigh_min(const Matrix& m) {
  double best = 1e300;
  if (m.dim == 2) {
    for (int k = 0; k < 20000; ++k) {
      const double t = std::numbers::pi * k / 20000;
      const double v[2] = {std::cos(t), std::sin(t)};
      double q = 0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q += v[i] * m(i, j) * v[j];
      best = std::min(best, q);
    }
  } else {
    for (int a = 0; a <= 400; ++a)
      for (int b = 0; b < 800; ++b) {
        const double th = std::numbers::pi * a / 400, ph = 2 * std::numbers::pi * b / 800;
        const double v[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        double q = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) q += v[i] * m(i, j) * v[j];
        best = std::min(best, q);
      }
  }
  return best;
}

}  // namespace

TEST(Coeff, IdentityEvaluatesToIdentity) {
  const auto f = make_field(2, Family::identity);
  const Matrix a = evaluate(f, {0.37, -1.2, 0.0});
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_EQ(a(1, 1), 1.0);
  EXPECT_EQ(a(0, 1), 0.0);
  EXPECT_EQ(a(1, 0), 0.0);
}

TEST(Coeff, ScalarTrigAtQuarterPoint) {
  const auto f = make_field(2, Family::scalar_trig, {2.0, 1.0, 1.0});
  const Matrix a = evaluate(f, {0.25, 0.25, 0.0});
  EXPECT_DOUBLE_EQ(a(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(a(1, 1), 3.0);
  EXPECT_EQ(a(0, 1), 0.0);
}

TEST(Coeff, SkewFieldIsConstantWithSkewPart) {
  const auto f = make_field(2, Family::nonsym_skew);
  for (const Point x : {Point{0, 0, 0}, Point{0.3, 0.9, 0}, Point{-4.1, 2.2, 0}}) {
    const Matrix a = evaluate(f, x);
    EXPECT_EQ(a(0, 0), 1.0);
    EXPECT_EQ(a(1, 1), 1.0);
    EXPECT_EQ(a(0, 1), 0.3);
    EXPECT_EQ(a(1, 0), -0.3);
  }
  EXPECT_FALSE(f.is_symmetric());
}

TEST(Coeff, TransposeSwapsOffDiagonal) {
  const auto f = make_field(3, Family::nonsym_skew, {0.3, 0.1, 0.5});
  const auto t = transpose(f);
  const Point x{0.12, 0.7, 0.33};
  const Matrix a = evaluate(f, x), b = evaluate(t, x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(a(i, j), b(j, i));
  EXPECT_EQ(transpose(t).transposed, f.transposed);
}

TEST(Coeff, CoercivityExamples) {
  EXPECT_DOUBLE_EQ(verify_coercivity(make_field(2, Family::identity), 16), 1.0);
  EXPECT_DOUBLE_EQ(verify_coercivity(make_field(2, Family::nonsym_skew), 16), 1.0);
  // min of 2 + sin sin is 1, reached at (1/4, 3/4): on the lattice when 4 | samples.
  const auto trig = make_field(2, Family::scalar_trig);
  EXPECT_NEAR(verify_coercivity(trig, 64), 1.0, 1e-12);
  EXPECT_GT(verify_coercivity(trig, 6), 1.0);
}

TEST(Coeff, CoercivityWithinFivePercentOfAnalyticMinimum) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const auto f = make_field(d, fam);
      const double sampled = verify_coercivity(f, d == 2 ? 64 : 24);
      EXPECT_GE(sampled, f.alpha - 1e-12);
      EXPECT_LE(sampled, 1.05 * f.alpha) << to_string(fam) << " d=" << d;
    }
}

TEST(Coeff, ClosedFormEigenvalueMatchesRayleighQuotient) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int d : {2, 3})
    for (int trial = 0; trial < 20; ++trial) {
      Matrix m{d, {}};
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = u(rng);
      EXPECT_NEAR(min_symmetric_eigenvalue(m), rayleigh_min(m), 1e-3);
    }
}

TEST(Coeff, NonCoerciveParametersRejected) {
  EXPECT_THROW(make_field(2, Family::scalar_trig, {1.0, 1.0}), NonCoerciveError);
  EXPECT_THROW(make_field(2, Family::diag_aniso, {1.5}), NonCoerciveError);
  EXPECT_THROW(make_field(2, Family::nonsym_skew, {0.3, 1.0}), NonCoerciveError);
}

TEST(Coeff, BadConfigurationRejected) {
  EXPECT_THROW(parse_family("laplace"), ConfigError);
  EXPECT_THROW(make_field(4, Family::identity), ConfigError);
  EXPECT_THROW(make_field(2, Family::identity, {1.0}), ConfigError);
  EXPECT_THROW(make_field(2, Family::scalar_trig, {2.0, NAN}), ConfigError);
  EXPECT_THROW(verify_coercivity(make_field(2, Family::identity), 1), ConfigError);
  EXPECT_THROW(verify_periodicity(make_field(2, Family::identity), 0, 1), ConfigError);
}

TEST(Coeff, FamilyTagsRoundTrip) {
  for (Family fam : kFamilies) EXPECT_EQ(parse_family(to_string(fam)), fam);
}

TEST(Coeff, PeriodicityHoldsForBuiltinFamilies) {
  for (int d : {2, 3})
    for (Family fam : kFamilies) EXPECT_TRUE(verify_periodicity(make_field(d, fam), 500, 42));
  EXPECT_TRUE(verify_periodicity(make_field(2, Family::nonsym_skew, {0.3, 0.2, 0.5}), 500, 1));
}

TEST(Coeff, HalfIntegerFrequencyIsNotPeriodic) {
  const auto f = make_field(2, Family::scalar_trig, {2.0, 1.0, 0.5});
  EXPECT_FALSE(verify_periodicity(f, 100, 3));
  // sin flips sign under a unit shift.
  const Matrix a = evaluate(f, {0.3, 0.4, 0}), b = evaluate(f, {1.3, 0.4, 0});
  EXPECT_NEAR(a(0, 0) - 2.0, -(b(0, 0) - 2.0), 1e-14);
}

TEST(Coeff, EvaluateIsDeterministicAndBounded) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int d : {2, 3})
    for (Family fam : kFamilies) {
      const auto f = make_field(d, fam);
      for (int k = 0; k < 200; ++k) {
        const Point x{u(rng), u(rng), u(rng)};
        const Matrix a = evaluate(f, x), b = evaluate(f, x);
        for (int i = 0; i < 9; ++i) {
          EXPECT_EQ(a.a[i], b.a[i]);
          EXPECT_LE(std::abs(a.a[i]), f.bound + 1e-15);
        }
      }
    }
}
