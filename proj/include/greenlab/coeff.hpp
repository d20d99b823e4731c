#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace greenlab {

/// Point in R^d, d <= 3; unused trailing components are zero.
using Point = std::array<double, 3>;

/// Small dense d x d matrix stored row-major in a 3x3 buffer.
struct Matrix {
  int dim = 0;
  std::array<double, 9> a{};

  double operator()(int i, int j) const { return a[3 * i + j]; }
  double& operator()(int i, int j) { return a[3 * i + j]; }

  Matrix transposed() const;
  static Matrix identity(int dim);
};

enum class Family { identity, scalar_trig, diag_aniso, nonsym_skew };

std::string_view to_string(Family f);
Family parse_family(std::string_view tag);

/// A Z^d-periodic coefficient field A(x) from one of the built-in
/// trigonometric families, plus its declared structural constants.
///
/// Family parameters (all optional, defaults in brackets):
///   identity    : none
///   scalar_trig : base [2], amplitude [1], frequency [1]
///                 a(x) = base + amplitude * prod_i sin(2 pi frequency x_i)
///   diag_aniso  : amplitude [0.2], s_1 [1], s_2 [1.3], s_3 [1.15]
///                 A_ii(x) = s_i + amplitude * cos(2 pi x_{i+1 mod d})
///   nonsym_skew : skew [0.3], amplitude [0], modulation [0]
///                 A(x) = (1 + amplitude * prod_i sin(2 pi x_i)) I
///                        + skew (1 + modulation * cos(2 pi x_1)) J,
///                 J_kl = +1 (k < l), -1 (k > l). A constant skew part
///                 drops out of the operator; modulation makes it non-symmetric.
struct PeriodicField {
  int dim = 2;
  Family family = Family::identity;
  std::vector<double> params;
  double alpha = 1.0;            // declared coercivity constant
  double bound = 1.0;            // declared sup of |A_ij|
  double holder_exponent = 1.0;  // metadata only
  bool transposed = false;       // evaluate returns A(x)^T when set

  bool is_symmetric() const;
};

/// Builds a field with defaults filled in and alpha/bound derived from the
/// parameters. Throws ConfigError on bad dimension or parameter count and
/// NonCoerciveError when the declared alpha would be <= 0.
PeriodicField make_field(int dim, Family family, std::vector<double> params = {});

/// The field whose evaluation is A(x)^T; its Green function is the adjoint one.
PeriodicField transpose(const PeriodicField& field);

Matrix evaluate(const PeriodicField& field, const Point& x);

/// Smallest eigenvalue of the symmetric part of a d x d matrix, d in {2,3}.
double min_symmetric_eigenvalue(const Matrix& m);

/// Minimum over the lattice {k / samples}^d in the unit cell of the smallest
/// eigenvalue of (A + A^T)/2. Throws NonCoerciveError if it is <= 0 and
/// ConfigError if it falls below the declared alpha.
double verify_coercivity(const PeriodicField& field, int samples_per_axis);

/// Compares A(x + k) with A(x) at `trials` random points and integer shifts
/// |k|_inf <= 3. True when every entry agrees to 1e-14 * bound.
bool verify_periodicity(const PeriodicField& field, int trials, std::uint64_t seed);

}  // namespace greenlab
