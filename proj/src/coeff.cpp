#include "greenlab/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <span>

#include "greenlab/errors.hpp"

namespace greenlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(2 pi t) with the argument reduced to [-1/2, 1/2] first, so that shifts
// of t by integers change the result only through the rounding of t itself.
double sin_turns(double t) {
  const double r = t - std::nearbyint(t);
  return std::sin(kTwoPi * r);
}

double cos_turns(double t) {
  const double r = t - std::nearbyint(t);
  return std::cos(kTwoPi * r);
}

double sine_product(const Point& x, int dim, double freq) {
  double p = 1.0;
  for (int i = 0; i < dim; ++i) p *= sin_turns(freq * x[i]);
  return p;
}

std::size_t param_count(Family f, int dim) {
  switch (f) {
    case Family::identity: return 0;
    case Family::scalar_trig: return 3;
    case Family::diag_aniso: return 1 + static_cast<std::size_t>(dim);
    case Family::nonsym_skew: return 3;
  }
  return 0;
}

std::vector<double> default_params(Family f, int dim) {
  switch (f) {
    case Family::identity: return {};
    case Family::scalar_trig: return {2.0, 1.0, 1.0};
    case Family::diag_aniso: {
      std::vector<double> p{0.2, 1.0, 1.3, 1.15};
      p.resize(1 + static_cast<std::size_t>(dim));
      return p;
    }
    case Family::nonsym_skew: return {0.3, 0.0, 0.0};
  }
  return {};
}

}  // namespace

Matrix Matrix::transposed() const {
  Matrix t{dim, {}};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) t(i, j) = (*this)(j, i);
  return t;
}

Matrix Matrix::identity(int dim) {
  Matrix m{dim, {}};
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::identity: return "identity";
    case Family::scalar_trig: return "scalar_trig";
    case Family::diag_aniso: return "diag_aniso";
    case Family::nonsym_skew: return "nonsym_skew";
  }
  return "unknown";
}

Family parse_family(std::string_view tag) {
  if (tag == "identity") return Family::identity;
  if (tag == "scalar_trig") return Family::scalar_trig;
  if (tag == "diag_aniso") return Family::diag_aniso;
  if (tag == "nonsym_skew") return Family::nonsym_skew;
  throw ConfigError("unknown coefficient family '" + std::string(tag) + "'");
}

bool PeriodicField::is_symmetric() const {
  if (family != Family::nonsym_skew) return true;
  return params.empty() || params[0] == 0.0;
}

PeriodicField make_field(int dim, Family family, std::vector<double> params) {
  if (dim != 2 && dim != 3) throw ConfigError("field dimension must be 2 or 3");
  const auto defaults = default_params(family, dim);
  if (params.size() > param_count(family, dim))
    throw ConfigError("too many parameters for family " + std::string(to_string(family)));
  for (std::size_t i = params.size(); i < defaults.size(); ++i) params.push_back(defaults[i]);
  for (double v : params)
    if (!std::isfinite(v)) throw ConfigError("non-finite field parameter");

  PeriodicField f;
  f.dim = dim;
  f.family = family;
  f.params = std::move(params);
  const auto& p = f.params;
  switch (family) {
    case Family::identity:
      f.alpha = 1.0;
      f.bound = 1.0;
      break;
    case Family::scalar_trig:
      f.alpha = p[0] - std::abs(p[1]);
      f.bound = p[0] + std::abs(p[1]);
      break;
    case Family::diag_aniso: {
      const auto s = std::span(p).subspan(1);
      f.alpha = *std::min_element(s.begin(), s.end()) - std::abs(p[0]);
      f.bound = *std::max_element(s.begin(), s.end()) + std::abs(p[0]);
      break;
    }
    case Family::nonsym_skew:
      f.alpha = 1.0 - std::abs(p[1]);
      f.bound = std::max(1.0 + std::abs(p[1]), std::abs(p[0]) * (1.0 + std::abs(p[2])));
      break;
  }
  if (!(f.alpha > 0.0))
    throw NonCoerciveError("field parameters give non-positive coercivity constant");
  return f;
}

PeriodicField transpose(const PeriodicField& field) {
  PeriodicField t = field;
  t.transposed = !field.transposed;
  return t;
}

Matrix evaluate(const PeriodicField& field, const Point& x) {
  const int d = field.dim;
  const auto& p = field.params;
  Matrix m{d, {}};
  switch (field.family) {
    case Family::identity:
      m = Matrix::identity(d);
      break;
    case Family::scalar_trig: {
      const double a = p[0] + p[1] * sine_product(x, d, p[2]);
      for (int i = 0; i < d; ++i) m(i, i) = a;
      break;
    }
    case Family::diag_aniso:
      for (int i = 0; i < d; ++i) m(i, i) = p[1 + i] + p[0] * cos_turns(x[(i + 1) % d]);
      break;
    case Family::nonsym_skew: {
      const double a = 1.0 + p[1] * sine_product(x, d, 1.0);
      const double w = p[0] * (1.0 + p[2] * cos_turns(x[0]));
      for (int i = 0; i < d; ++i) {
        m(i, i) = a;
        for (int j = i + 1; j < d; ++j) {
          m(i, j) = w;
          m(j, i) = -w;
        }
      }
      break;
    }
  }
  return field.transposed ? m.transposed() : m;
}

double min_symmetric_eigenvalue(const Matrix& m) {
  auto s = [&](int i, int j) { return 0.5 * (m(i, j) + m(j, i)); };
  if (m.dim == 2) {
    const double a = s(0, 0), b = s(0, 1), c = s(1, 1);
    const double mean = 0.5 * (a + c);
    const double half_diff = 0.5 * (a - c);
    return mean - std::hypot(half_diff, b);
  }
  if (m.dim != 3) throw ConfigError("eigenvalues implemented for d = 2, 3 only");

  // Closed-form trigonometric solution for symmetric 3x3 matrices.
  const double a00 = s(0, 0), a11 = s(1, 1), a22 = s(2, 2);
  const double a01 = s(0, 1), a02 = s(0, 2), a12 = s(1, 2);
  const double off = a01 * a01 + a02 * a02 + a12 * a12;
  if (off == 0.0) return std::min({a00, a11, a22});
  const double q = (a00 + a11 + a22) / 3.0;
  const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
  const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off;
  const double p = std::sqrt(p2 / 6.0);
  const double det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) +
                     a02 * (a01 * a12 - b11 * a02);
  const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  // Eigenvalues are q + 2p cos(phi + 2 pi k / 3); k = 1 gives the smallest.
  return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

double verify_coercivity(const PeriodicField& field, int samples_per_axis) {
  if (samples_per_axis < 2) throw ConfigError("samples_per_axis must be >= 2");
  const int d = field.dim;
  const int s = samples_per_axis;
  const int total = d == 2 ? s * s : s * s * s;
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < total; ++k) {
    Point x{};
    int rem = k;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = static_cast<double>(rem % s) / s;
      rem /= s;
    }
    lowest = std::min(lowest, min_symmetric_eigenvalue(evaluate(field, x)));
  }
  if (!(lowest > 0.0)) throw NonCoerciveError("sampled symmetric part is not positive definite");
  if (lowest < field.alpha - 1e-12 * field.bound)
    throw ConfigError("declared coercivity constant exceeds the sampled minimum");
  return lowest;
}

bool verify_periodicity(const PeriodicField& field, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> shift(-3, 3);
  const double tol = 1e-14 * field.bound;
  for (int t = 0; t < trials; ++t) {
    Point x{}, xs{};
    for (int i = 0; i < field.dim; ++i) {
      x[i] = unit(rng);
      xs[i] = x[i] + shift(rng);
    }
    const Matrix a = evaluate(field, x);
    const Matrix b = evaluate(field, xs);
    for (std::size_t i = 0; i < a.a.size(); ++i)
      if (std::abs(a.a[i] - b.a[i]) > tol) return false;
  }
  return true;
}

}  // namespace greenlab
