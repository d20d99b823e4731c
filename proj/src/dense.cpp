#include <algorithm>
#include <cmath>
#include <string>

#include "greenlab/errors.hpp"
#include "greenlab/sparse.hpp"

namespace greenlab {

DenseLu::DenseLu(const CsrMatrix& a) : n_(a.rows) {
  if (n_ > kDenseLimit)
    throw ConfigError("dense oracle limited to " + std::to_string(kDenseLimit) + " unknowns, got " +
                      std::to_string(n_));
  const auto n = static_cast<std::size_t>(n_);
  lu_.assign(n * n, 0.0);
  for (std::int64_t i = 0; i < n_; ++i)
    for (auto k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) lu_[i * n + a.col[k]] = a.val[k];
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = static_cast<std::int64_t>(i);

  double scale = 0.0;
  for (double v : lu_) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-14 * scale * static_cast<double>(std::max<std::size_t>(n, 1));

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_[i * n + k]) > std::abs(lu_[piv * n + k])) piv = i;
    if (!(std::abs(lu_[piv * n + k]) > tiny))
      throw SingularMatrixError("matrix is numerically singular at column " + std::to_string(k));
    if (piv != k) {
      std::swap_ranges(lu_.begin() + k * n, lu_.begin() + (k + 1) * n, lu_.begin() + piv * n);
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double& l = lu_[i * n + k];
      if (l == 0.0) continue;
      l *= inv;
      for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= l * lu_[k * n + j];
    }
  }
}

std::vector<double> DenseLu::solve(std::span<const double> rhs) const {
  if (static_cast<std::int64_t>(rhs.size()) != n_)
    throw ConfigError("right-hand side length does not match the system");
  const auto n = static_cast<std::size_t>(n_);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[static_cast<std::size_t>(perm_[i])];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_[i * n + j] * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_[i * n + j] * x[j];
    x[i] /= lu_[i * n + i];
  }
  return x;
}

std::vector<double> dense_solve(const CsrMatrix& a, std::span<const double> rhs) {
  return DenseLu(a).solve(rhs);
}

}  // namespace greenlab
