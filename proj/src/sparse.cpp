#include "greenlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "greenlab/errors.hpp"

namespace greenlab {

double CsrMatrix::at(std::int64_t i, std::int64_t j) const {
  const auto begin = col.begin() + row_ptr[i];
  const auto end = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(j));
  if (it == end || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(rows), 0.0);
  for (std::int64_t i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::from_triplets(std::int64_t rows,
                                   std::vector<std::int64_t> r,
                                   std::vector<std::int32_t> c,
                                   std::vector<double> v,
                                   bool symmetric) {
  if (r.size() != c.size() || r.size() != v.size())
    throw ConfigError("triplet arrays differ in length");
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r[a] != r[b] ? r[a] < r[b] : c[a] < c[b];
  });
  CsrMatrix m;
  m.rows = rows;
  m.symmetric = symmetric;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t t = order[k];
    if (r[t] < 0 || r[t] >= rows || c[t] < 0 || c[t] >= rows)
      throw ConfigError("triplet index out of range");
    if (k > 0 && r[order[k - 1]] == r[t] && c[order[k - 1]] == c[t]) {
      m.val.back() += v[t];
      continue;
    }
    m.col.push_back(c[t]);
    m.val.push_back(v[t]);
    ++m.row_ptr[static_cast<std::size_t>(r[t]) + 1];
  }
  std::partial_sum(m.row_ptr.begin(), m.row_ptr.end(), m.row_ptr.begin());
  return m;
}

CsrMatrix transpose(const CsrMatrix& m) {
  CsrMatrix t;
  t.rows = m.rows;
  t.symmetric = m.symmetric;
  t.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
  for (auto c : m.col) ++t.row_ptr[static_cast<std::size_t>(c) + 1];
  std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
  t.col.resize(m.col.size());
  t.val.resize(m.val.size());
  std::vector<std::int64_t> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
  // Visiting rows in increasing order keeps the transposed columns sorted.
  for (std::int64_t i = 0; i < m.rows; ++i) {
    for (auto k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const auto dst = fill[static_cast<std::size_t>(m.col[k])]++;
      t.col[dst] = static_cast<std::int32_t>(i);
      t.val[dst] = m.val[k];
    }
  }
  return t;
}

bool check_invariants(const CsrMatrix& m) {
  if (static_cast<std::int64_t>(m.row_ptr.size()) != m.rows + 1) return false;
  for (std::int64_t i = 0; i < m.rows; ++i) {
    bool has_diag = false;
    for (auto k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      if (k > m.row_ptr[i] && m.col[k] <= m.col[k - 1]) return false;
      if (m.col[k] == i) has_diag = m.val[k] > 0.0;
    }
    if (!has_diag) return false;
  }
  if (m.symmetric) {
    for (std::int64_t i = 0; i < m.rows; ++i)
      for (auto k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        if (m.at(m.col[k], i) != m.val[k]) return false;
  }
  return true;
}

namespace kernels {

namespace {

inline double row_dot(const CsrMatrix& a, std::int64_t i, const double* x) {
  double s = 0.0;
  for (auto k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
  return s;
}

inline double block_dot(const double* x, const double* y, std::int64_t lo, std::int64_t hi) {
  double s = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const double* xp = x.data();
  double* yp = y.data();
  const std::int64_t n = a.rows;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) yp[i] = row_dot(a, i, xp);
}

void matvec_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::int64_t i = 0; i < a.rows; ++i) y[i] = row_dot(a, i, x.data());
}

double dot(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
  const std::int64_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b)
    partial[b] = block_dot(x.data(), y.data(), b * kReductionBlock,
                           std::min(n, (b + 1) * kReductionBlock));
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double dot_serial(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
  double s = 0.0;
  for (std::int64_t lo = 0; lo < n; lo += kReductionBlock)
    s += block_dot(x.data(), y.data(), lo, std::min(n, lo + kReductionBlock));
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) yp[i] += alpha * xp[i];
}

}  // namespace kernels

std::vector<double> matvec(const CsrMatrix& a, std::span<const double> x) {
  if (static_cast<std::int64_t>(x.size()) != a.rows)
    throw ConfigError("matvec: vector length " + std::to_string(x.size()) +
                      " does not match " + std::to_string(a.rows) + " rows");
  std::vector<double> y(static_cast<std::size_t>(a.rows));
  kernels::matvec(a, x, y);
  return y;
}

namespace {

using kernels::dot;

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

int iteration_cap(const CsrMatrix& a, const SolverSettings& s) {
  return s.max_iter > 0 ? s.max_iter : static_cast<int>(std::min<std::int64_t>(20 * a.rows, 1 << 30));
}

void check_inputs(const CsrMatrix& a, std::span<const double> rhs, const SolverSettings& s) {
  if (static_cast<std::int64_t>(rhs.size()) != a.rows)
    throw ConfigError("right-hand side length does not match the system");
  if (!(s.rel_tol > 0.0 && s.rel_tol < 1.0)) throw ConfigError("rel_tol must lie in (0, 1)");
}

std::vector<double> inverse_diagonal(const CsrMatrix& a) {
  auto d = a.diagonal();
  for (double& v : d) {
    if (!(v > 0.0)) throw ConfigError("system has a non-positive diagonal entry");
    v = 1.0 / v;
  }
  return d;
}

// r = b - A x
void residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x,
              std::span<double> r) {
  kernels::matvec(a, x, r);
  const auto n = static_cast<std::int64_t>(r.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
}

void scale_into(std::span<const double> d, std::span<const double> v, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = d[i] * v[i];
}

}  // namespace

SolveResult solve_spd(const CsrMatrix& a, std::span<const double> rhs, SolverSettings s) {
  check_inputs(a, rhs, s);
  if (!a.symmetric) throw ConfigError("solve_spd requires a symmetric system");
  const auto n = static_cast<std::size_t>(a.rows);
  SolveResult out;
  out.x.assign(n, 0.0);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) return out;

  const auto dinv = inverse_diagonal(a);
  const int cap = iteration_cap(a, s);
  const double target = s.rel_tol * bnorm;
  std::vector<double> r(n), z(n), p(n), ap(n);
  auto& x = out.x;
  int it = 0;
  double rnorm = bnorm;
  bool stalled = false;

  // Outer loop restarts from the true residual if the recurrence drifted.
  while (true) {
    residual(a, rhs, x, r);
    rnorm = norm2(r);
    if (rnorm <= target || it >= cap || stalled) break;
    const int start = it;
    scale_into(dinv, r, z);
    p = z;
    double rz = dot(r, z);
    while (it < cap) {
      kernels::matvec(a, p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      kernels::axpy(alpha, p, x);
      kernels::axpy(-alpha, ap, r);
      ++it;
      if (norm2(r) <= target) break;
      scale_into(dinv, r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
    }
    stalled = it == start;
  }
  out.iterations = it;
  out.relative_residual = rnorm / bnorm;
  if (rnorm > target)
    throw ConvergenceError("conjugate gradients did not converge", out.relative_residual, it);
  return out;
}

SolveResult solve_general(const CsrMatrix& a, std::span<const double> rhs, SolverSettings s) {
  check_inputs(a, rhs, s);
  const auto n = static_cast<std::size_t>(a.rows);
  const auto m = static_cast<std::int64_t>(n);
  SolveResult out;
  out.x.assign(n, 0.0);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) return out;

  const auto dinv = inverse_diagonal(a);
  const int cap = iteration_cap(a, s);
  const double target = s.rel_tol * bnorm;
  std::vector<double> r(n), rhat(n), p(n), v(n), phat(n), sv(n), shat(n), t(n);
  auto& x = out.x;
  int it = 0;
  double rnorm = bnorm;
  bool stalled = false;

  while (true) {
    residual(a, rhs, x, r);
    rnorm = norm2(r);
    if (rnorm <= target || it >= cap || stalled) break;
    const int start = it;
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (it < cap) {
      const double rho_next = dot(rhat, r);
      if (rho_next == 0.0 || omega == 0.0) break;  // breakdown: restart
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < m; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      scale_into(dinv, p, phat);
      kernels::matvec(a, phat, v);
      const double rv = dot(rhat, v);
      if (rv == 0.0) break;
      alpha = rho / rv;
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < m; ++i) sv[i] = r[i] - alpha * v[i];
      ++it;
      if (norm2(sv) <= target) {
        kernels::axpy(alpha, phat, x);
        r = sv;
        break;
      }
      scale_into(dinv, sv, shat);
      kernels::matvec(a, shat, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, sv) / tt : 0.0;
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < m; ++i) {
        x[i] += alpha * phat[i] + omega * shat[i];
        r[i] = sv[i] - omega * t[i];
      }
      if (norm2(r) <= target) break;
    }
    stalled = it == start;
  }
  out.iterations = it;
  out.relative_residual = rnorm / bnorm;
  if (rnorm > target)
    throw ConvergenceError("BiCGStab did not converge", out.relative_residual, it);
  return out;
}

SolveResult solve(const CsrMatrix& a, std::span<const double> rhs, SolverSettings s) {
  return a.symmetric ? solve_spd(a, rhs, s) : solve_general(a, rhs, s);
}

}  // namespace greenlab
