#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace greenlab {

/// Compressed-row sparse matrix. Column indices are strictly increasing in
/// each row; `symmetric` is set by whoever builds the matrix and promises
/// exact entrywise symmetry.
struct CsrMatrix {
  std::int64_t rows = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  bool symmetric = false;

  std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }
  /// Entry (i, j), zero when not stored.
  double at(std::int64_t i, std::int64_t j) const;
  std::vector<double> diagonal() const;

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static CsrMatrix from_triplets(std::int64_t rows,
                                 std::vector<std::int64_t> r,
                                 std::vector<std::int32_t> c,
                                 std::vector<double> v,
                                 bool symmetric);
};

using SparseSystem = CsrMatrix;

CsrMatrix transpose(const CsrMatrix& m);

/// Checks the structural invariants: sorted unique columns, positive
/// diagonal present in every row, and exact symmetry when flagged.
bool check_invariants(const CsrMatrix& m);

// Vector kernels. The OpenMP versions and the serial references produce
// bitwise-identical results for any thread count: rows are independent and
// reductions go through fixed-size blocks summed in block order.
namespace kernels {

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void matvec_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);
double dot_serial(std::span<const double> x, std::span<const double> y);

/// y <- y + alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

inline constexpr std::int64_t kReductionBlock = 2048;

}  // namespace kernels

/// y = A x. Throws ConfigError on length mismatch.
std::vector<double> matvec(const CsrMatrix& a, std::span<const double> x);

struct SolverSettings {
  double rel_tol = 1e-10;
  /// 0 means 20 * rows.
  int max_iter = 0;

  bool operator==(const SolverSettings&) const = default;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;  // true residual, recomputed after convergence
};

/// Jacobi-preconditioned conjugate gradients. Requires the symmetric flag.
SolveResult solve_spd(const CsrMatrix& a, std::span<const double> rhs, SolverSettings s = {});

/// Jacobi-preconditioned BiCGStab for general (non-symmetric) systems.
SolveResult solve_general(const CsrMatrix& a, std::span<const double> rhs, SolverSettings s = {});

/// CG when the symmetric flag is set, BiCGStab otherwise.
SolveResult solve(const CsrMatrix& a, std::span<const double> rhs, SolverSettings s = {});

inline constexpr std::int64_t kDenseLimit = 4096;

/// LU factorization with partial pivoting of a densified sparse matrix.
/// Reference oracle for the iterative solvers; capped at kDenseLimit rows.
class DenseLu {
 public:
  explicit DenseLu(const CsrMatrix& a);

  std::vector<double> solve(std::span<const double> rhs) const;
  std::int64_t rows() const { return n_; }

 private:
  std::int64_t n_;
  std::vector<double> lu_;
  std::vector<std::int64_t> perm_;
};

std::vector<double> dense_solve(const CsrMatrix& a, std::span<const double> rhs);

}  // namespace greenlab
