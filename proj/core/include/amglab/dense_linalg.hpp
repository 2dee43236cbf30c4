#pragma once

#include <functional>

#include "amglab/dense.hpp"

namespace amglab {

/// X solving A*X = B by partial-pivoted LU.
/// Throws SingularMatrixError when a pivot falls below 1e-12 * max|A|.
DenseMatrix dense_solve(const DenseMatrix& A, const DenseMatrix& B);
ComplexDenseMatrix dense_solve(const ComplexDenseMatrix& A, const ComplexDenseMatrix& B);

/// Cached LU factorization for repeated right-hand sides (coarse solves, patch solves).
class LuFactor {
public:
  explicit LuFactor(const DenseMatrix& A);
  ~LuFactor();
  LuFactor(LuFactor&&) noexcept;
  LuFactor& operator=(LuFactor&&) noexcept;
  LuFactor(const LuFactor&) = delete;
  LuFactor& operator=(const LuFactor&) = delete;

  std::vector<double> solve(const std::vector<double>& b) const;
  index_t size() const;

private:
  struct Impl;
  Impl* impl_;
};

/// All eigenpairs of a dense square matrix; residual contract per EigenDecomposition.
/// Throws EigenSolverError when the measured residual bound exceeds 1e-8.
EigenDecomposition dense_eig(const DenseMatrix& A);
EigenDecomposition dense_eig(const ComplexDenseMatrix& A);

/// 1/cond estimate and inverse of a complex matrix (used for eigenvector bases).
ComplexDenseMatrix dense_inverse(const ComplexDenseMatrix& A, double* rcond_estimate = nullptr);

/// max |lambda_i(A)| for a linear action of dimension n.
/// dense_fallback materializes the operator and calls dense_eig; otherwise a
/// restarted Arnoldi iteration estimates the dominant eigenvalue to `tol`.
double spectral_radius(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                       index_t n, bool dense_fallback = false, double tol = 1e-8);
double spectral_radius(const SparseMatrix& A, bool dense_fallback = false, double tol = 1e-8);
double spectral_radius(const DenseMatrix& A);

}  // namespace amglab
