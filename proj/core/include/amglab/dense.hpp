#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "amglab/errors.hpp"
#include "amglab/sparse.hpp"

namespace amglab {

/// Row-major dense matrix over double or complex<double>.
template <typename Scalar>
struct BasicDenseMatrix {
  index_t nrows = 0;
  index_t ncols = 0;
  std::vector<Scalar> values;  // row-major, size nrows*ncols

  BasicDenseMatrix() = default;
  BasicDenseMatrix(index_t rows, index_t cols)
      : nrows(rows), ncols(cols),
        values(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Scalar(0)) {}

  Scalar& operator()(index_t i, index_t j) {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(ncols) +
                  static_cast<std::size_t>(j)];
  }
  const Scalar& operator()(index_t i, index_t j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(ncols) +
                  static_cast<std::size_t>(j)];
  }

  static BasicDenseMatrix identity(index_t n) {
    BasicDenseMatrix I(n, n);
    for (index_t i = 0; i < n; ++i) I(i, i) = Scalar(1);
    return I;
  }
};

using DenseMatrix = BasicDenseMatrix<double>;
using ComplexDenseMatrix = BasicDenseMatrix<std::complex<double>>;

/// All eigenpairs of a dense (real or complex) square matrix.
///
/// Contract: for each i, ||A v_i - lambda_i v_i||_2 <= residual_bound * ||A||_F * ||v_i||_2,
/// and non-real eigenvalues of real input come in conjugate pairs.
struct EigenDecomposition {
  std::vector<std::complex<double>> values;
  ComplexDenseMatrix right_vectors;  // columns are v_i
  double residual_bound = 0.0;
};

DenseMatrix to_dense(const SparseMatrix& A);
SparseMatrix to_sparse(const DenseMatrix& A, double drop_tol = 0.0);

DenseMatrix dense_multiply(const DenseMatrix& A, const DenseMatrix& B);
ComplexDenseMatrix dense_multiply(const ComplexDenseMatrix& A, const ComplexDenseMatrix& B);
DenseMatrix dense_transpose(const DenseMatrix& A);
ComplexDenseMatrix conjugate_transpose(const ComplexDenseMatrix& A);
ComplexDenseMatrix to_complex(const DenseMatrix& A);
std::vector<double> dense_apply(const DenseMatrix& A, const std::vector<double>& x);

/// max |A_ij| over all entries.
double max_abs(const DenseMatrix& A);
double max_abs(const ComplexDenseMatrix& A);

double dense_frobenius_norm(const DenseMatrix& A);

}  // namespace amglab
