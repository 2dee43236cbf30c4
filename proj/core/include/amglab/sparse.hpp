#pragma once

#include <cstdint>
#include <vector>

namespace amglab {

using index_t = std::int64_t;

/// Compressed-sparse-row real matrix, the universal operator carrier.
///
/// Invariants (enforced by from_triplets and preserved by all operations):
///  - row_offsets.size() == nrows+1, non-decreasing, back() == values.size()
///  - column indices strictly increasing within each row and < ncols
///  - no structural duplicates
struct SparseMatrix {
  index_t nrows = 0;
  index_t ncols = 0;
  std::vector<index_t> row_offsets;  // size nrows+1
  std::vector<index_t> col_indices;
  std::vector<double> values;

  SparseMatrix() : row_offsets(1, 0) {}
  SparseMatrix(index_t rows, index_t cols)
      : nrows(rows), ncols(cols), row_offsets(static_cast<std::size_t>(rows) + 1, 0) {}

  index_t nnz() const { return static_cast<index_t>(values.size()); }

  /// Entry lookup by binary search; zero when not stored.
  double at(index_t i, index_t j) const;

  /// Identity matrix of size n.
  static SparseMatrix identity(index_t n);
};

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

/// Builds CSR from an unordered triplet list; duplicate entries are summed,
/// exact zeros produced by summation are kept (pattern is the union).
SparseMatrix from_triplets(index_t nrows, index_t ncols, const std::vector<Triplet>& entries);

/// y = A*x. One pass over stored entries.
std::vector<double> spmv(const SparseMatrix& A, const std::vector<double>& x);

/// y = A^T*x without forming the transpose.
std::vector<double> spmv_transposed(const SparseMatrix& A, const std::vector<double>& x);

SparseMatrix transpose(const SparseMatrix& A);

/// C = A*B (Gustavson row-merge).
SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B);

/// R*A*P with duplicates merged; the Galerkin coarse-operator product.
SparseMatrix triple_product(const SparseMatrix& R, const SparseMatrix& A, const SparseMatrix& P);

/// C = alpha*A + beta*B with the union pattern.
SparseMatrix add(double alpha, const SparseMatrix& A, double beta, const SparseMatrix& B);

/// Sub-matrix A[rows, cols] (index lists need not be sorted; result follows their order).
SparseMatrix extract_submatrix(const SparseMatrix& A, const std::vector<index_t>& rows,
                               const std::vector<index_t>& cols);

/// Block-diagonal concatenation.
SparseMatrix block_diag(const std::vector<const SparseMatrix*>& blocks);

/// max |A_ij - A_ji| over the union pattern; 0 for exactly symmetric matrices.
double symmetry_gap(const SparseMatrix& A);

double frobenius_norm(const SparseMatrix& A);

// Small vector helpers shared across modules.
double norm2(const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);

}  // namespace amglab
