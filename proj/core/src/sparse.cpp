#include "amglab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amglab/errors.hpp"

namespace amglab {

double SparseMatrix::at(index_t i, index_t j) const {
  const auto begin = col_indices.begin() + row_offsets[static_cast<std::size_t>(i)];
  const auto end = col_indices.begin() + row_offsets[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

SparseMatrix SparseMatrix::identity(index_t n) {
  SparseMatrix I(n, n);
  I.col_indices.resize(static_cast<std::size_t>(n));
  I.values.assign(static_cast<std::size_t>(n), 1.0);
  for (index_t i = 0; i < n; ++i) {
    I.row_offsets[static_cast<std::size_t>(i) + 1] = i + 1;
    I.col_indices[static_cast<std::size_t>(i)] = i;
  }
  return I;
}

SparseMatrix from_triplets(index_t nrows, index_t ncols, const std::vector<Triplet>& entries) {
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw DimensionError("from_triplets: entry outside matrix bounds");
  }
  // Counting sort by row, then per-row sort by column with duplicate merge.
  SparseMatrix A(nrows, ncols);
  std::vector<index_t> counts(static_cast<std::size_t>(nrows), 0);
  for (const Triplet& t : entries) ++counts[static_cast<std::size_t>(t.row)];
  std::vector<index_t> start(static_cast<std::size_t>(nrows) + 1, 0);
  for (index_t i = 0; i < nrows; ++i)
    start[static_cast<std::size_t>(i) + 1] = start[static_cast<std::size_t>(i)] + counts[static_cast<std::size_t>(i)];
  std::vector<std::pair<index_t, double>> bucketed(entries.size());
  {
    std::vector<index_t> cursor(start.begin(), start.end() - 1);
    for (const Triplet& t : entries)
      bucketed[static_cast<std::size_t>(cursor[static_cast<std::size_t>(t.row)]++)] = {t.col, t.value};
  }
  A.col_indices.reserve(entries.size());
  A.values.reserve(entries.size());
  for (index_t i = 0; i < nrows; ++i) {
    auto first = bucketed.begin() + start[static_cast<std::size_t>(i)];
    auto last = bucketed.begin() + start[static_cast<std::size_t>(i) + 1];
    std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last;) {
      index_t col = it->first;
      double sum = 0.0;
      for (; it != last && it->first == col; ++it) sum += it->second;
      A.col_indices.push_back(col);
      A.values.push_back(sum);
    }
    A.row_offsets[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(A.values.size());
  }
  return A;
}

std::vector<double> spmv(const SparseMatrix& A, const std::vector<double>& x) {
  if (static_cast<index_t>(x.size()) != A.ncols)
    throw DimensionError("spmv: vector length does not match ncols");
  std::vector<double> y(static_cast<std::size_t>(A.nrows), 0.0);
  for (index_t i = 0; i < A.nrows; ++i) {
    double acc = 0.0;
    for (index_t k = A.row_offsets[static_cast<std::size_t>(i)];
         k < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      acc += A.values[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(A.col_indices[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<double> spmv_transposed(const SparseMatrix& A, const std::vector<double>& x) {
  if (static_cast<index_t>(x.size()) != A.nrows)
    throw DimensionError("spmv_transposed: vector length does not match nrows");
  std::vector<double> y(static_cast<std::size_t>(A.ncols), 0.0);
  for (index_t i = 0; i < A.nrows; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (xi == 0.0) continue;
    for (index_t k = A.row_offsets[static_cast<std::size_t>(i)];
         k < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      y[static_cast<std::size_t>(A.col_indices[static_cast<std::size_t>(k)])] +=
          A.values[static_cast<std::size_t>(k)] * xi;
  }
  return y;
}

SparseMatrix transpose(const SparseMatrix& A) {
  SparseMatrix T(A.ncols, A.nrows);
  T.col_indices.resize(A.values.size());
  T.values.resize(A.values.size());
  std::vector<index_t> counts(static_cast<std::size_t>(A.ncols) + 1, 0);
  for (index_t c : A.col_indices) ++counts[static_cast<std::size_t>(c) + 1];
  std::partial_sum(counts.begin(), counts.end(), T.row_offsets.begin());
  std::vector<index_t> cursor(T.row_offsets.begin(), T.row_offsets.end() - 1);
  for (index_t i = 0; i < A.nrows; ++i) {
    for (index_t k = A.row_offsets[static_cast<std::size_t>(i)];
         k < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      const index_t j = A.col_indices[static_cast<std::size_t>(k)];
      const index_t slot = cursor[static_cast<std::size_t>(j)]++;
      T.col_indices[static_cast<std::size_t>(slot)] = i;  // rows visited ascending: stays sorted
      T.values[static_cast<std::size_t>(slot)] = A.values[static_cast<std::size_t>(k)];
    }
  }
  return T;
}

SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B) {
  if (A.ncols != B.nrows) throw DimensionError("multiply: inner dimensions differ");
  SparseMatrix C(A.nrows, B.ncols);
  // Gustavson: dense accumulator with a touched-column marker per row.
  std::vector<double> acc(static_cast<std::size_t>(B.ncols), 0.0);
  std::vector<index_t> marker(static_cast<std::size_t>(B.ncols), -1);
  std::vector<index_t> cols_touched;
  for (index_t i = 0; i < A.nrows; ++i) {
    cols_touched.clear();
    for (index_t ka = A.row_offsets[static_cast<std::size_t>(i)];
         ka < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++ka) {
      const index_t j = A.col_indices[static_cast<std::size_t>(ka)];
      const double aij = A.values[static_cast<std::size_t>(ka)];
      for (index_t kb = B.row_offsets[static_cast<std::size_t>(j)];
           kb < B.row_offsets[static_cast<std::size_t>(j) + 1]; ++kb) {
        const index_t c = B.col_indices[static_cast<std::size_t>(kb)];
        if (marker[static_cast<std::size_t>(c)] != i) {
          marker[static_cast<std::size_t>(c)] = i;
          acc[static_cast<std::size_t>(c)] = 0.0;
          cols_touched.push_back(c);
        }
        acc[static_cast<std::size_t>(c)] += aij * B.values[static_cast<std::size_t>(kb)];
      }
    }
    std::sort(cols_touched.begin(), cols_touched.end());
    for (index_t c : cols_touched) {
      C.col_indices.push_back(c);
      C.values.push_back(acc[static_cast<std::size_t>(c)]);
    }
    C.row_offsets[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(C.values.size());
  }
  return C;
}

SparseMatrix triple_product(const SparseMatrix& R, const SparseMatrix& A, const SparseMatrix& P) {
  if (R.ncols != A.nrows) throw DimensionError("triple_product: R.ncols != A.nrows");
  if (A.ncols != P.nrows) throw DimensionError("triple_product: A.ncols != P.nrows");
  return multiply(multiply(R, A), P);
}

SparseMatrix add(double alpha, const SparseMatrix& A, double beta, const SparseMatrix& B) {
  if (A.nrows != B.nrows || A.ncols != B.ncols)
    throw DimensionError("add: shapes differ");
  SparseMatrix C(A.nrows, A.ncols);
  for (index_t i = 0; i < A.nrows; ++i) {
    index_t ka = A.row_offsets[static_cast<std::size_t>(i)];
    index_t kb = B.row_offsets[static_cast<std::size_t>(i)];
    const index_t ea = A.row_offsets[static_cast<std::size_t>(i) + 1];
    const index_t eb = B.row_offsets[static_cast<std::size_t>(i) + 1];
    while (ka < ea || kb < eb) {
      index_t ca = ka < ea ? A.col_indices[static_cast<std::size_t>(ka)] : A.ncols;
      index_t cb = kb < eb ? B.col_indices[static_cast<std::size_t>(kb)] : A.ncols;
      if (ca < cb) {
        C.col_indices.push_back(ca);
        C.values.push_back(alpha * A.values[static_cast<std::size_t>(ka++)]);
      } else if (cb < ca) {
        C.col_indices.push_back(cb);
        C.values.push_back(beta * B.values[static_cast<std::size_t>(kb++)]);
      } else {
        C.col_indices.push_back(ca);
        C.values.push_back(alpha * A.values[static_cast<std::size_t>(ka++)] +
                           beta * B.values[static_cast<std::size_t>(kb++)]);
      }
    }
    C.row_offsets[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(C.values.size());
  }
  return C;
}

SparseMatrix extract_submatrix(const SparseMatrix& A, const std::vector<index_t>& rows,
                               const std::vector<index_t>& cols) {
  std::vector<index_t> col_map(static_cast<std::size_t>(A.ncols), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= A.ncols)
      throw DimensionError("extract_submatrix: column index out of range");
    col_map[static_cast<std::size_t>(cols[j])] = static_cast<index_t>(j);
  }
  std::vector<Triplet> trips;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const index_t i = rows[r];
    if (i < 0 || i >= A.nrows) throw DimensionError("extract_submatrix: row index out of range");
    for (index_t k = A.row_offsets[static_cast<std::size_t>(i)];
         k < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      const index_t jj = col_map[static_cast<std::size_t>(A.col_indices[static_cast<std::size_t>(k)])];
      if (jj >= 0)
        trips.push_back({static_cast<index_t>(r), jj, A.values[static_cast<std::size_t>(k)]});
    }
  }
  return from_triplets(static_cast<index_t>(rows.size()), static_cast<index_t>(cols.size()), trips);
}

SparseMatrix block_diag(const std::vector<const SparseMatrix*>& blocks) {
  index_t rows = 0, cols = 0, nnz = 0;
  for (const SparseMatrix* b : blocks) {
    rows += b->nrows;
    cols += b->ncols;
    nnz += b->nnz();
  }
  SparseMatrix C(rows, cols);
  C.col_indices.reserve(static_cast<std::size_t>(nnz));
  C.values.reserve(static_cast<std::size_t>(nnz));
  index_t row_base = 0, col_base = 0;
  for (const SparseMatrix* b : blocks) {
    for (index_t i = 0; i < b->nrows; ++i) {
      for (index_t k = b->row_offsets[static_cast<std::size_t>(i)];
           k < b->row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
        C.col_indices.push_back(col_base + b->col_indices[static_cast<std::size_t>(k)]);
        C.values.push_back(b->values[static_cast<std::size_t>(k)]);
      }
      C.row_offsets[static_cast<std::size_t>(row_base + i) + 1] = static_cast<index_t>(C.values.size());
    }
    row_base += b->nrows;
    col_base += b->ncols;
  }
  return C;
}

double symmetry_gap(const SparseMatrix& A) {
  if (A.nrows != A.ncols) throw DimensionError("symmetry_gap: matrix not square");
  const SparseMatrix D = add(1.0, A, -1.0, transpose(A));
  double m = 0.0;
  for (double v : D.values) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const SparseMatrix& A) {
  double s = 0.0;
  for (double v : A.values) s += v * v;
  return std::sqrt(s);
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("dot: lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("axpy: lengths differ");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace amglab
