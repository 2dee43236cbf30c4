#include "amglab/dense_linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace amglab {

namespace {

using RowMajorXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorXcd =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorXd> map_of(const DenseMatrix& A) {
  return {A.values.data(), A.nrows, A.ncols};
}
Eigen::Map<const RowMajorXcd> map_of(const ComplexDenseMatrix& A) {
  return {A.values.data(), A.nrows, A.ncols};
}

DenseMatrix from_eigen(const Eigen::MatrixXd& M) {
  DenseMatrix D(M.rows(), M.cols());
  Eigen::Map<RowMajorXd>(D.values.data(), D.nrows, D.ncols) = M;
  return D;
}
ComplexDenseMatrix from_eigen(const Eigen::MatrixXcd& M) {
  ComplexDenseMatrix D(M.rows(), M.cols());
  Eigen::Map<RowMajorXcd>(D.values.data(), D.nrows, D.ncols) = M;
  return D;
}

// Pivot check shared by the real and complex solve paths.
template <typename LuType, typename MatType>
void check_pivots(const LuType& lu, const MatType& A, const char* who) {
  const double scale = A.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * scale;
  const auto& U = lu.matrixLU();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    if (std::abs(U(i, i)) <= tol)
      throw SingularMatrixError(std::string(who) + ": numerically singular matrix",
                                static_cast<std::size_t>(i));
  }
}

}  // namespace

DenseMatrix to_dense(const SparseMatrix& A) {
  DenseMatrix D(A.nrows, A.ncols);
  for (index_t i = 0; i < A.nrows; ++i)
    for (index_t k = A.row_offsets[static_cast<std::size_t>(i)];
         k < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      D(i, A.col_indices[static_cast<std::size_t>(k)]) = A.values[static_cast<std::size_t>(k)];
  return D;
}

SparseMatrix to_sparse(const DenseMatrix& A, double drop_tol) {
  std::vector<Triplet> trips;
  for (index_t i = 0; i < A.nrows; ++i)
    for (index_t j = 0; j < A.ncols; ++j)
      if (std::abs(A(i, j)) > drop_tol) trips.push_back({i, j, A(i, j)});
  return from_triplets(A.nrows, A.ncols, trips);
}

DenseMatrix dense_multiply(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.ncols != B.nrows) throw DimensionError("dense_multiply: inner dimensions differ");
  return from_eigen(Eigen::MatrixXd(map_of(A) * map_of(B)));
}

ComplexDenseMatrix dense_multiply(const ComplexDenseMatrix& A, const ComplexDenseMatrix& B) {
  if (A.ncols != B.nrows) throw DimensionError("dense_multiply: inner dimensions differ");
  return from_eigen(Eigen::MatrixXcd(map_of(A) * map_of(B)));
}

DenseMatrix dense_transpose(const DenseMatrix& A) {
  return from_eigen(Eigen::MatrixXd(map_of(A).transpose()));
}

ComplexDenseMatrix conjugate_transpose(const ComplexDenseMatrix& A) {
  return from_eigen(Eigen::MatrixXcd(map_of(A).adjoint()));
}

ComplexDenseMatrix to_complex(const DenseMatrix& A) {
  ComplexDenseMatrix C(A.nrows, A.ncols);
  for (std::size_t k = 0; k < A.values.size(); ++k) C.values[k] = A.values[k];
  return C;
}

std::vector<double> dense_apply(const DenseMatrix& A, const std::vector<double>& x) {
  if (static_cast<index_t>(x.size()) != A.ncols)
    throw DimensionError("dense_apply: vector length does not match ncols");
  std::vector<double> y(static_cast<std::size_t>(A.nrows));
  Eigen::Map<Eigen::VectorXd>(y.data(), A.nrows) =
      map_of(A) * Eigen::Map<const Eigen::VectorXd>(x.data(), A.ncols);
  return y;
}

double max_abs(const DenseMatrix& A) {
  return A.values.empty() ? 0.0 : map_of(A).cwiseAbs().maxCoeff();
}
double max_abs(const ComplexDenseMatrix& A) {
  return A.values.empty() ? 0.0 : map_of(A).cwiseAbs().maxCoeff();
}

double dense_frobenius_norm(const DenseMatrix& A) { return map_of(A).norm(); }

DenseMatrix dense_solve(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.nrows != A.ncols) throw DimensionError("dense_solve: matrix not square");
  if (A.nrows != B.nrows) throw DimensionError("dense_solve: rhs row count mismatch");
  Eigen::MatrixXd Ae = map_of(A);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Ae);
  check_pivots(lu, Ae, "dense_solve");
  return from_eigen(Eigen::MatrixXd(lu.solve(Eigen::MatrixXd(map_of(B)))));
}

ComplexDenseMatrix dense_solve(const ComplexDenseMatrix& A, const ComplexDenseMatrix& B) {
  if (A.nrows != A.ncols) throw DimensionError("dense_solve: matrix not square");
  if (A.nrows != B.nrows) throw DimensionError("dense_solve: rhs row count mismatch");
  Eigen::MatrixXcd Ae = map_of(A);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Ae);
  check_pivots(lu, Ae, "dense_solve");
  return from_eigen(Eigen::MatrixXcd(lu.solve(Eigen::MatrixXcd(map_of(B)))));
}

struct LuFactor::Impl {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  index_t n;
};

LuFactor::LuFactor(const DenseMatrix& A) : impl_(new Impl) {
  if (A.nrows != A.ncols) {
    delete impl_;
    throw DimensionError("LuFactor: matrix not square");
  }
  Eigen::MatrixXd Ae = map_of(A);
  impl_->lu.compute(Ae);
  impl_->n = A.nrows;
  try {
    check_pivots(impl_->lu, Ae, "LuFactor");
  } catch (...) {
    delete impl_;
    impl_ = nullptr;
    throw;
  }
}

LuFactor::~LuFactor() { delete impl_; }
LuFactor::LuFactor(LuFactor&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
LuFactor& LuFactor::operator=(LuFactor&& o) noexcept {
  std::swap(impl_, o.impl_);
  return *this;
}

std::vector<double> LuFactor::solve(const std::vector<double>& b) const {
  if (static_cast<index_t>(b.size()) != impl_->n)
    throw DimensionError("LuFactor::solve: rhs length mismatch");
  std::vector<double> x(b.size());
  Eigen::Map<Eigen::VectorXd>(x.data(), impl_->n) =
      impl_->lu.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), impl_->n));
  return x;
}

index_t LuFactor::size() const { return impl_->n; }

namespace {

// Shared residual measurement: bound = max_i ||A v_i - lambda_i v_i|| / (||A||_F ||v_i||).
EigenDecomposition finish_eig(const Eigen::MatrixXcd& Ac, Eigen::VectorXcd values,
                              Eigen::MatrixXcd vectors) {
  const double a_norm = Ac.norm();
  EigenDecomposition out;
  out.values.assign(values.data(), values.data() + values.size());
  out.right_vectors = from_eigen(vectors);
  if (a_norm == 0.0) {
    out.residual_bound = 0.0;
    return out;
  }
  Eigen::MatrixXcd AV = Ac * vectors;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double vn = vectors.col(i).norm();
    if (vn == 0.0) throw EigenSolverError("dense_eig: zero eigenvector returned", 1.0);
    const double r = (AV.col(i) - values(i) * vectors.col(i)).norm() / (a_norm * vn);
    worst = std::max(worst, r);
  }
  out.residual_bound = worst;
  if (worst > 1e-8)
    throw EigenSolverError("dense_eig: residual contract violated", worst);
  return out;
}

}  // namespace

EigenDecomposition dense_eig(const DenseMatrix& A) {
  if (A.nrows != A.ncols) throw DimensionError("dense_eig: matrix not square");
  Eigen::MatrixXd Ae = map_of(A);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Ae, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw EigenSolverError("dense_eig: QR iteration did not converge", 1.0);
  return finish_eig(Ae.cast<std::complex<double>>(), es.eigenvalues(), es.eigenvectors());
}

EigenDecomposition dense_eig(const ComplexDenseMatrix& A) {
  if (A.nrows != A.ncols) throw DimensionError("dense_eig: matrix not square");
  Eigen::MatrixXcd Ae = map_of(A);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Ae, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw EigenSolverError("dense_eig: QR iteration did not converge", 1.0);
  return finish_eig(Ae, es.eigenvalues(), es.eigenvectors());
}

ComplexDenseMatrix dense_inverse(const ComplexDenseMatrix& A, double* rcond_estimate) {
  if (A.nrows != A.ncols) throw DimensionError("dense_inverse: matrix not square");
  Eigen::MatrixXcd Ae = map_of(A);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Ae);
  check_pivots(lu, Ae, "dense_inverse");
  Eigen::MatrixXcd inv = lu.inverse();
  if (rcond_estimate) {
    const double na = Ae.cwiseAbs().colwise().sum().maxCoeff();
    const double ni = inv.cwiseAbs().colwise().sum().maxCoeff();
    *rcond_estimate = (na > 0 && ni > 0) ? 1.0 / (na * ni) : 0.0;
  }
  return from_eigen(inv);
}

double spectral_radius(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                       index_t n, bool dense_fallback, double tol) {
  if (n == 0) throw DimensionError("spectral_radius: empty operator");
  if (dense_fallback) {
    DenseMatrix D(n, n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (index_t j = 0; j < n; ++j) {
      e[static_cast<std::size_t>(j)] = 1.0;
      const std::vector<double> col = apply(e);
      e[static_cast<std::size_t>(j)] = 0.0;
      for (index_t i = 0; i < n; ++i) D(i, j) = col[static_cast<std::size_t>(i)];
    }
    return spectral_radius(D);
  }

  // Restarted Arnoldi. The dominant Ritz value of the Hessenberg restriction
  // estimates the spectral radius; restart with the dominant Ritz vector.
  const index_t m = std::min<index_t>(n, 60);
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v0(static_cast<std::size_t>(n));
  for (double& x : v0) x = unif(rng);

  double rho_prev = -1.0;
  for (int restart = 0; restart < 100; ++restart) {
    double v0n = norm2(v0);
    if (v0n == 0.0) {
      for (double& x : v0) x = unif(rng);
      v0n = norm2(v0);
    }
    std::vector<std::vector<double>> V;
    V.reserve(static_cast<std::size_t>(m) + 1);
    {
      std::vector<double> v = v0;
      for (double& x : v) x /= v0n;
      V.push_back(std::move(v));
    }
    DenseMatrix H(m + 1, m);
    index_t k = m;  // realized Krylov dimension
    bool invariant = false;
    for (index_t j = 0; j < m; ++j) {
      std::vector<double> w = apply(V[static_cast<std::size_t>(j)]);
      for (index_t i = 0; i <= j; ++i) {
        const double h = dot(V[static_cast<std::size_t>(i)], w);
        H(i, j) = h;
        axpy(-h, V[static_cast<std::size_t>(i)], w);
      }
      // One re-orthogonalization pass keeps the basis clean for clustered spectra.
      for (index_t i = 0; i <= j; ++i) {
        const double h = dot(V[static_cast<std::size_t>(i)], w);
        H(i, j) += h;
        axpy(-h, V[static_cast<std::size_t>(i)], w);
      }
      const double wn = norm2(w);
      H(j + 1, j) = wn;
      if (wn <= 1e-14) {  // exact invariant subspace: Ritz values are exact
        k = j + 1;
        invariant = true;
        break;
      }
      for (double& x : w) x /= wn;
      V.push_back(std::move(w));
    }

    DenseMatrix Hk(k, k);
    for (index_t i = 0; i < k; ++i)
      for (index_t j = 0; j < k; ++j) Hk(i, j) = H(i, j);
    const EigenDecomposition ed = dense_eig(Hk);
    index_t dominant = 0;
    double rho = 0.0;
    for (index_t i = 0; i < k; ++i) {
      const double a = std::abs(ed.values[static_cast<std::size_t>(i)]);
      if (a > rho) {
        rho = a;
        dominant = i;
      }
    }
    // Ritz residual of the dominant pair: |h_{k+1,k}| * |last component of y|.
    double ritz_res = 0.0;
    if (!invariant) {
      const std::complex<double> tail =
          ed.right_vectors(k - 1, dominant);
      double yn = 0.0;
      for (index_t i = 0; i < k; ++i) yn += std::norm(ed.right_vectors(i, dominant));
      yn = std::sqrt(yn);
      ritz_res = H(k, k - 1) * std::abs(tail) / (yn > 0 ? yn : 1.0);
    }
    const bool value_settled = rho_prev >= 0.0 && std::abs(rho - rho_prev) <= tol * std::max(rho, 1e-30);
    const bool residual_ok = ritz_res <= tol * std::max(rho, 1e-30);
    if (invariant || (value_settled && residual_ok)) return rho;
    rho_prev = rho;

    // Restart direction: real part of the dominant Ritz vector (plus imaginary
    // part, folding in the conjugate pair when the dominant value is complex).
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (index_t i = 0; i < k; ++i) {
      const std::complex<double> yi = ed.right_vectors(i, dominant);
      axpy(yi.real() + yi.imag(), V[static_cast<std::size_t>(i)], next);
    }
    if (norm2(next) == 0.0)
      for (double& x : next) x = unif(rng);
    v0 = std::move(next);
  }
  return rho_prev < 0 ? 0.0 : rho_prev;
}

double spectral_radius(const SparseMatrix& A, bool dense_fallback, double tol) {
  if (A.nrows != A.ncols) throw DimensionError("spectral_radius: matrix not square");
  if (dense_fallback) return spectral_radius(to_dense(A));
  return spectral_radius([&A](const std::vector<double>& x) { return spmv(A, x); }, A.nrows,
                         false, tol);
}

double spectral_radius(const DenseMatrix& A) {
  if (A.nrows != A.ncols) throw DimensionError("spectral_radius: matrix not square");
  const EigenDecomposition ed = dense_eig(A);
  double rho = 0.0;
  for (const auto& v : ed.values) rho = std::max(rho, std::abs(v));
  return rho;
}

}  // namespace amglab
