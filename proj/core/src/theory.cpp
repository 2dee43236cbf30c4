#include "amglab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "amglab/dense_linalg.hpp"
#include "amglab/errors.hpp"
#include "amglab/vanka.hpp"

namespace amglab {

namespace {

constexpr double kPairTol = 1e-10;

bool is_real_eigenvalue(const std::complex<double>& lambda) {
  return std::abs(lambda.imag()) <= kPairTol * (1.0 + std::abs(lambda));
}

bool is_conjugate_pair(const std::complex<double>& a, const std::complex<double>& b) {
  return std::abs(a - std::conj(b)) <= kPairTol * (1.0 + std::abs(a));
}

// M_inv * K with K sparse: accumulate scaled columns of M_inv.
DenseMatrix dense_times_sparse(const DenseMatrix& M_inv, const SparseMatrix& K) {
  DenseMatrix C(M_inv.nrows, K.ncols);
  for (index_t k = 0; k < K.nrows; ++k)
    for (index_t p = K.row_offsets[static_cast<std::size_t>(k)];
         p < K.row_offsets[static_cast<std::size_t>(k) + 1]; ++p) {
      const index_t j = K.col_indices[static_cast<std::size_t>(p)];
      const double v = K.values[static_cast<std::size_t>(p)];
      for (index_t i = 0; i < M_inv.nrows; ++i) C(i, j) += M_inv(i, k) * v;
    }
  return C;
}

// Walk the ordering, advancing whole conjugate pairs, until at least n_c
// directions are taken. Returns the ordered positions taken.
std::vector<index_t> take_leading_directions(const PencilDecomposition& decomp, index_t n_c,
                                             bool* pair_adjusted) {
  std::vector<index_t> taken;
  *pair_adjusted = false;
  std::size_t t = 0;
  while (static_cast<index_t>(taken.size()) < n_c && t < decomp.ordering.size()) {
    const index_t idx = decomp.ordering[t];
    const std::complex<double> lambda = decomp.lambdas[static_cast<std::size_t>(idx)];
    if (is_real_eigenvalue(lambda)) {
      taken.push_back(idx);
      ++t;
      continue;
    }
    if (t + 1 >= decomp.ordering.size())
      throw EigenSolverError("optimal_operators: complex eigenvalue without a partner", 0.0);
    const index_t partner = decomp.ordering[t + 1];
    if (!is_conjugate_pair(lambda, decomp.lambdas[static_cast<std::size_t>(partner)]))
      throw EigenSolverError("optimal_operators: conjugate pair not adjacent in the ordering", 0.0);
    taken.push_back(idx);
    taken.push_back(partner);
    t += 2;
  }
  if (static_cast<index_t>(taken.size()) > n_c) *pair_adjusted = true;
  return taken;
}

// Realify selected eigenvector columns: a real eigenvalue keeps Re(v); the
// first member of a conjugate pair contributes (Re v, Im v) and the second
// contributes nothing new (accounted by its partner).
DenseMatrix realify_columns(const ComplexDenseMatrix& V,
                            const std::vector<std::complex<double>>& lambdas,
                            const std::vector<index_t>& taken) {
  const index_t n = V.nrows;
  DenseMatrix out(n, static_cast<index_t>(taken.size()));
  index_t col = 0;
  std::size_t t = 0;
  while (t < taken.size()) {
    const index_t idx = taken[t];
    if (is_real_eigenvalue(lambdas[static_cast<std::size_t>(idx)])) {
      for (index_t i = 0; i < n; ++i) out(i, col) = V(i, idx).real();
      ++col;
      ++t;
    } else {
      for (index_t i = 0; i < n; ++i) {
        out(i, col) = V(i, idx).real();
        out(i, col + 1) = V(i, idx).imag();
      }
      col += 2;
      t += 2;
    }
  }
  return out;
}

double sparse_symmetry_defect(const SparseMatrix& A) {
  const double gap = symmetry_gap(A);
  double den = 0.0;
  for (double v : A.values) den = std::max(den, std::abs(v));
  return den == 0.0 ? 0.0 : gap / den;
}

}  // namespace

std::vector<index_t> order_by_distance_from_one(const std::vector<std::complex<double>>& lambdas) {
  std::vector<index_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), index_t{0});
  std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    return std::abs(1.0 - lambdas[static_cast<std::size_t>(a)]) >
           std::abs(1.0 - lambdas[static_cast<std::size_t>(b)]);
  });

  // Conjugates share |1-lambda| exactly, so the stable sort preserves their
  // relative order; equal keys from unrelated eigenvalues can still
  // interleave, so pull each partner up next to its mate.
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::complex<double> lambda = lambdas[static_cast<std::size_t>(order[t])];
    if (is_real_eigenvalue(lambda)) continue;
    std::size_t partner = t + 1;
    while (partner < order.size() &&
           !is_conjugate_pair(lambda, lambdas[static_cast<std::size_t>(order[partner])]))
      ++partner;
    if (partner >= order.size())
      throw EigenSolverError("order_by_distance_from_one: complex eigenvalue without a partner",
                             0.0);
    std::rotate(order.begin() + static_cast<std::ptrdiff_t>(t) + 1,
                order.begin() + static_cast<std::ptrdiff_t>(partner),
                order.begin() + static_cast<std::ptrdiff_t>(partner) + 1);
    ++t;  // skip the partner just placed
  }
  return order;
}

PencilDecomposition pencil_eigendecomposition(const SparseMatrix& K, const DenseMatrix& M_inv) {
  if (K.nrows != K.ncols) throw DimensionError("pencil_eigendecomposition: K must be square");
  if (M_inv.nrows != K.nrows || M_inv.ncols != K.ncols)
    throw DimensionError("pencil_eigendecomposition: M_inv must match K");

  const DenseMatrix C = dense_times_sparse(M_inv, K);
  const EigenDecomposition eig = dense_eig(C);

  PencilDecomposition decomp;
  decomp.lambdas = eig.values;
  decomp.V_right = eig.right_vectors;

  double rcond = 0.0;
  ComplexDenseMatrix V_right_inv;
  try {
    V_right_inv = dense_inverse(decomp.V_right, &rcond);
  } catch (const SingularMatrixError&) {
    throw EigenSolverError(
        "pencil_eigendecomposition: eigenvector basis is exactly singular "
        "(non-diagonalizable pencil)",
        0.0);
  }
  if (rcond < 1e-12)
    throw EigenSolverError(
        "pencil_eigendecomposition: eigenvector basis numerically singular "
        "(non-diagonalizable pencil), rcond estimate " + std::to_string(rcond),
        rcond);
  // V_left^* = V_right^-1 M_inv, so V_left^* M V_right = I by construction.
  const ComplexDenseMatrix V_left_star = dense_multiply(V_right_inv, to_complex(M_inv));
  decomp.V_left = conjugate_transpose(V_left_star);
  decomp.ordering = order_by_distance_from_one(decomp.lambdas);

  const BiorthReport report = biorthogonality_report(decomp, K, M_inv);
  decomp.biorth_defect = report.identity_defect;
  if (!(decomp.biorth_defect <= 1e-8))
    throw EigenSolverError("pencil_eigendecomposition: biorthogonality defect exceeds 1e-8",
                           decomp.biorth_defect);
  return decomp;
}

BiorthReport biorthogonality_report(const PencilDecomposition& decomp, const SparseMatrix& K,
                                    const DenseMatrix& M_inv) {
  const index_t n = decomp.size();
  const ComplexDenseMatrix V_left_star = conjugate_transpose(decomp.V_left);

  // M = M_inv^-1, formed once for the defect measurements.
  const DenseMatrix M = dense_solve(M_inv, DenseMatrix::identity(n));
  ComplexDenseMatrix G = dense_multiply(V_left_star, dense_multiply(to_complex(M), decomp.V_right));
  BiorthReport report;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      const std::complex<double> expected = i == j ? 1.0 : 0.0;
      report.identity_defect = std::max(report.identity_defect, std::abs(G(i, j) - expected));
    }
  }

  ComplexDenseMatrix KV = dense_multiply(to_complex(to_dense(K)), decomp.V_right);
  ComplexDenseMatrix D = dense_multiply(V_left_star, KV);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      const std::complex<double> expected = i == j ? decomp.lambdas[static_cast<std::size_t>(i)] : 0.0;
      report.diagonalization_defect =
          std::max(report.diagonalization_defect, std::abs(D(i, j) - expected));
    }
  }
  return report;
}

OptimalOperators optimal_operators(const PencilDecomposition& decomp, index_t n_c) {
  const index_t n = decomp.size();
  if (n_c < 0 || n_c > n) throw ConfigError("optimal_operators: n_c out of range");

  OptimalOperators ops;
  ops.n_c_requested = n_c;
  const std::vector<index_t> taken = take_leading_directions(decomp, n_c, &ops.pair_adjusted);
  ops.n_c_eff = static_cast<index_t>(taken.size());
  ops.P_sharp = realify_columns(decomp.V_right, decomp.lambdas, taken);
  ops.R_sharp = dense_transpose(realify_columns(decomp.V_left, decomp.lambdas, taken));
  return ops;
}

DenseMatrix assemble_error_propagator(const SparseMatrix& K, const DenseMatrix& M_inv,
                                      const DenseMatrix& P, const DenseMatrix& R, int nu1,
                                      int nu2) {
  if (nu1 < 0 || nu2 < 0) throw ConfigError("assemble_error_propagator: sweep counts must be >= 0");
  const index_t n = K.nrows;
  const DenseMatrix Kd = to_dense(K);

  // S = I - M_inv K
  DenseMatrix S = dense_multiply(M_inv, Kd);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) S(i, j) = (i == j ? 1.0 : 0.0) - S(i, j);

  // CGC = I - P (R K P)^-1 R K
  DenseMatrix E;
  if (P.ncols == 0) {
    E = DenseMatrix::identity(n);
  } else {
    const DenseMatrix RK = dense_multiply(R, Kd);
    const DenseMatrix RKP = dense_multiply(RK, P);
    DenseMatrix Y;
    try {
      Y = dense_solve(RKP, RK);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError(
          std::string("assemble_error_propagator: singular R K P (coarse-space degeneracy): ") +
              e.what(),
          e.pivot_index);
    }
    E = dense_multiply(P, Y);
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < n; ++j) E(i, j) = (i == j ? 1.0 : 0.0) - E(i, j);
  }

  for (int s = 0; s < nu1; ++s) E = dense_multiply(E, S);
  for (int s = 0; s < nu2; ++s) E = dense_multiply(S, E);
  return E;
}

double predicted_factor(const PencilDecomposition& decomp, index_t n_c) {
  const index_t n = decomp.size();
  if (n_c < 0 || n_c >= n) throw ConfigError("predicted_factor: n_c must be < n");
  bool adjusted = false;
  const std::vector<index_t> taken = take_leading_directions(decomp, n_c, &adjusted);
  const index_t n_c_eff = static_cast<index_t>(taken.size());
  if (n_c_eff >= n) return 0.0;
  const index_t next = decomp.ordering[static_cast<std::size_t>(n_c_eff)];
  return std::abs(1.0 - decomp.lambdas[static_cast<std::size_t>(next)]);
}

IdentityReport verify_identity(const SparseMatrix& K, const DenseMatrix& M_inv, index_t n_c,
                               IdentityMode mode) {
  if (mode == IdentityMode::hermitian) {
    const double k_defect = sparse_symmetry_defect(K);
    if (k_defect > 1e-10)
      throw ConfigError(
          "verify_identity: hermitian mode requires symmetric K (defect " +
          std::to_string(k_defect) + "); use the nonsymmetric mode");
    const DenseMatrix M = dense_solve(M_inv, DenseMatrix::identity(K.nrows));
    const double m_defect = symmetry_defect(M);
    if (m_defect > 1e-8)
      throw ConfigError(
          "verify_identity: hermitian mode requires symmetric M (defect " +
          std::to_string(m_defect) + "); use the nonsymmetric mode");
  }

  const PencilDecomposition decomp = pencil_eigendecomposition(K, M_inv);

  IdentityReport report;
  DenseMatrix P, R;
  if (mode == IdentityMode::hermitian) {
    bool adjusted = false;
    const std::vector<index_t> taken = take_leading_directions(decomp, n_c, &adjusted);
    report.pair_adjusted = adjusted;
    report.n_c_eff = static_cast<index_t>(taken.size());
    P = realify_columns(decomp.V_right, decomp.lambdas, taken);
    R = dense_transpose(P);
  } else {
    const OptimalOperators ops = optimal_operators(decomp, n_c);
    report.pair_adjusted = ops.pair_adjusted;
    report.n_c_eff = ops.n_c_eff;
    P = ops.P_sharp;
    R = ops.R_sharp;
  }

  const DenseMatrix E = assemble_error_propagator(K, M_inv, P, R, 1, 0);
  report.rho_measured = spectral_radius(E);
  report.predicted =
      report.n_c_eff >= decomp.size() ? 0.0 : predicted_factor(decomp, report.n_c_eff);
  report.abs_gap = std::abs(report.rho_measured - report.predicted);
  return report;
}

}  // namespace amglab
