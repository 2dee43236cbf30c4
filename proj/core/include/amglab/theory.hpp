#pragma once

#include <complex>
#include <vector>

#include "amglab/dense.hpp"
#include "amglab/sparse.hpp"

namespace amglab {

// Generalized eigendecomposition of the pencil (K, M): K v = lambda M v,
// with M supplied through its inverse (the explicit relaxation operator).
// Left vectors are constructed as V_left^* = V_right^-1 M_inv, which makes
// V_left^* M V_right = I and V_left^* K V_right = diag(lambdas) hold by
// construction up to the reported defect.
struct PencilDecomposition {
  std::vector<std::complex<double>> lambdas;  // in eigensolver order
  ComplexDenseMatrix V_right;                 // columns are right vectors
  ComplexDenseMatrix V_left;                  // columns are left vectors
  std::vector<index_t> ordering;              // positions sorted by |1-lambda| descending
  double biorth_defect = 0.0;                 // max |(V_left^* M V_right - I)_ij|

  index_t size() const { return static_cast<index_t>(lambdas.size()); }
};

PencilDecomposition pencil_eigendecomposition(const SparseMatrix& K, const DenseMatrix& M_inv);

// Stable descending sort on |1 - lambda| with conjugate pairs kept adjacent.
std::vector<index_t> order_by_distance_from_one(const std::vector<std::complex<double>>& lambdas);

// Real transfer operators spanning the first n_c eigenvector directions in
// the |1-lambda| ordering. A conjugate pair straddling the cut widens it by
// one; each pair (v, conj v) is replaced by (Re v, Im v), an exact change of
// basis of the same real span.
struct OptimalOperators {
  DenseMatrix P_sharp;  // n x n_c_eff
  DenseMatrix R_sharp;  // n_c_eff x n
  index_t n_c_requested = 0;
  index_t n_c_eff = 0;
  bool pair_adjusted = false;
};

OptimalOperators optimal_operators(const PencilDecomposition& decomp, index_t n_c);

// Dense two-grid error propagator
//   E = (I - M_inv K)^nu2 (I - P (R K P)^-1 R K) (I - M_inv K)^nu1.
// Damping is pre-folded: pass omega * M^-1 for a damped sweep.
DenseMatrix assemble_error_propagator(const SparseMatrix& K, const DenseMatrix& M_inv,
                                      const DenseMatrix& P, const DenseMatrix& R, int nu1, int nu2);

// |1 - lambda_{n_c_eff + 1}| in the ordering, after pair adjustment of n_c.
double predicted_factor(const PencilDecomposition& decomp, index_t n_c);

// Defects of the matrix-induced biorthogonality: identity_defect is
// max |(V_l^* M V_r - I)_ij|, diagonalization_defect is
// max |(V_l^* K V_r - diag(lambda))_ij| (absolute, compare against ||K||_F).
struct BiorthReport {
  double identity_defect = 0.0;
  double diagonalization_defect = 0.0;
};

BiorthReport biorthogonality_report(const PencilDecomposition& decomp, const SparseMatrix& K,
                                    const DenseMatrix& M_inv);

enum class IdentityMode { nonsymmetric, hermitian };

// End-to-end check of the sharp two-grid bound: builds the optimal operators
// for n_c coarse directions, assembles E with nu1=1, nu2=0, and compares
// rho(E) against |1 - lambda_{n_c_eff+1}|. Hermitian mode requires symmetric
// K and M and uses R_sharp = P_sharp^T from the right family alone.
struct IdentityReport {
  double rho_measured = 0.0;
  double predicted = 0.0;
  double abs_gap = 0.0;
  index_t n_c_eff = 0;
  bool pair_adjusted = false;
};

IdentityReport verify_identity(const SparseMatrix& K, const DenseMatrix& M_inv, index_t n_c,
                               IdentityMode mode);

}  // namespace amglab
