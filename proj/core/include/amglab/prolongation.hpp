#pragma once

#include <optional>

#include "amglab/aggregation.hpp"
#include "amglab/dense.hpp"
#include "amglab/sparse.hpp"

namespace amglab {

// Piecewise-nullspace tentative prolongation: one column group per aggregate,
// holding the nullspace restricted to that aggregate and orthonormalized per
// aggregate, so T^T T = I. Columns are aggregate-major.
SparseMatrix tentative_prolongation(const Aggregation& agg, const DenseMatrix& nullspace);

// One step of weighted-Jacobi smoothing applied to the tentative operator:
// P = (I - omega_J D^-1 A) T with omega_J = 4 / (3 rho(D^-1 A)), the spectral
// radius estimated to 1% by Arnoldi. omega_override replaces omega_J when
// set (0 returns T unchanged).
SparseMatrix smooth_prolongation(const SparseMatrix& A, const SparseMatrix& T,
                                 std::optional<double> omega_override = std::nullopt);

}  // namespace amglab
