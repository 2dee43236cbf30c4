#pragma once

#include <vector>

#include "amglab/sparse.hpp"

namespace amglab {

// Directed strong-connection graph. CSR-like adjacency over the nodes of the
// source operator; the diagonal is excluded and every stored edge is
// classified strong (weight >= 1/theta).
struct StrengthGraph {
  index_t n = 0;
  std::vector<index_t> row_offsets;  // size n+1
  std::vector<index_t> col_indices;  // strong neighbors of each node
  std::vector<double> weights;      // relative strengths s_ij, nonnegative
  double theta = 0.0;

  index_t degree(index_t i) const {
    return row_offsets[static_cast<std::size_t>(i) + 1] - row_offsets[static_cast<std::size_t>(i)];
  }
};

// Strength of connection from the evolution of delta functions: each unit
// vector is advanced k steps of weighted Jacobi (omega = 4 / (3 rho(D^-1 A)),
// support confined to the 2k-ring), and neighbor j of node i is kept when
// |z_j| is within a factor theta of the largest off-diagonal |z_m| over the
// sparsity pattern of row i.
StrengthGraph evolution_soc(const SparseMatrix& A, int k = 2, double theta = 4.0);

}  // namespace amglab
