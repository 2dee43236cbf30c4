#pragma once

#include <string>
#include <vector>

#include "amglab/dense.hpp"
#include "amglab/dense_linalg.hpp"
#include "amglab/sparse.hpp"

namespace amglab {

// Velocity/pressure split of a reduced saddle-point operator: indices
// [0, n_velocity) are velocity, [n_velocity, n_velocity + n_pressure) are
// pressure.
struct DofPartition {
  index_t n_velocity = 0;
  index_t n_pressure = 0;

  index_t size() const { return n_velocity + n_pressure; }
};

// One overlapping patch: a pressure DoF together with every velocity DoF its
// matrix row couples to, plus the cached factorization of the local block.
struct VankaPatch {
  index_t pressure_dof = -1;
  std::vector<index_t> dof_indices;  // ascending; contains exactly one pressure DoF
  LuFactor local;                    // factorized K[patch, patch]

  VankaPatch(index_t p, std::vector<index_t> dofs, LuFactor factor)
      : pressure_dof(p), dof_indices(std::move(dofs)), local(std::move(factor)) {}
};

enum class VankaMode {
  additive_pou,              // partition-of-unity weights after the patch solves
  additive_unweighted,       // plain sum of patch corrections
  multiplicative,            // sequential sweep, ascending pressure index
  multiplicative_symmetrized // forward sweep then reverse sweep
};

const char* vanka_mode_name(VankaMode mode);
VankaMode vanka_mode_from_name(const std::string& name);

struct VankaRelaxation {
  SparseMatrix K;
  std::vector<VankaPatch> patches;
  std::vector<double> weights;  // per DoF: 1/multiplicity over covering patches
  VankaMode mode = VankaMode::additive_pou;
  double omega = 1.0;
};

// One patch per pressure DoF i: {i} plus the velocity DoFs with K[i,j] != 0.
// Throws when a local block is singular, naming the pressure DoF.
std::vector<VankaPatch> build_patches(const SparseMatrix& K, const DofPartition& partition);

VankaRelaxation build_vanka(const SparseMatrix& K, const DofPartition& partition, VankaMode mode,
                            double omega);

// One sweep x <- x + omega * (patch corrections per the mode). Additive modes
// compute the global residual once; multiplicative modes refresh the local
// residual at every patch visit.
std::vector<double> apply_relaxation(const VankaRelaxation& relax, const std::vector<double>& x,
                                     const std::vector<double>& b);

// The relaxation operator made explicit. Additive modes assemble
// sum_i W R_i^T K_i^-1 R_i directly; multiplicative modes recover columns by
// sweeping unit vectors at omega = 1. Throws when the result is singular.
DenseMatrix extract_m_inverse(const VankaRelaxation& relax, index_t n);

// ||M - M^T||_max / ||M||_max.
double symmetry_defect(const DenseMatrix& M);

struct VankaStatistics {
  index_t patch_count = 0;
  index_t min_patch_size = 0;
  index_t max_patch_size = 0;
  double mean_patch_size = 0.0;
  index_t covered_dofs = 0;
  index_t total_dofs = 0;
};

VankaStatistics patch_statistics(const VankaRelaxation& relax);

}  // namespace amglab
