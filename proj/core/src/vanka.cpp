#include "amglab/vanka.hpp"

#include <algorithm>
#include <string>

#include "amglab/errors.hpp"

namespace amglab {

namespace {

// Residual restricted to a patch: r_loc = (b - K x)[patch].
std::vector<double> local_residual(const SparseMatrix& K, const std::vector<double>& x,
                                   const std::vector<double>& b, const std::vector<index_t>& dofs) {
  std::vector<double> r(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const index_t i = dofs[k];
    double dot = 0.0;
    for (index_t p = K.row_offsets[static_cast<std::size_t>(i)];
         p < K.row_offsets[static_cast<std::size_t>(i) + 1]; ++p)
      dot += K.values[static_cast<std::size_t>(p)] *
             x[static_cast<std::size_t>(K.col_indices[static_cast<std::size_t>(p)])];
    r[k] = b[static_cast<std::size_t>(i)] - dot;
  }
  return r;
}

void sweep_patch(const VankaPatch& patch, double omega, const SparseMatrix& K,
                 std::vector<double>& x, const std::vector<double>& b) {
  const std::vector<double> r = local_residual(K, x, b, patch.dof_indices);
  const std::vector<double> d = patch.local.solve(r);
  for (std::size_t k = 0; k < patch.dof_indices.size(); ++k)
    x[static_cast<std::size_t>(patch.dof_indices[k])] += omega * d[k];
}

}  // namespace

const char* vanka_mode_name(VankaMode mode) {
  switch (mode) {
    case VankaMode::additive_pou: return "additive_pou";
    case VankaMode::additive_unweighted: return "additive_unweighted";
    case VankaMode::multiplicative: return "multiplicative";
    case VankaMode::multiplicative_symmetrized: return "multiplicative_symmetrized";
  }
  return "unknown";
}

VankaMode vanka_mode_from_name(const std::string& name) {
  if (name == "additive_pou") return VankaMode::additive_pou;
  if (name == "additive_unweighted") return VankaMode::additive_unweighted;
  if (name == "multiplicative") return VankaMode::multiplicative;
  if (name == "multiplicative_symmetrized") return VankaMode::multiplicative_symmetrized;
  throw ConfigError("unknown Vanka mode: " + name);
}

std::vector<VankaPatch> build_patches(const SparseMatrix& K, const DofPartition& partition) {
  if (K.nrows != K.ncols) throw DimensionError("build_patches: K must be square");
  if (partition.size() != K.nrows)
    throw DimensionError("build_patches: partition sizes must cover K");

  std::vector<VankaPatch> patches;
  patches.reserve(static_cast<std::size_t>(partition.n_pressure));
  for (index_t p = 0; p < partition.n_pressure; ++p) {
    const index_t row = partition.n_velocity + p;
    std::vector<index_t> dofs;
    for (index_t k = K.row_offsets[static_cast<std::size_t>(row)];
         k < K.row_offsets[static_cast<std::size_t>(row) + 1]; ++k) {
      const index_t j = K.col_indices[static_cast<std::size_t>(k)];
      if (j < partition.n_velocity && K.values[static_cast<std::size_t>(k)] != 0.0)
        dofs.push_back(j);
    }
    dofs.push_back(row);
    std::sort(dofs.begin(), dofs.end());

    const index_t m = static_cast<index_t>(dofs.size());
    DenseMatrix local(m, m);
    for (index_t a = 0; a < m; ++a)
      for (index_t bcol = 0; bcol < m; ++bcol)
        local(a, bcol) = K.at(dofs[static_cast<std::size_t>(a)], dofs[static_cast<std::size_t>(bcol)]);
    try {
      patches.emplace_back(row, std::move(dofs), LuFactor(local));
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError(
          "build_patches: singular local matrix for pressure DoF " + std::to_string(row),
          static_cast<std::size_t>(row));
    }
  }
  return patches;
}

VankaRelaxation build_vanka(const SparseMatrix& K, const DofPartition& partition, VankaMode mode,
                            double omega) {
  VankaRelaxation relax;
  relax.K = K;
  relax.patches = build_patches(K, partition);
  relax.mode = mode;
  relax.omega = omega;
  std::vector<index_t> multiplicity(static_cast<std::size_t>(K.nrows), 0);
  for (const auto& patch : relax.patches)
    for (index_t d : patch.dof_indices) ++multiplicity[static_cast<std::size_t>(d)];
  relax.weights.assign(static_cast<std::size_t>(K.nrows), 0.0);
  for (index_t d = 0; d < K.nrows; ++d)
    if (multiplicity[static_cast<std::size_t>(d)] > 0)
      relax.weights[static_cast<std::size_t>(d)] =
          1.0 / static_cast<double>(multiplicity[static_cast<std::size_t>(d)]);
  return relax;
}

std::vector<double> apply_relaxation(const VankaRelaxation& relax, const std::vector<double>& x,
                                     const std::vector<double>& b) {
  const index_t n = relax.K.nrows;
  if (static_cast<index_t>(x.size()) != n || static_cast<index_t>(b.size()) != n)
    throw DimensionError("apply_relaxation: vector sizes must match K");

  std::vector<double> out = x;
  switch (relax.mode) {
    case VankaMode::additive_pou:
    case VankaMode::additive_unweighted: {
      std::vector<double> r = spmv(relax.K, x);
      for (index_t i = 0; i < n; ++i)
        r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
      std::vector<double> accum(static_cast<std::size_t>(n), 0.0);
      std::vector<double> r_loc;
      for (const auto& patch : relax.patches) {
        r_loc.resize(patch.dof_indices.size());
        for (std::size_t k = 0; k < patch.dof_indices.size(); ++k)
          r_loc[k] = r[static_cast<std::size_t>(patch.dof_indices[k])];
        const std::vector<double> d = patch.local.solve(r_loc);
        for (std::size_t k = 0; k < patch.dof_indices.size(); ++k)
          accum[static_cast<std::size_t>(patch.dof_indices[k])] += d[k];
      }
      if (relax.mode == VankaMode::additive_pou)
        for (index_t i = 0; i < n; ++i)
          accum[static_cast<std::size_t>(i)] *= relax.weights[static_cast<std::size_t>(i)];
      for (index_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] += relax.omega * accum[static_cast<std::size_t>(i)];
      break;
    }
    case VankaMode::multiplicative: {
      for (const auto& patch : relax.patches) sweep_patch(patch, relax.omega, relax.K, out, b);
      break;
    }
    case VankaMode::multiplicative_symmetrized: {
      for (const auto& patch : relax.patches) sweep_patch(patch, relax.omega, relax.K, out, b);
      for (auto it = relax.patches.rbegin(); it != relax.patches.rend(); ++it)
        sweep_patch(*it, relax.omega, relax.K, out, b);
      break;
    }
  }
  return out;
}

DenseMatrix extract_m_inverse(const VankaRelaxation& relax, index_t n) {
  if (n != relax.K.nrows) throw DimensionError("extract_m_inverse: n must match K");

  DenseMatrix m_inv(n, n);
  if (relax.mode == VankaMode::additive_pou || relax.mode == VankaMode::additive_unweighted) {
    // Assemble sum_i W R_i^T K_i^-1 R_i column block by column block.
    std::vector<double> e_loc;
    for (const auto& patch : relax.patches) {
      const std::size_t m = patch.dof_indices.size();
      e_loc.assign(m, 0.0);
      for (std::size_t c = 0; c < m; ++c) {
        e_loc[c] = 1.0;
        const std::vector<double> col = patch.local.solve(e_loc);
        e_loc[c] = 0.0;
        for (std::size_t rrow = 0; rrow < m; ++rrow)
          m_inv(patch.dof_indices[rrow], patch.dof_indices[c]) += col[rrow];
      }
    }
    if (relax.mode == VankaMode::additive_pou)
      for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j) m_inv(i, j) *= relax.weights[static_cast<std::size_t>(i)];
  } else {
    // One undamped sweep on each unit vector reproduces M^-1 e_j.
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    for (index_t j = 0; j < n; ++j) {
      b[static_cast<std::size_t>(j)] = 1.0;
      std::vector<double> x = zero;
      if (relax.mode == VankaMode::multiplicative) {
        for (const auto& patch : relax.patches) sweep_patch(patch, 1.0, relax.K, x, b);
      } else {
        for (const auto& patch : relax.patches) sweep_patch(patch, 1.0, relax.K, x, b);
        for (auto it = relax.patches.rbegin(); it != relax.patches.rend(); ++it)
          sweep_patch(*it, 1.0, relax.K, x, b);
      }
      b[static_cast<std::size_t>(j)] = 0.0;
      for (index_t i = 0; i < n; ++i) m_inv(i, j) = x[static_cast<std::size_t>(i)];
    }
  }

  // Invertibility gate: a zero row (uncovered DoF) or rank loss must surface
  // here, not in downstream spectral code.
  try {
    const LuFactor check(m_inv);
    (void)check;
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        std::string("extract_m_inverse: relaxation operator is singular (") + e.what() + ")",
        e.pivot_index);
  }
  return m_inv;
}

double symmetry_defect(const DenseMatrix& M) {
  if (M.nrows != M.ncols) throw DimensionError("symmetry_defect: matrix must be square");
  double num = 0.0, den = 0.0;
  for (index_t i = 0; i < M.nrows; ++i)
    for (index_t j = 0; j < M.ncols; ++j) {
      num = std::max(num, std::abs(M(i, j) - M(j, i)));
      den = std::max(den, std::abs(M(i, j)));
    }
  return den == 0.0 ? 0.0 : num / den;
}

VankaStatistics patch_statistics(const VankaRelaxation& relax) {
  VankaStatistics stats;
  stats.patch_count = static_cast<index_t>(relax.patches.size());
  stats.total_dofs = relax.K.nrows;
  std::vector<char> covered(static_cast<std::size_t>(relax.K.nrows), 0);
  double total = 0.0;
  for (const auto& patch : relax.patches) {
    const index_t size = static_cast<index_t>(patch.dof_indices.size());
    if (stats.min_patch_size == 0 || size < stats.min_patch_size) stats.min_patch_size = size;
    stats.max_patch_size = std::max(stats.max_patch_size, size);
    total += static_cast<double>(size);
    for (index_t d : patch.dof_indices) covered[static_cast<std::size_t>(d)] = 1;
  }
  if (stats.patch_count > 0) stats.mean_patch_size = total / static_cast<double>(stats.patch_count);
  for (char c : covered) stats.covered_dofs += c;
  return stats;
}

}  // namespace amglab
