#pragma once

#include <optional>
#include <vector>

#include "amglab/sparse.hpp"
#include "amglab/stokes.hpp"

namespace amglab {

// One coarsening step: transfer operators between a fine level and the next
// coarser one, plus the Galerkin coarse operator that lives there.
struct Level {
  SparseMatrix P;        // fine x coarse, block-diagonal across fields
  SparseMatrix R;        // = P^T
  SparseMatrix K_coarse; // R K P
  // Coarse block boundaries: {0, velocity size, velocity + pressure size}.
  std::vector<index_t> field_offsets;

  index_t coarse_size() const { return field_offsets[2]; }
  index_t coarse_velocity_size() const { return field_offsets[1]; }
  index_t coarse_pressure_size() const { return field_offsets[2] - field_offsets[1]; }
};

struct HierarchyParams {
  int soc_steps = 2;              // Jacobi steps in the strength measure
  double theta_velocity = 1.5;    // strength drop tolerance, velocity field
  double theta_pressure = 1.5;    // strength drop tolerance, pressure field
  index_t min_coarse_size = 20;   // stop coarsening below this many unknowns
  // Test hook forwarded to prolongation smoothing (0 keeps P tentative).
  std::optional<double> omega_override;
};

// Smoothed-aggregation setup applied per field: the velocity pipeline runs on
// the scalar component operator (both components share aggregates), the
// pressure pipeline on the auxiliary Laplacian A_p; each level combines them
// into a block-diagonal monolithic P and forms K via the Galerkin product.
// Produces at most levels-1 entries; stops early once a coarse operator is
// at or below min_coarse_size unknowns.
std::vector<Level> build_monolithic_hierarchy(const StokesSystem& system, const SparseMatrix& A_p,
                                              int levels, const HierarchyParams& params = {});

}  // namespace amglab
