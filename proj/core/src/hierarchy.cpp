#include "amglab/hierarchy.hpp"

#include <string>

#include "amglab/aggregation.hpp"
#include "amglab/errors.hpp"
#include "amglab/prolongation.hpp"
#include "amglab/strength.hpp"

namespace amglab {

namespace {

SparseMatrix field_prolongation(const SparseMatrix& A_field, const HierarchyParams& params,
                                double theta, int level, const char* field) {
  const StrengthGraph S = evolution_soc(A_field, params.soc_steps, theta);
  const Aggregation agg = standard_aggregation(S);
  if (agg.n_aggregates <= 0)
    throw ConfigError("build_monolithic_hierarchy: aggregation collapse at level " +
                      std::to_string(level) + ", " + field + " field");
  DenseMatrix constants(A_field.nrows, 1);
  for (index_t i = 0; i < A_field.nrows; ++i) constants(i, 0) = 1.0;
  const SparseMatrix T = tentative_prolongation(agg, constants);
  return smooth_prolongation(A_field, T, params.omega_override);
}

}  // namespace

std::vector<Level> build_monolithic_hierarchy(const StokesSystem& system, const SparseMatrix& A_p,
                                              int levels, const HierarchyParams& params) {
  if (levels < 2) throw ConfigError("build_monolithic_hierarchy: levels must be >= 2");
  if (A_p.nrows != system.n_pressure())
    throw DimensionError("build_monolithic_hierarchy: A_p size must match the pressure block");

  SparseMatrix As = system.A_scalar;
  SparseMatrix Ap = A_p;
  SparseMatrix K = system.K;

  std::vector<Level> hierarchy;
  for (int lev = 0; lev + 1 < levels; ++lev) {
    const SparseMatrix P_u = field_prolongation(As, params, params.theta_velocity, lev, "velocity");
    const SparseMatrix P_p = field_prolongation(Ap, params, params.theta_pressure, lev, "pressure");

    Level level;
    level.P = block_diag({&P_u, &P_u, &P_p});
    level.R = transpose(level.P);
    level.K_coarse = triple_product(level.R, K, level.P);
    level.field_offsets = {0, 2 * P_u.ncols, 2 * P_u.ncols + P_p.ncols};
    hierarchy.push_back(level);

    As = triple_product(transpose(P_u), As, P_u);
    Ap = triple_product(transpose(P_p), Ap, P_p);
    K = hierarchy.back().K_coarse;
    if (K.nrows <= params.min_coarse_size) break;
  }
  return hierarchy;
}

}  // namespace amglab
