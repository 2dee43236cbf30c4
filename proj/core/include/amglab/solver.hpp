#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "amglab/dense_linalg.hpp"
#include "amglab/hierarchy.hpp"
#include "amglab/sparse.hpp"
#include "amglab/stokes.hpp"
#include "amglab/vanka.hpp"

namespace amglab {

struct CycleConfig {
  int nu1 = 1;           // pre-relaxation sweeps
  int nu2 = 0;           // post-relaxation sweeps
  double omega = 0.62;   // relaxation damping
  int inner_fgmres = 0;  // >0 wraps each sweep in that many FGMRES iterations
  int levels = 2;
};

struct IterationLog {
  std::vector<double> residual_norms;  // [0] is the initial residual
  bool converged = false;
  index_t iterations = 0;
};

// Per-level operators and transfers for the multigrid cycle; the coarsest
// operator is factorized once at build time.
struct MultigridHierarchy {
  std::vector<SparseMatrix> operators;              // K per level, [0] finest
  std::vector<SparseMatrix> prolongations;          // level l -> l is fine side
  std::vector<SparseMatrix> restrictions;           // transposes of the above
  std::vector<DofPartition> partitions;             // per level, including finest
  std::optional<LuFactor> coarse_factor;

  index_t n_levels() const { return static_cast<index_t>(operators.size()); }
};

// Galerkin hierarchy plus per-level structure for smoother construction.
// Requests config.levels levels; fewer are produced if coarsening bottoms out.
MultigridHierarchy build_multigrid(const StokesSystem& system, const SparseMatrix& A_p,
                                   int levels, const HierarchyParams& params = {});

// Vanka smoother on every level except the coarsest.
std::vector<VankaRelaxation> build_smoothers(const MultigridHierarchy& hierarchy, VankaMode mode,
                                             double omega);

// One multigrid cycle: nu1 pre-sweeps, restrict the residual, recurse (direct
// solve on the coarsest level), prolongate the correction, nu2 post-sweeps.
// With two levels and plain sweeps this is exactly the two-grid error
// propagator acting on the current error.
std::vector<double> cycle(const MultigridHierarchy& hierarchy,
                          const std::vector<VankaRelaxation>& relax, const std::vector<double>& x,
                          const std::vector<double>& b, const CycleConfig& config);

enum class ToleranceKind { relative, absolute };

// Repeats cycle until the residual test passes or maxit is hit, recording
// every residual. x0 empty means a zero initial guess.
IterationLog stationary_solve(const MultigridHierarchy& hierarchy,
                              const std::vector<VankaRelaxation>& relax,
                              const std::vector<double>& b, const CycleConfig& config, double tol,
                              int maxit, const std::vector<double>& x0 = {},
                              ToleranceKind kind = ToleranceKind::relative);

using LinearAction = std::function<std::vector<double>(const std::vector<double>&)>;

// Right-preconditioned flexible GMRES with Givens rotations; restart equal to
// maxit disables restarting.
std::pair<std::vector<double>, IterationLog> fgmres(const LinearAction& apply_operator,
                                                    const LinearAction& apply_preconditioner,
                                                    const std::vector<double>& b, double tol,
                                                    int maxit, int restart);

// Smoother action of k FGMRES iterations on the residual equation, each
// preconditioned by one Vanka sweep.
using RelaxationAction =
    std::function<void(std::vector<double>& x, const std::vector<double>& b)>;
RelaxationAction wrapped_relaxation(const VankaRelaxation& relax, int k);

// (geometric, asymptotic) convergence factors of a residual history:
// geometric over the whole run, asymptotic from the last min(5, k-1) ratios.
std::pair<double, double> convergence_factors(const IterationLog& log);

}  // namespace amglab
