#include "amglab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "amglab/errors.hpp"

namespace amglab {

namespace {

std::vector<double> residual(const SparseMatrix& K, const std::vector<double>& x,
                             const std::vector<double>& b) {
  std::vector<double> r = spmv(K, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

void smooth_step(const VankaRelaxation& relax, int inner_fgmres, std::vector<double>& x,
                 const std::vector<double>& b) {
  if (inner_fgmres > 0) {
    wrapped_relaxation(relax, inner_fgmres)(x, b);
  } else {
    x = apply_relaxation(relax, x, b);
  }
}

void cycle_recurse(const MultigridHierarchy& h, const std::vector<VankaRelaxation>& relax,
                   std::size_t level, std::vector<double>& x, const std::vector<double>& b,
                   const CycleConfig& config) {
  if (level + 1 == static_cast<std::size_t>(h.n_levels())) {
    x = h.coarse_factor->solve(b);
    return;
  }
  const SparseMatrix& K = h.operators[level];
  for (int s = 0; s < config.nu1; ++s) smooth_step(relax[level], config.inner_fgmres, x, b);
  const std::vector<double> r = residual(K, x, b);
  const std::vector<double> r_coarse = spmv(h.restrictions[level], r);
  std::vector<double> x_coarse(r_coarse.size(), 0.0);
  cycle_recurse(h, relax, level + 1, x_coarse, r_coarse, config);
  const std::vector<double> correction = spmv(h.prolongations[level], x_coarse);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += correction[i];
  for (int s = 0; s < config.nu2; ++s) smooth_step(relax[level], config.inner_fgmres, x, b);
}

}  // namespace

MultigridHierarchy build_multigrid(const StokesSystem& system, const SparseMatrix& A_p, int levels,
                                   const HierarchyParams& params) {
  const std::vector<Level> setup = build_monolithic_hierarchy(system, A_p, levels, params);

  MultigridHierarchy h;
  h.operators.push_back(system.K);
  h.partitions.push_back({system.n_velocity(), system.n_pressure()});
  for (const Level& level : setup) {
    h.operators.push_back(level.K_coarse);
    h.prolongations.push_back(level.P);
    h.restrictions.push_back(level.R);
    h.partitions.push_back({level.coarse_velocity_size(), level.coarse_pressure_size()});
  }
  try {
    h.coarse_factor.emplace(to_dense(h.operators.back()));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        std::string("build_multigrid: singular coarsest operator (") + e.what() + ")",
        e.pivot_index);
  }
  return h;
}

std::vector<VankaRelaxation> build_smoothers(const MultigridHierarchy& hierarchy, VankaMode mode,
                                             double omega) {
  std::vector<VankaRelaxation> smoothers;
  for (index_t level = 0; level + 1 < hierarchy.n_levels(); ++level)
    smoothers.push_back(build_vanka(hierarchy.operators[static_cast<std::size_t>(level)],
                                    hierarchy.partitions[static_cast<std::size_t>(level)], mode,
                                    omega));
  return smoothers;
}

std::vector<double> cycle(const MultigridHierarchy& hierarchy,
                          const std::vector<VankaRelaxation>& relax, const std::vector<double>& x,
                          const std::vector<double>& b, const CycleConfig& config) {
  if (hierarchy.n_levels() < 2) throw ConfigError("cycle: hierarchy must have at least 2 levels");
  if (static_cast<index_t>(relax.size()) + 1 < hierarchy.n_levels())
    throw ConfigError("cycle: need one smoother per level above the coarsest");
  if (config.nu1 < 0 || config.nu2 < 0) throw ConfigError("cycle: sweep counts must be >= 0");
  std::vector<double> out = x;
  cycle_recurse(hierarchy, relax, 0, out, b, config);
  return out;
}

IterationLog stationary_solve(const MultigridHierarchy& hierarchy,
                              const std::vector<VankaRelaxation>& relax,
                              const std::vector<double>& b, const CycleConfig& config, double tol,
                              int maxit, const std::vector<double>& x0, ToleranceKind kind) {
  if (tol <= 0.0) throw ConfigError("stationary_solve: tol must be positive");
  std::vector<double> x = x0.empty() ? std::vector<double>(b.size(), 0.0) : x0;
  if (x.size() != b.size()) throw DimensionError("stationary_solve: x0 length mismatch");

  IterationLog log;
  double r0 = norm2(residual(hierarchy.operators[0], x, b));
  log.residual_norms.push_back(r0);
  const double scale = kind == ToleranceKind::relative ? (r0 > 0.0 ? r0 : 1.0) : 1.0;
  if (r0 <= tol * scale) {
    log.converged = true;
    return log;
  }
  for (int it = 0; it < maxit; ++it) {
    x = cycle(hierarchy, relax, x, b, config);
    const double rn = norm2(residual(hierarchy.operators[0], x, b));
    log.residual_norms.push_back(rn);
    log.iterations = it + 1;
    if (rn <= tol * scale) {
      log.converged = true;
      break;
    }
    if (!std::isfinite(rn)) break;
  }
  return log;
}

std::pair<std::vector<double>, IterationLog> fgmres(const LinearAction& apply_operator,
                                                    const LinearAction& apply_preconditioner,
                                                    const std::vector<double>& b, double tol,
                                                    int maxit, int restart) {
  if (maxit < 0) throw ConfigError("fgmres: maxit must be >= 0");
  if (restart < 1) throw ConfigError("fgmres: restart must be >= 1");
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0);

  IterationLog log;
  const double beta0 = norm2(b);
  log.residual_norms.push_back(beta0);
  const double target = tol * (beta0 > 0.0 ? beta0 : 1.0);
  if (beta0 <= target) {
    log.converged = true;
    return {x, log};
  }

  int total_iters = 0;
  bool done = false;
  while (!done && total_iters < maxit) {
    std::vector<double> r = b;
    if (total_iters > 0) {
      r = apply_operator(x);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    }
    double beta = norm2(r);
    if (beta <= target) {
      log.converged = true;
      break;
    }

    const int m = std::min(restart, maxit - total_iters);
    std::vector<std::vector<double>> V, Z;
    V.reserve(static_cast<std::size_t>(m) + 1);
    Z.reserve(static_cast<std::size_t>(m));
    std::vector<double> v0 = r;
    for (double& v : v0) v /= beta;
    V.push_back(std::move(v0));

    // Column-major Hessenberg with Givens rotations applied in place.
    std::vector<std::vector<double>> H;
    std::vector<double> cs, sn;
    std::vector<double> g(static_cast<std::size_t>(m) + 1, 0.0);
    g[0] = beta;

    int j = 0;
    bool breakdown = false;
    for (; j < m; ++j) {
      Z.push_back(apply_preconditioner(V[static_cast<std::size_t>(j)]));
      std::vector<double> w = apply_operator(Z.back());
      std::vector<double> h(static_cast<std::size_t>(j) + 2, 0.0);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const double proj = dot(w, V[static_cast<std::size_t>(i)]);
          h[static_cast<std::size_t>(i)] += proj;
          axpy(-proj, V[static_cast<std::size_t>(i)], w);
        }
      }
      const double wn = norm2(w);
      h[static_cast<std::size_t>(j) + 1] = wn;

      for (int i = 0; i < j; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
                         sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
        h[static_cast<std::size_t>(i) + 1] =
            -sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
            cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
        h[static_cast<std::size_t>(i)] = t;
      }
      const double denom = std::hypot(h[static_cast<std::size_t>(j)], wn);
      double c = 1.0, s = 0.0;
      if (denom > 0.0) {
        c = h[static_cast<std::size_t>(j)] / denom;
        s = wn / denom;
      }
      cs.push_back(c);
      sn.push_back(s);
      h[static_cast<std::size_t>(j)] = denom;
      h[static_cast<std::size_t>(j) + 1] = 0.0;
      g[static_cast<std::size_t>(j) + 1] = -s * g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] = c * g[static_cast<std::size_t>(j)];
      H.push_back(std::move(h));

      ++total_iters;
      const double est = std::abs(g[static_cast<std::size_t>(j) + 1]);
      log.residual_norms.push_back(est);
      log.iterations = total_iters;

      if (wn <= 1e-14 * beta) breakdown = true;
      if (est <= target || breakdown || total_iters >= maxit) {
        ++j;
        break;
      }
      std::vector<double> vnext = std::move(w);
      for (double& v : vnext) v /= wn;
      V.push_back(std::move(vnext));
    }

    // Back-substitute the triangular system and update x with the flexible basis.
    std::vector<double> y(static_cast<std::size_t>(j), 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double sum = g[static_cast<std::size_t>(i)];
      for (int kk = i + 1; kk < j; ++kk)
        sum -= H[static_cast<std::size_t>(kk)][static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(kk)];
      y[static_cast<std::size_t>(i)] = sum / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    for (int kk = 0; kk < j; ++kk) axpy(y[static_cast<std::size_t>(kk)], Z[static_cast<std::size_t>(kk)], x);

    const double est = std::abs(g[static_cast<std::size_t>(j)]);
    if (est <= target) {
      log.converged = true;
      done = true;
    } else if (breakdown) {
      // Invariant subspace reached without meeting the tolerance: stagnation.
      done = true;
    }
  }
  return {x, log};
}

RelaxationAction wrapped_relaxation(const VankaRelaxation& relax, int k) {
  if (k < 1) throw ConfigError("wrapped_relaxation: k must be >= 1");
  return [&relax, k](std::vector<double>& x, const std::vector<double>& b) {
    const std::vector<double> r = residual(relax.K, x, b);
    if (norm2(r) == 0.0) return;
    const std::vector<double> zero(x.size(), 0.0);
    auto [d, log] = fgmres(
        [&relax](const std::vector<double>& v) { return spmv(relax.K, v); },
        [&relax, &zero](const std::vector<double>& v) { return apply_relaxation(relax, zero, v); },
        r, /*tol=*/0.0, /*maxit=*/k, /*restart=*/k);
    (void)log;
    axpy(1.0, d, x);
  };
}

std::pair<double, double> convergence_factors(const IterationLog& log) {
  const std::size_t n_res = log.residual_norms.size();
  if (n_res == 2 && log.residual_norms[1] == 0.0) return {0.0, 0.0};
  if (n_res < 3)
    throw ConfigError("convergence_factors: need at least 3 recorded residuals");
  const double r0 = log.residual_norms.front();
  if (r0 == 0.0) throw ConfigError("convergence_factors: initial residual is zero");
  const std::size_t k = n_res - 1;
  const double rk = log.residual_norms.back();
  const double geometric = std::pow(rk / r0, 1.0 / static_cast<double>(k));

  const std::size_t m = std::min<std::size_t>(5, k - 1);
  const double r_from = log.residual_norms[k - m];
  const double asymptotic =
      r_from == 0.0 ? 0.0 : std::pow(rk / r_from, 1.0 / static_cast<double>(m));
  return {geometric, asymptotic};
}

}  // namespace amglab
