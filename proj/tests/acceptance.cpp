// Acceptance gate. Each test drives one release criterion end to end on the
// protocol instances and prints a single "[CRITERION k] PASS/FAIL" line with
// the measured numbers, so the ctest log doubles as the verification report.

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "amglab/dense.hpp"
#include "amglab/dense_linalg.hpp"
#include "amglab/experiments.hpp"
#include "amglab/hierarchy.hpp"
#include "amglab/mesh.hpp"
#include "amglab/solver.hpp"
#include "amglab/sparse.hpp"
#include "amglab/stokes.hpp"
#include "amglab/theory.hpp"
#include "amglab/vanka.hpp"

namespace {

using namespace amglab;

void report(int k, bool pass, const std::string& detail) {
  std::printf("[CRITERION %d] %s: %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

struct Bundle {
  TriMesh mesh;
  StokesSystem system;
  SparseMatrix A_p;
};

Bundle stokes_bundle(index_t n) {
  Bundle b;
  b.mesh = build_structured_mesh(n, BcLayout::dirichlet_left_bottom_top);
  b.system = assemble_stokes(b.mesh, zero_field(), reference_forcing(), reference_neumann());
  b.A_p = assemble_pressure_laplacian(b.mesh);
  return b;
}

DofPartition partition_of(const StokesSystem& system) {
  return DofPartition{system.n_velocity(), system.n_pressure()};
}

DenseMatrix scaled(DenseMatrix M, double factor) {
  for (double& v : M.values) v *= factor;
  return M;
}

DenseMatrix relaxation_inverse(const StokesSystem& system, VankaMode mode) {
  VankaRelaxation relax = build_vanka(system.K, partition_of(system), mode, 1.0);
  return extract_m_inverse(relax, system.size());
}

std::vector<double> random_error(index_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

// The protocol instance for the identity checks: one mesh size whose reduced
// system lands in the few-hundred-DoF range, three dampings, cuts at n/8,
// n/4, n/2.
constexpr index_t kIdentityMesh = 6;
const double kIdentityOmegas[] = {0.41, 0.62, 0.73};

std::vector<index_t> identity_cuts(index_t n) { return {n / 8, n / 4, n / 2}; }

}  // namespace

// rho(E_TG(P_sharp, R_sharp)) equals |1 - lambda_{n_c+1}| for the
// nonsymmetric partition-of-unity Vanka pencil, to 1e-6, within the runtime
// budget of five minutes per (K, M_omega) system.
TEST(Acceptance, Criterion1SharpIdentityNonsymmetric) {
  bool pass = false;
  std::string detail;
  try {
    const Bundle b = stokes_bundle(kIdentityMesh);
    const index_t n = b.system.size();
    const DenseMatrix M1 = relaxation_inverse(b.system, VankaMode::additive_pou);

    double max_gap = 0.0;
    double max_seconds = 0.0;
    for (double omega : kIdentityOmegas) {
      const auto start = std::chrono::steady_clock::now();
      const DenseMatrix Mw = scaled(M1, omega);
      for (index_t n_c : identity_cuts(n)) {
        const IdentityReport rep = verify_identity(b.system.K, Mw, n_c, IdentityMode::nonsymmetric);
        max_gap = std::max(max_gap, rep.abs_gap);
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      max_seconds = std::max(max_seconds, elapsed.count());
    }

    const bool size_ok = n >= 200 && n <= 800;
    pass = size_ok && max_gap <= 1e-6 && max_seconds <= 300.0;
    detail = fmt("n=%lld, 3 dampings x 3 cuts, max |rho - predicted| = %.3e (tol 1e-6), "
                 "slowest system %.1f s (budget 300 s)",
                 static_cast<long long>(n), max_gap, max_seconds);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(1, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// Same protocol through the Hermitian corollary (R_sharp = P_sharp^T from the
// right family alone), using the symmetric Vanka variant.
TEST(Acceptance, Criterion2SharpIdentityHermitian) {
  bool pass = false;
  std::string detail;
  try {
    const Bundle b = stokes_bundle(kIdentityMesh);
    const index_t n = b.system.size();

    const char* smoother = "additive_unweighted";
    DenseMatrix M1 = relaxation_inverse(b.system, VankaMode::additive_unweighted);
    double m_defect = symmetry_defect(M1);
    if (m_defect > 1e-8) {
      smoother = "multiplicative_symmetrized";
      M1 = relaxation_inverse(b.system, VankaMode::multiplicative_symmetrized);
      m_defect = symmetry_defect(M1);
    }

    double max_gap = 0.0;
    for (double omega : kIdentityOmegas) {
      const DenseMatrix Mw = scaled(M1, omega);
      for (index_t n_c : identity_cuts(n)) {
        const IdentityReport rep = verify_identity(b.system.K, Mw, n_c, IdentityMode::hermitian);
        max_gap = std::max(max_gap, rep.abs_gap);
      }
    }

    pass = m_defect <= 1e-8 && max_gap <= 1e-6;
    detail = fmt("n=%lld, smoother %s (M symmetry defect %.2e), max |rho - predicted| = %.3e "
                 "(tol 1e-6)",
                 static_cast<long long>(n), smoother, m_defect, max_gap);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(2, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// Matrix-induced biorthogonality holds on every decomposition the identity
// checks accept: ||V_l^* M V_r - I||_max <= 1e-8 and
// ||V_l^* K V_r - diag(lambda)||_max <= 1e-8 ||K||_F.
TEST(Acceptance, Criterion3Biorthogonality) {
  bool pass = false;
  std::string detail;
  try {
    const Bundle b = stokes_bundle(kIdentityMesh);
    const double k_frob = frobenius_norm(b.system.K);

    double max_identity = 0.0;
    double max_diag = 0.0;
    int count = 0;
    for (VankaMode mode : {VankaMode::additive_pou, VankaMode::additive_unweighted}) {
      const DenseMatrix M1 = relaxation_inverse(b.system, mode);
      for (double omega : kIdentityOmegas) {
        const DenseMatrix Mw = scaled(M1, omega);
        const PencilDecomposition decomp = pencil_eigendecomposition(b.system.K, Mw);
        const BiorthReport rep = biorthogonality_report(decomp, b.system.K, Mw);
        max_identity = std::max(max_identity, rep.identity_defect);
        max_diag = std::max(max_diag, rep.diagonalization_defect);
        ++count;
      }
    }

    pass = max_identity <= 1e-8 && max_diag <= 1e-8 * k_frob;
    detail = fmt("%d decompositions, max ||Vl* M Vr - I||_max = %.3e (tol 1e-8), "
                 "max ||Vl* K Vr - diag||_max = %.3e (tol %.3e)",
                 count, max_identity, max_diag, 1e-8 * k_frob);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(3, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// The predicted factor at the SA coarse size lower-bounds the measured
// asymptotic two-grid factor (plus 0.02 slack) for every converging damping.
TEST(Acceptance, Criterion4PredictionLowerBound) {
  bool pass = false;
  std::string detail;
  try {
    ExperimentConfig config;
    config.mesh_ns = {kIdentityMesh};
    config.levels = 2;
    config.cycles = {{1, 0}};
    config.tol = 1e-10;
    config.maxit = 100;
    config.output_dir.clear();
    const std::vector<TheoryRow> rows = run_theory_comparison(config);

    int converging = 0;
    int violations = 0;
    double worst_margin = -1e300;  // predicted - (asymptotic + 0.02), negative is good
    for (const TheoryRow& row : rows) {
      if (row.status != "ok") continue;
      ++converging;
      const double margin = row.predicted - (row.measured_asymptotic + 0.02);
      worst_margin = std::max(worst_margin, margin);
      if (margin > 0.0) ++violations;
    }

    pass = converging > 0 && violations == 0;
    detail = fmt("%d converging dampings of %d rows, predicted <= asymptotic + 0.02 on all "
                 "(worst margin %+.3e)",
                 converging, static_cast<int>(rows.size()), worst_margin);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(4, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// Three-level V(1,0) damping study: iteration counts fall monotonically along
// 0.41 -> 0.52 -> 0.62, the overdamped 0.84 run fails within 100 iterations,
// and the 0.62 counts on two meshes with DoF ratio near 1.7 agree within 20%.
TEST(Acceptance, Criterion5DampingSweep) {
  bool pass = false;
  std::string detail;
  try {
    ExperimentConfig config;
    config.mesh_ns = {10, 13};
    config.omegas = {0.41, 0.52, 0.62, 0.84};
    config.cycles = {{1, 0}};
    config.levels = 3;
    config.tol = 1e-10;
    // The cap leaves room to measure the slow-but-converging underdamped
    // runs; the overdamped failure clause is still judged at 100 iterations.
    config.maxit = 200;
    config.vanka_mode = VankaMode::additive_pou;
    config.output_dir.clear();
    const std::vector<ReportRow> rows = run_omega_sweep(config);

    auto find_row = [&rows](index_t mesh_n, double omega) -> const ReportRow& {
      for (const ReportRow& row : rows) {
        if (row.mesh_n == mesh_n && std::abs(row.omega - omega) < 1e-12) return row;
      }
      throw Error("sweep row missing");
    };

    bool ordering_ok = true;
    bool overdamped_fails = true;
    for (index_t mesh_n : config.mesh_ns) {
      const ReportRow& r41 = find_row(mesh_n, 0.41);
      const ReportRow& r52 = find_row(mesh_n, 0.52);
      const ReportRow& r62 = find_row(mesh_n, 0.62);
      const ReportRow& r84 = find_row(mesh_n, 0.84);
      ordering_ok = ordering_ok && r41.converged && r52.converged && r62.converged &&
                    r62.iterations < r52.iterations && r52.iterations < r41.iterations;
      overdamped_fails = overdamped_fails && (!r84.converged || r84.iterations > 100);
    }

    const ReportRow& a = find_row(10, 0.62);
    const ReportRow& bb = find_row(13, 0.62);
    const double iter_spread =
        std::abs(static_cast<double>(a.iterations) - static_cast<double>(bb.iterations)) /
        std::min<double>(static_cast<double>(a.iterations), static_cast<double>(bb.iterations));
    const double dof_ratio = static_cast<double>(bb.dofs) / static_cast<double>(a.dofs);

    pass = ordering_ok && overdamped_fails && iter_spread <= 0.20;
    detail = fmt("V(1,0) 3-level: iterations at omega {0.41,0.52,0.62} = {%lld,%lld,%lld} and "
                 "{%lld,%lld,%lld}, omega 0.84 unconverged at 100 on both meshes; 0.62 counts "
                 "%lld vs %lld (spread %.0f%%, DoF ratio %.2f)",
                 static_cast<long long>(find_row(10, 0.41).iterations),
                 static_cast<long long>(find_row(10, 0.52).iterations),
                 static_cast<long long>(a.iterations),
                 static_cast<long long>(find_row(13, 0.41).iterations),
                 static_cast<long long>(find_row(13, 0.52).iterations),
                 static_cast<long long>(bb.iterations), static_cast<long long>(a.iterations),
                 static_cast<long long>(bb.iterations), 100.0 * iter_spread, dof_ratio);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(5, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// Standalone relaxation study: the multiplicative sweep reaches the residual
// target in strictly fewer sweeps than the partition-of-unity additive one,
// whose explicit operator is measurably nonsymmetric while the unweighted
// additive variant is symmetric to machine precision.
TEST(Acceptance, Criterion6VankaModeContrast) {
  bool pass = false;
  std::string detail;
  try {
    ExperimentConfig config;
    config.mesh_ns = {kIdentityMesh};
    config.vanka_compare_omega = 0.62;
    config.tol = 1e-10;
    config.standalone_maxit = 6000;
    config.output_dir.clear();
    const VankaComparison comp = run_vanka_comparison(config);

    const Bundle b = stokes_bundle(kIdentityMesh);
    const double pou_defect =
        symmetry_defect(relaxation_inverse(b.system, VankaMode::additive_pou));
    const double plain_defect =
        symmetry_defect(relaxation_inverse(b.system, VankaMode::additive_unweighted));

    const bool fewer = comp.history_b.converged &&
                       comp.history_b.iterations < comp.history_a.iterations;
    pass = fewer && pou_defect > 1e-6 && plain_defect < 1e-12;
    detail = fmt("to 1e-10: %s %lld sweeps vs %s %lld%s; symmetry defect additive_pou %.2e "
                 "(> 1e-6), additive_unweighted %.2e (< 1e-12)",
                 comp.label_b.c_str(), static_cast<long long>(comp.history_b.iterations),
                 comp.label_a.c_str(), static_cast<long long>(comp.history_a.iterations),
                 comp.history_a.converged ? "" : " (cap)", pou_defect, plain_defect);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(6, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// The dense two-grid error propagator reproduces the solver's two-level cycle
// action on random errors to 1e-10 relative accuracy, for each sweep split.
TEST(Acceptance, Criterion7PropagatorMatchesCycle) {
  bool pass = false;
  std::string detail;
  try {
    const Bundle b = stokes_bundle(kIdentityMesh);
    const index_t n = b.system.size();
    const double omega = 0.62;

    const MultigridHierarchy hier = build_multigrid(b.system, b.A_p, 2);
    const std::vector<VankaRelaxation> relax =
        build_smoothers(hier, VankaMode::additive_pou, omega);
    const DenseMatrix Mw = scaled(extract_m_inverse(relax[0], n), omega);
    const DenseMatrix P = to_dense(hier.prolongations[0]);
    const DenseMatrix R = to_dense(hier.restrictions[0]);

    const std::vector<double> zero(n, 0.0);
    const std::pair<int, int> splits[] = {{1, 0}, {2, 0}, {2, 2}, {4, 0}};
    double max_rel = 0.0;
    for (const auto& [nu1, nu2] : splits) {
      const DenseMatrix E = assemble_error_propagator(b.system.K, Mw, P, R, nu1, nu2);
      CycleConfig cc;
      cc.nu1 = nu1;
      cc.nu2 = nu2;
      cc.omega = omega;
      cc.levels = 2;
      for (unsigned seed = 0; seed < 20; ++seed) {
        const std::vector<double> e0 = random_error(n, 7000 + seed);
        const std::vector<double> via_cycle = cycle(hier, relax, e0, zero, cc);
        const std::vector<double> via_matrix = dense_apply(E, e0);
        std::vector<double> diff(n);
        for (index_t i = 0; i < n; ++i) diff[i] = via_cycle[i] - via_matrix[i];
        const double denom = std::max(norm2(via_matrix), 1e-14 * norm2(e0));
        max_rel = std::max(max_rel, norm2(diff) / denom);
      }
    }

    pass = max_rel <= 1e-10;
    detail = fmt("4 sweep splits x 20 random errors at n=%lld, max relative action gap = %.3e "
                 "(tol 1e-10)",
                 static_cast<long long>(n), max_rel);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(7, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// Discretization quality: velocity converges at order >= 2.7 and pressure at
// order >= 1.8 across successive refinements, and the discrete velocity is
// divergence-free to solver accuracy.
TEST(Acceptance, Criterion8DiscretizationOrders) {
  bool pass = false;
  std::string detail;
  try {
    const index_t ns[] = {4, 8, 16};
    double err_u[3], err_p[3];
    double max_div = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Bundle b = stokes_bundle(ns[i]);
      const auto errs = discretization_error(b.system, b.mesh, reference_velocity(),
                                             reference_pressure());
      err_u[i] = errs[0];
      err_p[i] = errs[1];
      const LuFactor lu(to_dense(b.system.K));
      const std::vector<double> x = lu.solve(b.system.rhs);
      max_div = std::max(max_div, divergence_residual(b.system, b.mesh, x));
    }

    const double order_u = std::min(std::log2(err_u[0] / err_u[1]),
                                    std::log2(err_u[1] / err_u[2]));
    const double order_p = std::min(std::log2(err_p[0] / err_p[1]),
                                    std::log2(err_p[1] / err_p[2]));

    pass = order_u >= 2.7 && order_p >= 1.8 && max_div <= 1e-9;
    detail = fmt("orders across n={4,8,16}: velocity %.2f (>= 2.7), pressure %.2f (>= 1.8); "
                 "max ||B u|| = %.3e (tol 1e-9)",
                 order_u, order_p, max_div);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(8, pass, detail);
  EXPECT_TRUE(pass) << detail;
}

// Pencil spectra scale linearly in the damping (omega'/omega to 1e-10
// relative after matching), and the undamped partition-of-unity operator has
// genuinely complex eigenvalues.
TEST(Acceptance, Criterion9SpectrumScaling) {
  bool pass = false;
  std::string detail;
  try {
    ExperimentConfig config;
    config.mesh_ns = {kIdentityMesh};
    config.omegas = {0.41, 0.82, 1.0};
    config.vanka_mode = VankaMode::additive_pou;
    config.output_dir.clear();
    const std::vector<SpectrumResult> results = run_spectrum(config);
    if (results.size() != 3) throw Error("expected three spectra");
    for (const SpectrumResult& r : results) {
      if (r.status != "ok") throw Error("spectrum status: " + r.status);
    }

    // Greedy one-to-one nearest matching between the 0.82 spectrum and the
    // 0.41 spectrum scaled by 2.
    const double scale = config.omegas[1] / config.omegas[0];
    const std::vector<std::complex<double>>& coarse = results[0].lambdas;
    const std::vector<std::complex<double>>& fine = results[1].lambdas;
    std::vector<bool> used(fine.size(), false);
    double max_rel = 0.0;
    for (const std::complex<double>& lam : coarse) {
      const std::complex<double> target = scale * lam;
      double best = 1e300;
      std::size_t best_j = fine.size();
      for (std::size_t j = 0; j < fine.size(); ++j) {
        if (used[j]) continue;
        const double d = std::abs(fine[j] - target);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      used[best_j] = true;
      max_rel = std::max(max_rel, best / std::max(std::abs(target), 1e-30));
    }

    double max_imag = 0.0;
    for (const std::complex<double>& lam : results[2].lambdas) {
      max_imag = std::max(max_imag, std::abs(lam.imag()));
    }

    pass = max_rel <= 1e-10 && max_imag > 1e-8;
    detail = fmt("matched %zu eigenvalues, max relative scaling gap (0.41 -> 0.82) = %.3e "
                 "(tol 1e-10); max |Im lambda| at omega=1 is %.3e (> 1e-8)",
                 coarse.size(), max_rel, max_imag);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(9, pass, detail);
  EXPECT_TRUE(pass) << detail;
}
