#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "amglab/hierarchy.hpp"
#include "amglab/mesh.hpp"
#include "amglab/solver.hpp"
#include "amglab/vanka.hpp"

namespace amglab {

// One experiment run: which systems to build, which cycles and dampings to
// drive, and where outputs land. Loadable from JSON; every run echoes its
// configuration into a manifest next to the CSV/SVG outputs.
struct ExperimentConfig {
  std::vector<index_t> mesh_ns = {10, 13};
  BcLayout bc_layout = BcLayout::dirichlet_left_bottom_top;
  std::vector<double> omegas = {0.30, 0.41, 0.52, 0.62, 0.73, 0.84};
  std::vector<std::pair<int, int>> cycles = {{1, 0}, {2, 0}, {2, 2}, {4, 0}};
  VankaMode vanka_mode = VankaMode::additive_pou;
  std::vector<index_t> n_c_list;
  double tol = 1e-10;
  int maxit = 100;
  int levels = 3;
  int inner_fgmres = 0;
  int standalone_maxit = 2000;        // cap for relaxation-only comparisons
  double vanka_compare_omega = 0.62;  // damping for the relaxation-only study
  unsigned seed = 1234;
  std::string output_dir;  // empty: compute only, write nothing
  HierarchyParams hierarchy;
};

ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_json(const ExperimentConfig& config);

std::string bc_layout_name(BcLayout layout);
BcLayout bc_layout_from_name(const std::string& name);

struct ReportRow {
  std::string cycle_label;  // e.g. "V(1,0)"
  index_t mesh_n = 0;
  double omega = 0.0;
  index_t dofs = 0;
  index_t iterations = 0;
  double final_residual = 0.0;
  double geometric = 0.0;   // NaN when not measurable
  double asymptotic = 0.0;  // NaN when not measurable
  double predicted = 0.0;   // NaN unless a two-grid prediction applies
  std::string mode;         // relaxation mode, for row provenance
  bool converged = false;
  std::string status;  // "ok", "100*"-style cap marker, or an error note
};

// Table-style damping sweep: every (mesh, cycle, omega) combination becomes
// one row; failures are flagged rows, never aborts. Writes sweep.csv and a
// manifest when output_dir is set.
std::vector<ReportRow> run_omega_sweep(const ExperimentConfig& config);

struct SpectrumResult {
  double omega = 0.0;
  std::vector<std::complex<double>> lambdas;
  std::string status;  // "ok" or the per-omega failure note
};

// Pencil spectrum of (K, M_omega) per omega, each computed independently.
// Writes one CSV and scatter SVG per omega when output_dir is set.
std::vector<SpectrumResult> run_spectrum(const ExperimentConfig& config);

struct TheoryRow {
  double omega = 0.0;
  index_t n = 0;
  index_t n_c_requested = 0;
  index_t n_c_eff = 0;
  double predicted = 0.0;
  double measured_geometric = 0.0;   // NaN on prediction-only rows
  double measured_asymptotic = 0.0;  // NaN on prediction-only rows
  double gap = 0.0;                  // predicted - measured_asymptotic
  std::string mode;
  std::string status;
};

// Two-grid factor study: per omega, the measured factors of the actual
// SA-AMG two-grid cycle (error-decay run, seeded random initial error)
// against the predicted factor at the SA coarse size and at each n_c in
// n_c_list. Writes theory.csv and a line plot when output_dir is set.
std::vector<TheoryRow> run_theory_comparison(const ExperimentConfig& config);

struct VankaComparison {
  std::string label_a, label_b;
  IterationLog history_a, history_b;
};

// Standalone relaxation-only iteration histories on K x = b for two modes
// (same system, x0 and damping). Writes vanka_compare.csv and an overlay SVG
// when output_dir is set.
VankaComparison run_vanka_comparison(const ExperimentConfig& config,
                                     VankaMode mode_a = VankaMode::additive_pou,
                                     VankaMode mode_b = VankaMode::multiplicative);

}  // namespace amglab
