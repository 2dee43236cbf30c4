#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "amglab/errors.hpp"
#include "amglab/experiments.hpp"
#include "amglab/matrix_market.hpp"
#include "amglab/stokes.hpp"

namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::string config_path;
  std::vector<amglab::index_t> mesh_ns;
  std::vector<double> omegas;
  std::vector<amglab::index_t> n_c_list;
  std::vector<std::string> cycles;
  std::string mode;
  std::string bc;
  std::optional<double> tol;
  std::optional<int> maxit;
  std::optional<int> levels;
  std::optional<int> inner_fgmres;
  std::optional<int> standalone_maxit;
  std::optional<double> vanka_omega;
  std::optional<unsigned> seed;
  std::string output_dir;
  std::optional<double> theta_velocity;
  std::optional<double> theta_pressure;
  std::optional<int> soc_steps;
  std::optional<amglab::index_t> min_coarse;
  std::optional<double> prolongation_omega;
  bool print_config = false;
};

void add_common_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON experiment config file");
  sub->add_option("--mesh-n", o.mesh_ns, "mesh cells per side (repeatable, replaces config list)");
  sub->add_option("--omega", o.omegas, "damping parameter (repeatable, replaces config list)");
  sub->add_option("--nc", o.n_c_list, "requested coarse size for predictions (repeatable)");
  sub->add_option("--cycle", o.cycles, "smoothing counts as nu1,nu2 (repeatable)");
  sub->add_option("--mode", o.mode,
                  "relaxation mode: additive_pou | additive_unweighted | multiplicative | "
                  "multiplicative_symmetrized");
  sub->add_option("--bc", o.bc,
                  "boundary layout: dirichlet_left_bottom_top | all_dirichlet | all_neumann");
  sub->add_option("--tol", o.tol, "relative residual tolerance");
  sub->add_option("--maxit", o.maxit, "iteration cap for cycle solves");
  sub->add_option("--levels", o.levels, "requested hierarchy depth");
  sub->add_option("--inner-fgmres", o.inner_fgmres,
                  "wrap each smoothing phase in this many flexible-GMRES steps (0 = plain)");
  sub->add_option("--standalone-maxit", o.standalone_maxit,
                  "sweep cap for relaxation-only comparisons");
  sub->add_option("--vanka-omega", o.vanka_omega, "damping for relaxation-only comparisons");
  sub->add_option("--seed", o.seed, "seed for random initial errors");
  sub->add_option("--output-dir", o.output_dir, "directory for CSV/SVG/manifest outputs");
  sub->add_option("--theta-velocity", o.theta_velocity, "strength threshold, velocity field");
  sub->add_option("--theta-pressure", o.theta_pressure, "strength threshold, pressure field");
  sub->add_option("--soc-steps", o.soc_steps, "smoothing steps in the strength measure");
  sub->add_option("--min-coarse", o.min_coarse, "stop coarsening below this size");
  sub->add_option("--prolongation-omega", o.prolongation_omega,
                  "fixed prolongation damping (default: 4/(3 rho))");
  sub->add_flag("--print-config", o.print_config, "print the effective config JSON and exit");
}

std::pair<int, int> parse_cycle(const std::string& text) {
  std::string digits;
  for (char c : text)
    if (c != 'V' && c != 'v' && c != '(' && c != ')' && c != ' ') digits.push_back(c);
  const auto comma = digits.find(',');
  if (comma == std::string::npos)
    throw amglab::ConfigError("cycle must look like nu1,nu2 or V(nu1,nu2): " + text);
  return {std::stoi(digits.substr(0, comma)), std::stoi(digits.substr(comma + 1))};
}

amglab::ExperimentConfig resolve(const Overrides& o) {
  amglab::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = amglab::load_experiment_config(o.config_path);
  if (!o.mesh_ns.empty()) cfg.mesh_ns = o.mesh_ns;
  if (!o.omegas.empty()) cfg.omegas = o.omegas;
  if (!o.n_c_list.empty()) cfg.n_c_list = o.n_c_list;
  if (!o.cycles.empty()) {
    cfg.cycles.clear();
    for (const auto& c : o.cycles) cfg.cycles.push_back(parse_cycle(c));
  }
  if (!o.mode.empty()) cfg.vanka_mode = amglab::vanka_mode_from_name(o.mode);
  if (!o.bc.empty()) cfg.bc_layout = amglab::bc_layout_from_name(o.bc);
  if (o.tol) cfg.tol = *o.tol;
  if (o.maxit) cfg.maxit = *o.maxit;
  if (o.levels) cfg.levels = *o.levels;
  if (o.inner_fgmres) cfg.inner_fgmres = *o.inner_fgmres;
  if (o.standalone_maxit) cfg.standalone_maxit = *o.standalone_maxit;
  if (o.vanka_omega) cfg.vanka_compare_omega = *o.vanka_omega;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (cfg.output_dir.empty()) cfg.output_dir = "out";
  if (o.theta_velocity) cfg.hierarchy.theta_velocity = *o.theta_velocity;
  if (o.theta_pressure) cfg.hierarchy.theta_pressure = *o.theta_pressure;
  if (o.soc_steps) cfg.hierarchy.soc_steps = *o.soc_steps;
  if (o.min_coarse) cfg.hierarchy.min_coarse_size = *o.min_coarse;
  if (o.prolongation_omega) cfg.hierarchy.omega_override = *o.prolongation_omega;
  return cfg;
}

// Returns true when the subcommand should stop after printing the config.
bool maybe_print_config(const Overrides& o, const amglab::ExperimentConfig& cfg) {
  if (!o.print_config) return false;
  std::fputs(amglab::experiment_config_json(cfg).c_str(), stdout);
  return true;
}

void run_sweep(const Overrides& o) {
  const amglab::ExperimentConfig cfg = resolve(o);
  if (maybe_print_config(o, cfg)) return;
  const auto rows = amglab::run_omega_sweep(cfg);
  std::printf("%-8s %6s %6s %6s %6s %13s %8s %8s  %s\n", "cycle", "mesh", "omega", "dofs",
              "iters", "residual", "geo", "asym", "status");
  for (const auto& r : rows)
    std::printf("%-8s %6lld %6.2f %6lld %6lld %13.4e %8.4f %8.4f  %s\n", r.cycle_label.c_str(),
                static_cast<long long>(r.mesh_n), r.omega, static_cast<long long>(r.dofs),
                static_cast<long long>(r.iterations), r.final_residual, r.geometric,
                r.asymptotic, r.status.c_str());
  std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "sweep.csv").string().c_str());
}

void run_spectrum_cmd(const Overrides& o) {
  const amglab::ExperimentConfig cfg = resolve(o);
  if (maybe_print_config(o, cfg)) return;
  const auto results = amglab::run_spectrum(cfg);
  for (const auto& s : results) {
    double max_im = 0.0;
    for (const auto& lambda : s.lambdas) max_im = std::max(max_im, std::abs(lambda.imag()));
    std::printf("omega %.2f: %zu eigenvalues, max |Im| %.4e, %s\n", s.omega, s.lambdas.size(),
                max_im, s.status.c_str());
  }
  std::printf("wrote spectrum_omega_*.{csv,svg} under %s\n", cfg.output_dir.c_str());
}

void run_theory_cmd(const Overrides& o) {
  const amglab::ExperimentConfig cfg = resolve(o);
  if (maybe_print_config(o, cfg)) return;
  const auto rows = amglab::run_theory_comparison(cfg);
  std::printf("%6s %6s %8s %8s %10s %10s %10s %10s  %s\n", "omega", "n", "nc_req", "nc_eff",
              "predicted", "geo", "asym", "gap", "status");
  for (const auto& r : rows)
    std::printf("%6.2f %6lld %8lld %8lld %10.6f %10.6f %10.6f %10.6f  %s\n", r.omega,
                static_cast<long long>(r.n), static_cast<long long>(r.n_c_requested),
                static_cast<long long>(r.n_c_eff), r.predicted, r.measured_geometric,
                r.measured_asymptotic, r.gap, r.status.c_str());
  std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "theory.csv").string().c_str());
}

void run_vanka_compare(const Overrides& o, const std::string& mode_a, const std::string& mode_b) {
  amglab::ExperimentConfig cfg = resolve(o);
  if (maybe_print_config(o, cfg)) return;
  const auto cmp = amglab::run_vanka_comparison(cfg, amglab::vanka_mode_from_name(mode_a),
                                                amglab::vanka_mode_from_name(mode_b));
  const auto describe = [](const std::string& label, const amglab::IterationLog& log) {
    std::printf("%-26s %6lld sweeps, final residual %.4e, %s\n", label.c_str(),
                static_cast<long long>(log.iterations), log.residual_norms.back(),
                log.converged ? "converged" : "not converged");
  };
  describe(cmp.label_a, cmp.history_a);
  describe(cmp.label_b, cmp.history_b);
  std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "vanka_compare.csv").string().c_str());
}

void write_vector_market(const std::vector<double>& v, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw amglab::Error("cannot open " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
}

void run_export(const Overrides& o, const std::string& format, const std::string& prefix) {
  const amglab::ExperimentConfig cfg = resolve(o);
  if (maybe_print_config(o, cfg)) return;
  if (format != "matrix-market")
    throw amglab::ConfigError("export-system: unsupported format " + format);

  const amglab::index_t n = cfg.mesh_ns.front();
  const amglab::TriMesh mesh = amglab::build_structured_mesh(n, cfg.bc_layout);
  const amglab::StokesSystem system = amglab::assemble_stokes(
      mesh, amglab::zero_field(), amglab::reference_forcing(), amglab::reference_neumann());
  const amglab::SparseMatrix A_p = amglab::assemble_pressure_laplacian(mesh);

  fs::create_directories(cfg.output_dir);
  const auto path_of = [&](const std::string& stem) {
    return (fs::path(cfg.output_dir) / (prefix + "_" + stem)).string();
  };
  amglab::write_matrix_market(system.K, path_of("K.mtx"));
  amglab::write_matrix_market(A_p, path_of("Ap.mtx"));
  write_vector_market(system.rhs, path_of("rhs.mtx"));

  nlohmann::json side;
  side["mesh"] = {{"n", n},
                  {"vertices", mesh.vertices.size()},
                  {"triangles", mesh.triangles.size()},
                  {"bc_layout", amglab::bc_layout_name(cfg.bc_layout)}};
  side["dofs"] = {{"total", system.size()},
                  {"velocity", system.n_velocity()},
                  {"pressure", system.n_pressure()},
                  {"eliminated_dirichlet", system.eliminated_dirichlet.size()}};
  side["block_offsets"] = {0, system.n_velocity() / 2, system.n_velocity(), system.size()};
  nlohmann::json tags = nlohmann::json::array();
  for (const auto& e : mesh.boundary_edges)
    tags.push_back({{"v0", e.v0},
                    {"v1", e.v1},
                    {"tag", e.tag == amglab::BoundaryTag::dirichlet ? "dirichlet" : "neumann"}});
  side["boundary_edges"] = tags;
  side["files"] = {{"K", prefix + "_K.mtx"},
                   {"pressure_laplacian", prefix + "_Ap.mtx"},
                   {"rhs", prefix + "_rhs.mtx"}};

  std::ofstream out(path_of("system.json"), std::ios::binary);
  if (!out) throw amglab::Error("cannot open system sidecar for writing");
  out << side.dump(2) << "\n";
  std::printf("wrote %s, %s, %s, %s\n", path_of("K.mtx").c_str(), path_of("Ap.mtx").c_str(),
              path_of("rhs.mtx").c_str(), path_of("system.json").c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monolithic smoothed-aggregation multigrid laboratory for Stokes systems"};
  app.require_subcommand(1);

  Overrides sweep_o, spectrum_o, theory_o, vanka_o, export_o;

  CLI::App* sweep = app.add_subcommand("sweep", "damping sweep over cycles and meshes");
  add_common_options(sweep, sweep_o);

  CLI::App* spectrum = app.add_subcommand("spectrum", "dense pencil spectra per damping value");
  add_common_options(spectrum, spectrum_o);

  CLI::App* theory =
      app.add_subcommand("theory", "measured two-grid factors vs spectral prediction");
  add_common_options(theory, theory_o);

  CLI::App* vanka =
      app.add_subcommand("vanka-compare", "relaxation-only residual histories, two modes");
  add_common_options(vanka, vanka_o);
  std::string mode_a = "additive_pou";
  std::string mode_b = "multiplicative";
  vanka->add_option("--mode-a", mode_a, "first relaxation mode");
  vanka->add_option("--mode-b", mode_b, "second relaxation mode");

  CLI::App* exporter =
      app.add_subcommand("export-system", "write the assembled system to disk");
  add_common_options(exporter, export_o);
  std::string format = "matrix-market";
  std::string prefix = "stokes";
  exporter->add_option("--format", format, "output format (matrix-market)");
  exporter->add_option("--prefix", prefix, "file name prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) run_sweep(sweep_o);
    if (spectrum->parsed()) run_spectrum_cmd(spectrum_o);
    if (theory->parsed()) run_theory_cmd(theory_o);
    if (vanka->parsed()) run_vanka_compare(vanka_o, mode_a, mode_b);
    if (exporter->parsed()) run_export(export_o, format, prefix);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
