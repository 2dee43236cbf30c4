#include "amglab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

#include "amglab/csv.hpp"
#include "amglab/dense_linalg.hpp"
#include "amglab/errors.hpp"
#include "amglab/stokes.hpp"
#include "amglab/svg.hpp"
#include "amglab/theory.hpp"

namespace amglab {

std::string bc_layout_name(BcLayout layout) {
  switch (layout) {
    case BcLayout::dirichlet_left_bottom_top: return "dirichlet_left_bottom_top";
    case BcLayout::all_dirichlet: return "all_dirichlet";
    case BcLayout::all_neumann: return "all_neumann";
  }
  return "unknown";
}

BcLayout bc_layout_from_name(const std::string& name) {
  if (name == "dirichlet_left_bottom_top") return BcLayout::dirichlet_left_bottom_top;
  if (name == "all_dirichlet") return BcLayout::all_dirichlet;
  if (name == "all_neumann") return BcLayout::all_neumann;
  throw ConfigError("unknown bc_layout: " + name);
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cycle_label_of(int nu1, int nu2) {
  return "V(" + std::to_string(nu1) + "," + std::to_string(nu2) + ")";
}

std::string format_omega(double omega) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", omega);
  return buf;
}

json hierarchy_to_json(const HierarchyParams& p) {
  json j;
  j["soc_steps"] = p.soc_steps;
  j["theta_velocity"] = p.theta_velocity;
  j["theta_pressure"] = p.theta_pressure;
  j["min_coarse_size"] = p.min_coarse_size;
  if (p.omega_override)
    j["omega_override"] = *p.omega_override;
  else
    j["omega_override"] = nullptr;
  return j;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["mesh_ns"] = c.mesh_ns;
  j["bc_layout"] = bc_layout_name(c.bc_layout);
  j["omegas"] = c.omegas;
  json cycles = json::array();
  for (const auto& [nu1, nu2] : c.cycles) cycles.push_back({nu1, nu2});
  j["cycles"] = cycles;
  j["vanka_mode"] = vanka_mode_name(c.vanka_mode);
  j["n_c_list"] = c.n_c_list;
  j["tol"] = c.tol;
  j["maxit"] = c.maxit;
  j["levels"] = c.levels;
  j["inner_fgmres"] = c.inner_fgmres;
  j["standalone_maxit"] = c.standalone_maxit;
  j["vanka_compare_omega"] = c.vanka_compare_omega;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["hierarchy"] = hierarchy_to_json(c.hierarchy);
  return j;
}

void validate_config(const ExperimentConfig& c) {
  if (c.omegas.empty()) throw ConfigError("experiment config: omegas must be nonempty");
  if (c.mesh_ns.empty()) throw ConfigError("experiment config: mesh_ns must be nonempty");
  if (c.tol <= 0.0) throw ConfigError("experiment config: tol must be positive");
  if (c.maxit < 1) throw ConfigError("experiment config: maxit must be >= 1");
  if (c.levels < 2) throw ConfigError("experiment config: levels must be >= 2");
}

void ensure_output_dir(const ExperimentConfig& c) {
  if (!c.output_dir.empty()) fs::create_directories(c.output_dir);
}

std::string out_path(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.output_dir) / name).string();
}

// Run manifest: parameter echo plus a timestamp. CSV outputs stay
// timestamp-free so identical configs produce byte-identical tables.
void write_manifest(const ExperimentConfig& c, const std::string& operation, json extra) {
  if (c.output_dir.empty()) return;
  json m;
  m["operation"] = operation;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  m["timestamp"] = stamp;
  m["config"] = config_to_json(c);
  for (auto& [key, value] : extra.items()) m[key] = value;
  std::ofstream out(out_path(c, "manifest_" + operation + ".json"), std::ios::binary);
  if (!out) throw Error("write_manifest: cannot open manifest file");
  out << m.dump(2) << "\n";
}

struct BuiltSystem {
  TriMesh mesh;
  StokesSystem system;
  SparseMatrix A_p;
};

// The reference problem: manufactured forcing, homogeneous Dirichlet data,
// natural data on the Neumann segment.
BuiltSystem build_reference_system(index_t mesh_n, BcLayout layout) {
  BuiltSystem built;
  built.mesh = build_structured_mesh(mesh_n, layout);
  built.system =
      assemble_stokes(built.mesh, zero_field(), reference_forcing(), reference_neumann());
  built.A_p = assemble_pressure_laplacian(built.mesh);
  return built;
}

std::vector<double> seeded_random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::pair<double, double> safe_factors(const IterationLog& log) {
  try {
    return convergence_factors(log);
  } catch (const Error&) {
    return {kNaN, kNaN};
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_experiment_config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("load_experiment_config: " + std::string(e.what()));
  }

  ExperimentConfig c;
  if (j.contains("mesh_ns")) c.mesh_ns = j["mesh_ns"].get<std::vector<index_t>>();
  if (j.contains("bc_layout")) c.bc_layout = bc_layout_from_name(j["bc_layout"].get<std::string>());
  if (j.contains("omegas")) c.omegas = j["omegas"].get<std::vector<double>>();
  if (j.contains("cycles")) {
    c.cycles.clear();
    for (const auto& pair : j["cycles"]) {
      if (!pair.is_array() || pair.size() != 2)
        throw ConfigError("load_experiment_config: cycles entries must be [nu1, nu2]");
      c.cycles.emplace_back(pair[0].get<int>(), pair[1].get<int>());
    }
  }
  if (j.contains("vanka_mode")) c.vanka_mode = vanka_mode_from_name(j["vanka_mode"].get<std::string>());
  if (j.contains("n_c_list")) c.n_c_list = j["n_c_list"].get<std::vector<index_t>>();
  if (j.contains("tol")) c.tol = j["tol"].get<double>();
  if (j.contains("maxit")) c.maxit = j["maxit"].get<int>();
  if (j.contains("levels")) c.levels = j["levels"].get<int>();
  if (j.contains("inner_fgmres")) c.inner_fgmres = j["inner_fgmres"].get<int>();
  if (j.contains("standalone_maxit")) c.standalone_maxit = j["standalone_maxit"].get<int>();
  if (j.contains("vanka_compare_omega"))
    c.vanka_compare_omega = j["vanka_compare_omega"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("hierarchy")) {
    const json& h = j["hierarchy"];
    if (h.contains("soc_steps")) c.hierarchy.soc_steps = h["soc_steps"].get<int>();
    if (h.contains("theta_velocity")) c.hierarchy.theta_velocity = h["theta_velocity"].get<double>();
    if (h.contains("theta_pressure")) c.hierarchy.theta_pressure = h["theta_pressure"].get<double>();
    if (h.contains("min_coarse_size"))
      c.hierarchy.min_coarse_size = h["min_coarse_size"].get<index_t>();
    if (h.contains("omega_override") && !h["omega_override"].is_null())
      c.hierarchy.omega_override = h["omega_override"].get<double>();
  }
  validate_config(c);
  return c;
}

std::string experiment_config_json(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

std::vector<ReportRow> run_omega_sweep(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<ReportRow> rows;

  for (const index_t mesh_n : config.mesh_ns) {
    const BuiltSystem built = build_reference_system(mesh_n, config.bc_layout);
    const MultigridHierarchy hierarchy =
        build_multigrid(built.system, built.A_p, config.levels, config.hierarchy);

    // Sweep points share the immutable system and hierarchy; each point
    // builds its own smoother stack so runs are independent. Row order is
    // fixed by index, not completion order.
    const std::size_t n_points = config.cycles.size() * config.omegas.size();
    std::vector<ReportRow> mesh_rows(n_points);
    const auto run_point = [&](std::size_t point) {
      const std::size_t cycle_idx = point / config.omegas.size();
      const std::size_t omega_idx = point % config.omegas.size();
      const auto [nu1, nu2] = config.cycles[cycle_idx];
      const double omega = config.omegas[omega_idx];
      ReportRow row;
      row.cycle_label = cycle_label_of(nu1, nu2);
      row.mesh_n = mesh_n;
      row.omega = omega;
      row.dofs = built.system.size();
      row.mode = vanka_mode_name(config.vanka_mode);
      row.predicted = kNaN;
      try {
        const std::vector<VankaRelaxation> smoothers =
            build_smoothers(hierarchy, config.vanka_mode, omega);
        const CycleConfig cc{nu1, nu2, omega, config.inner_fgmres, config.levels};
        const IterationLog log = stationary_solve(hierarchy, smoothers, built.system.rhs, cc,
                                                  config.tol, config.maxit);
        row.iterations = log.iterations;
        row.final_residual = log.residual_norms.back();
        row.converged = log.converged;
        const auto [geo, asym] = safe_factors(log);
        row.geometric = geo;
        row.asymptotic = asym;
        row.status = log.converged ? "ok" : std::to_string(config.maxit) + "*";
      } catch (const Error& e) {
        row.iterations = 0;
        row.final_residual = kNaN;
        row.geometric = kNaN;
        row.asymptotic = kNaN;
        row.converged = false;
        row.status = std::string("error: ") + e.what();
      }
      mesh_rows[point] = std::move(row);
    };

    std::vector<std::future<void>> futures;
    futures.reserve(n_points);
    for (std::size_t point = 0; point < n_points; ++point)
      futures.push_back(std::async(std::launch::async, run_point, point));
    for (auto& f : futures) f.get();

    rows.insert(rows.end(), std::make_move_iterator(mesh_rows.begin()),
                std::make_move_iterator(mesh_rows.end()));
  }

  if (!config.output_dir.empty()) {
    ensure_output_dir(config);
    CsvWriter csv({"cycle", "mesh_n", "omega", "dofs", "iterations", "final_residual",
                   "geometric_factor", "asymptotic_factor", "predicted", "mode", "converged",
                   "status"});
    for (const auto& r : rows)
      csv.add_row({r.cycle_label, std::to_string(r.mesh_n), CsvWriter::num(r.omega),
                   std::to_string(r.dofs), std::to_string(r.iterations),
                   CsvWriter::num(r.final_residual), CsvWriter::num(r.geometric),
                   CsvWriter::num(r.asymptotic), CsvWriter::num(r.predicted), r.mode,
                   r.converged ? "1" : "0", r.status});
    csv.write(out_path(config, "sweep.csv"));
    write_manifest(config, "sweep", {{"rows", rows.size()}});
  }
  return rows;
}

std::vector<SpectrumResult> run_spectrum(const ExperimentConfig& config) {
  validate_config(config);
  const BuiltSystem built = build_reference_system(config.mesh_ns.front(), config.bc_layout);
  const index_t n = built.system.size();
  if (n > 2500)
    throw ConfigError("run_spectrum: system too large for dense eigensolve (n = " +
                      std::to_string(n) + " > 2500)");

  const DofPartition partition{built.system.n_velocity(), built.system.n_pressure()};
  const VankaRelaxation relax = build_vanka(built.system.K, partition, config.vanka_mode, 1.0);
  const DenseMatrix m_inv = extract_m_inverse(relax, n);
  const DenseMatrix k_dense = to_dense(built.system.K);

  std::vector<SpectrumResult> results;
  for (const double omega : config.omegas) {
    SpectrumResult result;
    result.omega = omega;
    try {
      // M_omega = M / omega, so the iteration matrix is omega * M^-1 K;
      // each omega gets its own eigensolve (the scaling law is a test
      // subject, not an assumption).
      DenseMatrix C = dense_multiply(m_inv, k_dense);
      for (double& v : C.values) v *= omega;
      const EigenDecomposition eig = dense_eig(C);
      result.lambdas = eig.values;
      result.status = "ok";
    } catch (const Error& e) {
      result.status = std::string("error: ") + e.what();
    }
    results.push_back(std::move(result));
  }

  if (!config.output_dir.empty()) {
    ensure_output_dir(config);
    for (const auto& result : results) {
      const std::string tag = "spectrum_omega_" + format_omega(result.omega);
      CsvWriter csv({"omega", "re", "im"});
      for (const auto& lambda : result.lambdas)
        csv.add_row({CsvWriter::num(result.omega), CsvWriter::num(lambda.real()),
                     CsvWriter::num(lambda.imag())});
      csv.write(out_path(config, tag + ".csv"));

      SvgSeries pts;
      pts.label = "omega = " + format_omega(result.omega);
      pts.points_only = true;
      for (const auto& lambda : result.lambdas) {
        pts.x.push_back(lambda.real());
        pts.y.push_back(lambda.imag());
      }
      SvgPlotOptions opts;
      opts.title = "Pencil spectrum, omega = " + format_omega(result.omega);
      opts.x_label = "Re(lambda)";
      opts.y_label = "Im(lambda)";
      write_plot(out_path(config, tag + ".svg"), {pts}, opts);
    }
    write_manifest(config, "spectrum",
                   {{"dofs", n}, {"omegas", config.omegas.size()}});
  }
  return results;
}

std::vector<TheoryRow> run_theory_comparison(const ExperimentConfig& config) {
  validate_config(config);
  const BuiltSystem built = build_reference_system(config.mesh_ns.front(), config.bc_layout);
  const index_t n = built.system.size();

  // Two-grid by construction: the theory identity addresses E_TG.
  const MultigridHierarchy hierarchy =
      build_multigrid(built.system, built.A_p, 2, config.hierarchy);
  std::vector<VankaRelaxation> smoothers = build_smoothers(hierarchy, config.vanka_mode, 1.0);
  const index_t sa_coarse = hierarchy.operators[1].nrows;
  const DenseMatrix m_inv = extract_m_inverse(smoothers[0], n);
  const std::vector<double> x0 = seeded_random_vector(static_cast<std::size_t>(n), config.seed);
  const std::vector<double> zero_rhs(static_cast<std::size_t>(n), 0.0);

  std::vector<TheoryRow> rows;
  for (const double omega : config.omegas) {
    TheoryRow base;
    base.omega = omega;
    base.n = n;
    base.mode = vanka_mode_name(config.vanka_mode);
    try {
      for (auto& s : smoothers) s.omega = omega;
      const CycleConfig cc{1, 0, omega, 0, 2};
      const IterationLog log =
          stationary_solve(hierarchy, smoothers, zero_rhs, cc, config.tol, config.maxit, x0);
      const auto [geo, asym] = safe_factors(log);

      DenseMatrix m_inv_omega = m_inv;
      for (double& v : m_inv_omega.values) v *= omega;
      const PencilDecomposition decomp = pencil_eigendecomposition(built.system.K, m_inv_omega);

      const OptimalOperators at_sa = optimal_operators(decomp, sa_coarse);
      base.n_c_requested = sa_coarse;
      base.n_c_eff = at_sa.n_c_eff;
      base.predicted = predicted_factor(decomp, sa_coarse);
      base.measured_geometric = geo;
      base.measured_asymptotic = asym;
      base.gap = base.predicted - asym;
      base.status = log.converged ? "ok" : "not_converged";
      rows.push_back(base);

      for (const index_t n_c : config.n_c_list) {
        TheoryRow extra = base;
        const OptimalOperators ops = optimal_operators(decomp, n_c);
        extra.n_c_requested = n_c;
        extra.n_c_eff = ops.n_c_eff;
        extra.predicted = predicted_factor(decomp, n_c);
        extra.measured_geometric = kNaN;
        extra.measured_asymptotic = kNaN;
        extra.gap = kNaN;
        extra.status = "prediction_only";
        rows.push_back(extra);
      }
    } catch (const Error& e) {
      base.predicted = kNaN;
      base.measured_geometric = kNaN;
      base.measured_asymptotic = kNaN;
      base.gap = kNaN;
      base.status = std::string("error: ") + e.what();
      rows.push_back(base);
    }
  }

  if (!config.output_dir.empty()) {
    ensure_output_dir(config);
    CsvWriter csv({"cycle", "omega", "n", "n_c_requested", "n_c_eff", "predicted",
                   "measured_geometric", "measured_asymptotic", "gap", "mode", "status"});
    for (const auto& r : rows)
      csv.add_row({"V(1,0)", CsvWriter::num(r.omega), std::to_string(r.n),
                   std::to_string(r.n_c_requested), std::to_string(r.n_c_eff),
                   CsvWriter::num(r.predicted), CsvWriter::num(r.measured_geometric),
                   CsvWriter::num(r.measured_asymptotic), CsvWriter::num(r.gap), r.mode,
                   r.status});
    csv.write(out_path(config, "theory.csv"));

    SvgSeries geo_series, asym_series, pred_series;
    geo_series.label = "measured geometric";
    asym_series.label = "measured asymptotic";
    pred_series.label = "predicted at SA size";
    for (const auto& r : rows) {
      if (r.status == "prediction_only") continue;
      if (std::isfinite(r.measured_geometric)) {
        geo_series.x.push_back(r.omega);
        geo_series.y.push_back(r.measured_geometric);
      }
      if (std::isfinite(r.measured_asymptotic)) {
        asym_series.x.push_back(r.omega);
        asym_series.y.push_back(r.measured_asymptotic);
      }
      if (std::isfinite(r.predicted)) {
        pred_series.x.push_back(r.omega);
        pred_series.y.push_back(r.predicted);
      }
    }
    SvgPlotOptions opts;
    opts.title = "Two-grid factors: measured vs predicted";
    opts.x_label = "omega";
    opts.y_label = "convergence factor";
    write_plot(out_path(config, "theory.svg"), {geo_series, asym_series, pred_series}, opts);
    write_manifest(config, "theory", {{"sa_coarse_size", sa_coarse}});
  }
  return rows;
}

VankaComparison run_vanka_comparison(const ExperimentConfig& config, VankaMode mode_a,
                                     VankaMode mode_b) {
  validate_config(config);
  const BuiltSystem built = build_reference_system(config.mesh_ns.front(), config.bc_layout);
  const SparseMatrix& K = built.system.K;
  const std::vector<double>& b = built.system.rhs;
  const DofPartition partition{built.system.n_velocity(), built.system.n_pressure()};

  const auto run_mode = [&](VankaMode mode) {
    const VankaRelaxation relax = build_vanka(K, partition, mode, config.vanka_compare_omega);
    IterationLog log;
    std::vector<double> x(b.size(), 0.0);
    std::vector<double> r = b;  // x0 = 0
    double rn = norm2(r);
    const double r0 = rn;
    log.residual_norms.push_back(rn);
    for (int it = 0; it < config.standalone_maxit; ++it) {
      x = apply_relaxation(relax, x, b);
      std::vector<double> kx = spmv(K, x);
      for (std::size_t i = 0; i < kx.size(); ++i) kx[i] = b[i] - kx[i];
      rn = norm2(kx);
      log.residual_norms.push_back(rn);
      log.iterations = it + 1;
      if (rn <= config.tol * r0) {
        log.converged = true;
        break;
      }
      if (!std::isfinite(rn)) break;
    }
    return log;
  };

  VankaComparison cmp;
  cmp.label_a = vanka_mode_name(mode_a);
  cmp.label_b = vanka_mode_name(mode_b);
  cmp.history_a = run_mode(mode_a);
  cmp.history_b = run_mode(mode_b);

  if (!config.output_dir.empty()) {
    ensure_output_dir(config);
    CsvWriter csv(
        {"iteration", "omega", "residual_" + cmp.label_a, "residual_" + cmp.label_b});
    const std::size_t rows_n =
        std::max(cmp.history_a.residual_norms.size(), cmp.history_b.residual_norms.size());
    for (std::size_t i = 0; i < rows_n; ++i) {
      const std::string ra = i < cmp.history_a.residual_norms.size()
                                 ? CsvWriter::num(cmp.history_a.residual_norms[i])
                                 : "";
      const std::string rb = i < cmp.history_b.residual_norms.size()
                                 ? CsvWriter::num(cmp.history_b.residual_norms[i])
                                 : "";
      csv.add_row({std::to_string(i), CsvWriter::num(config.vanka_compare_omega), ra, rb});
    }
    csv.write(out_path(config, "vanka_compare.csv"));

    const auto to_series = [](const IterationLog& log, const std::string& label) {
      SvgSeries s;
      s.label = label;
      for (std::size_t i = 0; i < log.residual_norms.size(); ++i) {
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(log.residual_norms[i]);
      }
      return s;
    };
    SvgPlotOptions opts;
    opts.title = "Relaxation-only residual histories";
    opts.x_label = "sweep";
    opts.y_label = "residual 2-norm";
    opts.log_y = true;
    write_plot(out_path(config, "vanka_compare.svg"),
               {to_series(cmp.history_a, cmp.label_a), to_series(cmp.history_b, cmp.label_b)},
               opts);
    write_manifest(config, "vanka_compare",
                   {{"omega", config.vanka_compare_omega},
                    {"mode_a", cmp.label_a},
                    {"mode_b", cmp.label_b}});
  }
  return cmp;
}

}  // namespace amglab
