#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "amglab/csv.hpp"
#include "amglab/errors.hpp"
#include "amglab/experiments.hpp"
#include "amglab/svg.hpp"

namespace {

using namespace amglab;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.is_open()) << path;
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path write_temp_json(const std::string& name, const std::string& body) {
  const fs::path path = fs::path(::testing::TempDir()) / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

// Small, fast configuration: one tiny mesh, two-level hierarchy.
ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.mesh_ns = {2};
  config.omegas = {0.62};
  config.cycles = {{1, 0}};
  config.tol = 1e-8;
  config.maxit = 100;
  config.levels = 2;
  config.output_dir.clear();
  return config;
}

TEST(Config, DefaultsSurviveJsonRoundTrip) {
  const ExperimentConfig defaults;
  const fs::path path = write_temp_json("roundtrip.json", experiment_config_json(defaults));
  const ExperimentConfig loaded = load_experiment_config(path.string());
  EXPECT_EQ(loaded.mesh_ns, defaults.mesh_ns);
  EXPECT_EQ(loaded.omegas, defaults.omegas);
  EXPECT_EQ(loaded.cycles, defaults.cycles);
  EXPECT_EQ(loaded.vanka_mode, defaults.vanka_mode);
  EXPECT_EQ(loaded.tol, defaults.tol);
  EXPECT_EQ(loaded.maxit, defaults.maxit);
  EXPECT_EQ(loaded.levels, defaults.levels);
  EXPECT_EQ(loaded.seed, defaults.seed);
  EXPECT_EQ(loaded.hierarchy.theta_velocity, defaults.hierarchy.theta_velocity);
  EXPECT_EQ(loaded.hierarchy.theta_pressure, defaults.hierarchy.theta_pressure);
  EXPECT_EQ(loaded.hierarchy.min_coarse_size, defaults.hierarchy.min_coarse_size);
  fs::remove(path);
}

TEST(Config, EmptyObjectYieldsDefaults) {
  const fs::path path = write_temp_json("empty.json", "{}");
  const ExperimentConfig loaded = load_experiment_config(path.string());
  const ExperimentConfig defaults;
  EXPECT_EQ(loaded.mesh_ns, defaults.mesh_ns);
  EXPECT_EQ(loaded.omegas, defaults.omegas);
  EXPECT_EQ(loaded.standalone_maxit, defaults.standalone_maxit);
  fs::remove(path);
}

TEST(Config, SelectedKeysOverrideDefaults) {
  const fs::path path = write_temp_json(
      "partial.json",
      R"({"mesh_ns": [4], "omegas": [0.5], "cycles": [[2, 1]], "vanka_mode": "multiplicative",
          "levels": 4, "hierarchy": {"theta_velocity": 2.5, "omega_override": 0.0}})");
  const ExperimentConfig loaded = load_experiment_config(path.string());
  EXPECT_EQ(loaded.mesh_ns, (std::vector<index_t>{4}));
  EXPECT_EQ(loaded.omegas, (std::vector<double>{0.5}));
  ASSERT_EQ(loaded.cycles.size(), 1u);
  EXPECT_EQ(loaded.cycles[0], (std::pair<int, int>{2, 1}));
  EXPECT_EQ(loaded.vanka_mode, VankaMode::multiplicative);
  EXPECT_EQ(loaded.levels, 4);
  EXPECT_EQ(loaded.hierarchy.theta_velocity, 2.5);
  ASSERT_TRUE(loaded.hierarchy.omega_override.has_value());
  EXPECT_EQ(*loaded.hierarchy.omega_override, 0.0);
  fs::remove(path);
}

TEST(Config, InvalidValuesRejected) {
  for (const char* body : {
           R"({"omegas": []})",
           R"({"mesh_ns": []})",
           R"({"tol": 0.0})",
           R"({"maxit": 0})",
           R"({"levels": 1})",
           R"({"bc_layout": "sideways"})",
           R"({"vanka_mode": "jacobi"})",
       }) {
    const fs::path path = write_temp_json("bad.json", body);
    EXPECT_THROW(load_experiment_config(path.string()), ConfigError) << body;
    fs::remove(path);
  }
}

TEST(Config, MissingFileThrows) {
  EXPECT_THROW(load_experiment_config("/nonexistent/nowhere.json"), Error);
}

TEST(Config, BcLayoutNamesRoundTrip) {
  for (BcLayout layout : {BcLayout::dirichlet_left_bottom_top, BcLayout::all_dirichlet,
                          BcLayout::all_neumann}) {
    EXPECT_EQ(bc_layout_from_name(bc_layout_name(layout)), layout);
  }
  EXPECT_THROW(bc_layout_from_name("mystery"), ConfigError);
}

TEST(OmegaSweep, SingletonConfigProducesOneCompleteRow) {
  const ExperimentConfig config = tiny_config();
  const std::vector<ReportRow> rows = run_omega_sweep(config);
  ASSERT_EQ(rows.size(), 1u);
  const ReportRow& row = rows[0];
  EXPECT_EQ(row.cycle_label, "V(1,0)");
  EXPECT_EQ(row.mesh_n, 2);
  EXPECT_EQ(row.omega, 0.62);
  EXPECT_EQ(row.dofs, 33);
  EXPECT_EQ(row.mode, "additive_pou");
  EXPECT_TRUE(row.converged) << row.status;
  EXPECT_EQ(row.status, "ok");
  EXPECT_GT(row.iterations, 0);
  EXPECT_TRUE(std::isfinite(row.geometric));
  EXPECT_TRUE(std::isfinite(row.asymptotic));
  EXPECT_LT(row.asymptotic, 1.0);
}

TEST(OmegaSweep, GridOrdersRowsByCycleThenMeshThenOmega) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.41, 0.62};
  config.cycles = {{1, 0}, {2, 0}};
  config.maxit = 30;
  const std::vector<ReportRow> rows = run_omega_sweep(config);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].cycle_label, "V(1,0)");
  EXPECT_EQ(rows[0].omega, 0.41);
  EXPECT_EQ(rows[1].cycle_label, "V(1,0)");
  EXPECT_EQ(rows[1].omega, 0.62);
  EXPECT_EQ(rows[2].cycle_label, "V(2,0)");
  EXPECT_EQ(rows[3].cycle_label, "V(2,0)");
}

TEST(OmegaSweep, OutputIsByteDeterministicAcrossRuns) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.41, 0.62};
  config.cycles = {{1, 0}, {2, 0}};
  config.maxit = 30;

  const fs::path dir_a = fs::path(::testing::TempDir()) / "sweep_run_a";
  const fs::path dir_b = fs::path(::testing::TempDir()) / "sweep_run_b";
  config.output_dir = dir_a.string();
  run_omega_sweep(config);
  config.output_dir = dir_b.string();
  run_omega_sweep(config);

  const std::string csv_a = read_file(dir_a / "sweep.csv");
  const std::string csv_b = read_file(dir_b / "sweep.csv");
  EXPECT_FALSE(csv_a.empty());
  EXPECT_EQ(csv_a, csv_b);
  EXPECT_TRUE(fs::exists(dir_a / "manifest_sweep.json"));
  const std::string manifest = read_file(dir_a / "manifest_sweep.json");
  EXPECT_NE(manifest.find("\"operation\""), std::string::npos);
  EXPECT_NE(manifest.find("sweep"), std::string::npos);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST(Spectrum, EigenvalueCountMatchesSystemSize) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.62};
  const std::vector<SpectrumResult> results = run_spectrum(config);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].status, "ok");
  EXPECT_EQ(results[0].lambdas.size(), 33u);
}

TEST(Spectrum, ScalesLinearlyInDamping) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.41, 0.82};
  const std::vector<SpectrumResult> results = run_spectrum(config);
  ASSERT_EQ(results.size(), 2u);
  ASSERT_EQ(results[0].lambdas.size(), results[1].lambdas.size());

  // Greedy nearest-neighbor matching of 2*lambda(0.41) against lambda(0.82).
  std::vector<std::complex<double>> pool = results[1].lambdas;
  double worst = 0.0;
  for (const std::complex<double>& lambda : results[0].lambdas) {
    const std::complex<double> target = 2.0 * lambda;
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const double d = std::abs(pool[k] - target);
      if (d < best_dist) {
        best_dist = d;
        best = k;
      }
    }
    worst = std::max(worst, best_dist / std::max(1.0, std::abs(target)));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Spectrum, UndampedPartitionOfUnityOperatorHasComplexModes) {
  ExperimentConfig config = tiny_config();
  config.mesh_ns = {3};
  config.omegas = {1.0};
  const std::vector<SpectrumResult> results = run_spectrum(config);
  ASSERT_EQ(results.size(), 1u);
  bool any_complex = false;
  for (const auto& lambda : results[0].lambdas)
    any_complex |= std::abs(lambda.imag()) > 1e-8;
  EXPECT_TRUE(any_complex);
}

TEST(Spectrum, WritesCsvAndSvgPerOmega) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.41, 0.62};
  const fs::path dir = fs::path(::testing::TempDir()) / "spectrum_out";
  config.output_dir = dir.string();
  run_spectrum(config);
  EXPECT_TRUE(fs::exists(dir / "spectrum_omega_0.41.csv"));
  EXPECT_TRUE(fs::exists(dir / "spectrum_omega_0.62.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest_spectrum.json"));
  bool any_svg = false;
  for (const auto& entry : fs::directory_iterator(dir))
    any_svg |= entry.path().extension() == ".svg";
  EXPECT_TRUE(any_svg);
  const std::string csv = read_file(dir / "spectrum_omega_0.41.csv");
  EXPECT_EQ(csv.rfind("omega,re,im", 0), 0u) << csv.substr(0, 40);
  fs::remove_all(dir);
}

TEST(TheoryComparison, BaseRowPlusOnePerRequestedCut) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.62};
  config.n_c_list = {4, 8};
  const std::vector<TheoryRow> rows = run_theory_comparison(config);
  ASSERT_EQ(rows.size(), 3u);

  const TheoryRow& base = rows[0];
  EXPECT_EQ(base.omega, 0.62);
  EXPECT_EQ(base.n, 33);
  EXPECT_TRUE(std::isfinite(base.predicted));
  EXPECT_TRUE(std::isfinite(base.measured_asymptotic));
  EXPECT_TRUE(base.status == "ok" || base.status == "not_converged") << base.status;

  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].status, "prediction_only");
    EXPECT_TRUE(std::isnan(rows[k].measured_geometric));
    EXPECT_TRUE(std::isnan(rows[k].measured_asymptotic));
    EXPECT_TRUE(std::isfinite(rows[k].predicted));
    EXPECT_GE(rows[k].n_c_eff, rows[k].n_c_requested);
  }
  EXPECT_EQ(rows[1].n_c_requested, 4);
  EXPECT_EQ(rows[2].n_c_requested, 8);
  // Deeper cuts never predict worse factors.
  EXPECT_GE(rows[1].predicted + 1e-12, rows[2].predicted);
}

TEST(TheoryComparison, PredictionLowerBoundsMeasuredDecay) {
  ExperimentConfig config = tiny_config();
  config.omegas = {0.62};
  config.maxit = 200;
  config.tol = 1e-10;
  const std::vector<TheoryRow> rows = run_theory_comparison(config);
  ASSERT_FALSE(rows.empty());
  const TheoryRow& base = rows[0];
  ASSERT_EQ(base.status, "ok");
  EXPECT_LE(base.predicted, base.measured_asymptotic + 0.02);
}

TEST(VankaComparison, IdenticalModesGiveIdenticalHistories) {
  ExperimentConfig config = tiny_config();
  config.standalone_maxit = 50;
  const VankaComparison cmp =
      run_vanka_comparison(config, VankaMode::additive_pou, VankaMode::additive_pou);
  EXPECT_EQ(cmp.label_a, cmp.label_b);
  ASSERT_EQ(cmp.history_a.residual_norms.size(), cmp.history_b.residual_norms.size());
  for (std::size_t k = 0; k < cmp.history_a.residual_norms.size(); ++k)
    EXPECT_EQ(cmp.history_a.residual_norms[k], cmp.history_b.residual_norms[k]);
}

TEST(VankaComparison, MultiplicativeNeedsFewerSweepsThanAdditive) {
  ExperimentConfig config = tiny_config();
  config.mesh_ns = {3};
  config.tol = 1e-10;
  config.standalone_maxit = 5000;
  const VankaComparison cmp =
      run_vanka_comparison(config, VankaMode::additive_pou, VankaMode::multiplicative);
  EXPECT_EQ(cmp.label_a, "additive_pou");
  EXPECT_EQ(cmp.label_b, "multiplicative");
  ASSERT_TRUE(cmp.history_b.converged);
  ASSERT_TRUE(cmp.history_a.converged);
  EXPECT_LT(cmp.history_b.iterations, cmp.history_a.iterations);
}

TEST(VankaComparison, WritesOverlayCsv) {
  ExperimentConfig config = tiny_config();
  config.standalone_maxit = 40;
  const fs::path dir = fs::path(::testing::TempDir()) / "vanka_out";
  config.output_dir = dir.string();
  run_vanka_comparison(config);
  EXPECT_TRUE(fs::exists(dir / "vanka_compare.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest_vanka_compare.json"));
  const std::string csv = read_file(dir / "vanka_compare.csv");
  EXPECT_NE(csv.find("iteration,omega,residual_additive_pou,residual_multiplicative"),
            std::string::npos);
  fs::remove_all(dir);
}

TEST(CsvWriterTest, FixedScientificFormat) {
  EXPECT_EQ(CsvWriter::num(1.0), "1.000000000000e+00");
  EXPECT_EQ(CsvWriter::num(-0.5), "-5.000000000000e-01");
  EXPECT_EQ(CsvWriter::num(0.0), "0.000000000000e+00");
}

TEST(CsvWriterTest, HeaderAndRowsWellFormed) {
  CsvWriter csv({"a", "b"});
  csv.add_row({"1", "2"});
  csv.add_row({CsvWriter::num(0.25), "x"});
  EXPECT_EQ(csv.content(), "a,b\n1,2\n2.500000000000e-01,x\n");
  EXPECT_THROW(csv.add_row({"only-one"}), ConfigError);
}

TEST(SvgPlot, ContainsStructureAndLabels) {
  SvgSeries series;
  series.x = {0.0, 1.0, 2.0};
  series.y = {1.0, 0.5, 0.25};
  series.label = "decay";
  SvgPlotOptions options;
  options.title = "residual history";
  options.x_label = "iteration";
  options.y_label = "residual";
  const std::string svg = render_plot({series}, options);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("residual history"), std::string::npos);
  EXPECT_NE(svg.find("iteration"), std::string::npos);
  EXPECT_NE(svg.find("decay"), std::string::npos);
}

TEST(SvgPlot, LogAxisSkipsNonpositiveValues) {
  SvgSeries series;
  series.x = {0.0, 1.0, 2.0, 3.0};
  series.y = {1.0, 0.0, -2.0, 0.125};
  series.label = "partial";
  SvgPlotOptions options;
  options.log_y = true;
  const std::string svg = render_plot({series}, options);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}

}  // namespace
