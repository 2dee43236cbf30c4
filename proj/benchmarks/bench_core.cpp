// Microbenchmarks for the per-iteration hot paths: sparse kernels, Vanka
// sweeps, the Galerkin product, hierarchy setup, and one V-cycle.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "amglab/hierarchy.hpp"
#include "amglab/mesh.hpp"
#include "amglab/solver.hpp"
#include "amglab/sparse.hpp"
#include "amglab/stokes.hpp"
#include "amglab/vanka.hpp"

namespace {

using namespace amglab;

struct Instance {
  TriMesh mesh;
  StokesSystem system;
  SparseMatrix A_p;
  std::vector<double> x;
};

const Instance& instance(index_t n) {
  static Instance cache[2];
  Instance& slot = cache[n == 10 ? 0 : 1];
  if (slot.system.size() == 0) {
    slot.mesh = build_structured_mesh(n);
    slot.system =
        assemble_stokes(slot.mesh, zero_field(), reference_forcing(), reference_neumann());
    slot.A_p = assemble_pressure_laplacian(slot.mesh);
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    slot.x.resize(slot.system.size());
    for (double& v : slot.x) v = dist(gen);
  }
  return slot;
}

void BM_Spmv(benchmark::State& state) {
  const Instance& inst = instance(static_cast<index_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spmv(inst.system.K, inst.x));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(inst.system.K.values.size()));
}
BENCHMARK(BM_Spmv)->Arg(10)->Arg(13);

void BM_GalerkinProduct(benchmark::State& state) {
  const Instance& inst = instance(static_cast<index_t>(state.range(0)));
  const auto levels = build_monolithic_hierarchy(inst.system, inst.A_p, 2);
  const Level& lvl = levels.front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(triple_product(lvl.R, inst.system.K, lvl.P));
  }
}
BENCHMARK(BM_GalerkinProduct)->Arg(10)->Arg(13);

void BM_VankaBuild(benchmark::State& state) {
  const Instance& inst = instance(static_cast<index_t>(state.range(0)));
  const DofPartition part{inst.system.n_velocity(), inst.system.n_pressure()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_vanka(inst.system.K, part, VankaMode::additive_pou, 0.62));
  }
}
BENCHMARK(BM_VankaBuild)->Arg(10)->Arg(13);

void BM_VankaSweep(benchmark::State& state) {
  const Instance& inst = instance(10);
  const DofPartition part{inst.system.n_velocity(), inst.system.n_pressure()};
  const VankaMode mode = state.range(0) == 0 ? VankaMode::additive_pou : VankaMode::multiplicative;
  const VankaRelaxation relax = build_vanka(inst.system.K, part, mode, 0.62);
  std::vector<double> x(inst.system.size(), 0.0);
  for (auto _ : state) {
    x = apply_relaxation(relax, x, inst.system.rhs);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_VankaSweep)->Arg(0)->Arg(1);

void BM_HierarchySetup(benchmark::State& state) {
  const Instance& inst = instance(static_cast<index_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_multigrid(inst.system, inst.A_p, 3));
  }
}
BENCHMARK(BM_HierarchySetup)->Arg(10)->Arg(13);

void BM_VCycle(benchmark::State& state) {
  const Instance& inst = instance(static_cast<index_t>(state.range(0)));
  const MultigridHierarchy hier = build_multigrid(inst.system, inst.A_p, 3);
  const auto relax = build_smoothers(hier, VankaMode::additive_pou, 0.62);
  CycleConfig config;
  config.levels = 3;
  std::vector<double> x(inst.system.size(), 0.0);
  for (auto _ : state) {
    x = cycle(hier, relax, x, inst.system.rhs, config);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_VCycle)->Arg(10)->Arg(13);

}  // namespace

BENCHMARK_MAIN();
