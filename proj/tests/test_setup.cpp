#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "amglab/aggregation.hpp"
#include "amglab/dense_linalg.hpp"
#include "amglab/errors.hpp"
#include "amglab/hierarchy.hpp"
#include "amglab/prolongation.hpp"
#include "amglab/strength.hpp"

#include "test_support.hpp"

namespace {

using namespace amglab;
using testsupport::make_stokes;
using testsupport::StokesBundle;
using testsupport::tridiag;

DenseMatrix constant_nullspace(index_t n) {
  DenseMatrix ns(n, 1);
  for (index_t i = 0; i < n; ++i) ns(i, 0) = 1.0;
  return ns;
}

StrengthGraph chain_graph(index_t n) {
  // Path graph with uniform weights: 0-1-2-...-(n-1).
  StrengthGraph S;
  S.n = n;
  S.theta = 1.5;
  S.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (index_t i = 0; i < n; ++i) {
    if (i > 0) {
      S.col_indices.push_back(i - 1);
      S.weights.push_back(1.0);
    }
    if (i + 1 < n) {
      S.col_indices.push_back(i + 1);
      S.weights.push_back(1.0);
    }
    S.row_offsets[static_cast<std::size_t>(i) + 1] =
        static_cast<index_t>(S.col_indices.size());
  }
  return S;
}

TEST(EvolutionSoc, DiagonalMatrixHasNoStrongEdges) {
  SparseMatrix D = from_triplets(4, 4, {{0, 0, 2.0}, {1, 1, 3.0}, {2, 2, 1.0}, {3, 3, 5.0}});
  const StrengthGraph S = evolution_soc(D);
  EXPECT_EQ(S.n, 4);
  for (index_t i = 0; i < 4; ++i) EXPECT_EQ(S.degree(i), 0);
}

TEST(EvolutionSoc, Poisson1dKeepsBothNeighbors) {
  const SparseMatrix A = tridiag(10, -1.0, 2.0, -1.0);
  const StrengthGraph S = evolution_soc(A, 2, 4.0);
  for (index_t i = 0; i < 10; ++i) {
    std::set<index_t> nb;
    for (index_t k = S.row_offsets[i]; k < S.row_offsets[i + 1]; ++k)
      nb.insert(S.col_indices[k]);
    std::set<index_t> expected;
    if (i > 0) expected.insert(i - 1);
    if (i + 1 < 10) expected.insert(i + 1);
    EXPECT_EQ(nb, expected) << "row " << i;
  }
}

TEST(EvolutionSoc, HugeThetaKeepsEverySparsityNeighbor) {
  // Strongly anisotropic row couplings: a loose theta must keep even the weak ones.
  SparseMatrix A = from_triplets(3, 3,
                                 {{0, 0, 2.0},
                                  {0, 1, -1.0},
                                  {0, 2, -1e-3},
                                  {1, 0, -1.0},
                                  {1, 1, 2.0},
                                  {2, 0, -1e-3},
                                  {2, 2, 2.0}});
  const StrengthGraph strict = evolution_soc(A, 2, 1.05);
  const StrengthGraph loose = evolution_soc(A, 2, 1e9);
  EXPECT_LT(strict.degree(0), 2);
  EXPECT_EQ(loose.degree(0), 2);
}

TEST(EvolutionSoc, ExcludesDiagonalAndMirrorsSparsity) {
  const StokesBundle s = make_stokes(2);
  const StrengthGraph S = evolution_soc(s.system.A_scalar, 2, 1e9);
  for (index_t i = 0; i < S.n; ++i) {
    for (index_t k = S.row_offsets[i]; k < S.row_offsets[i + 1]; ++k) {
      EXPECT_NE(S.col_indices[k], i);
      EXPECT_GE(S.weights[k], 0.0);
      // Every strong edge is a sparsity neighbor of the source row.
      bool in_pattern = false;
      const SparseMatrix& A = s.system.A_scalar;
      for (index_t kk = A.row_offsets[i]; kk < A.row_offsets[i + 1]; ++kk)
        in_pattern |= (A.col_indices[kk] == S.col_indices[k]);
      EXPECT_TRUE(in_pattern);
    }
  }
}

TEST(EvolutionSoc, ZeroDiagonalThrows) {
  SparseMatrix A = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  EXPECT_THROW(evolution_soc(A), SingularMatrixError);
}

TEST(Aggregation, NineChainFormsThreeTriples) {
  const Aggregation agg = standard_aggregation(chain_graph(9));
  EXPECT_EQ(agg.n_aggregates, 3);
  const std::vector<index_t> expected = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  EXPECT_EQ(agg.node_to_aggregate, expected);
  EXPECT_EQ(aggregate_sizes(agg), (std::vector<index_t>{3, 3, 3}));
}

TEST(Aggregation, EdgelessGraphYieldsSingletons) {
  StrengthGraph S;
  S.n = 5;
  S.theta = 1.5;
  S.row_offsets.assign(6, 0);
  const Aggregation agg = standard_aggregation(S);
  EXPECT_EQ(agg.n_aggregates, 5);
  for (index_t i = 0; i < 5; ++i) EXPECT_EQ(aggregate_sizes(agg)[agg.node_to_aggregate[i]], 1);
}

TEST(Aggregation, CoverIsTotalAndAggregatesConnected) {
  const StokesBundle s = make_stokes(4);
  const StrengthGraph S = evolution_soc(s.system.A_scalar, 2, 1.5);
  const Aggregation agg = standard_aggregation(S);
  ASSERT_EQ(agg.node_to_aggregate.size(), static_cast<std::size_t>(S.n));
  for (index_t a : agg.node_to_aggregate) {
    EXPECT_GE(a, 0);
    EXPECT_LT(a, agg.n_aggregates);
  }
  // Every aggregate id occurs.
  const std::vector<index_t> sizes = aggregate_sizes(agg);
  for (index_t sz : sizes) EXPECT_GE(sz, 1);
  EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), index_t{0}), S.n);

  // Connectivity: BFS inside each aggregate using only strength edges.
  for (index_t a = 0; a < agg.n_aggregates; ++a) {
    std::vector<index_t> members;
    for (index_t i = 0; i < S.n; ++i)
      if (agg.node_to_aggregate[i] == a) members.push_back(i);
    ASSERT_FALSE(members.empty());
    std::set<index_t> member_set(members.begin(), members.end());
    std::set<index_t> visited;
    std::queue<index_t> q;
    q.push(members[0]);
    visited.insert(members[0]);
    while (!q.empty()) {
      const index_t i = q.front();
      q.pop();
      for (index_t k = S.row_offsets[i]; k < S.row_offsets[i + 1]; ++k) {
        const index_t j = S.col_indices[k];
        if (member_set.count(j) && !visited.count(j)) {
          visited.insert(j);
          q.push(j);
        }
      }
    }
    EXPECT_EQ(visited.size(), member_set.size()) << "aggregate " << a << " is disconnected";
  }
}

TEST(TentativeProlongation, ChainTriplesGetOrthonormalConstantColumns) {
  const Aggregation agg = standard_aggregation(chain_graph(9));
  const SparseMatrix T = tentative_prolongation(agg, constant_nullspace(9));
  EXPECT_EQ(T.nrows, 9);
  EXPECT_EQ(T.ncols, 3);
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (index_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(T.at(i, agg.node_to_aggregate[i]), inv_sqrt3, 1e-14);
    EXPECT_EQ(T.row_offsets[i + 1] - T.row_offsets[i], 1);  // one aggregate per node
  }
  // T^T T = I.
  const SparseMatrix TtT = multiply(transpose(T), T);
  EXPECT_LT(testsupport::max_abs_diff(to_dense(TtT), DenseMatrix::identity(3)), 1e-14);
}

TEST(TentativeProlongation, ReproducesNullspaceVector) {
  const Aggregation agg = standard_aggregation(chain_graph(7));
  const SparseMatrix T = tentative_prolongation(agg, constant_nullspace(7));
  // ns = T (T^T ns) exactly, because ns restricted to each aggregate spans the column.
  std::vector<double> ns(7, 1.0);
  const std::vector<double> coarse = spmv_transposed(T, ns);
  const std::vector<double> back = spmv(T, coarse);
  for (index_t i = 0; i < 7; ++i) EXPECT_NEAR(back[i], 1.0, 1e-14);
}

TEST(TentativeProlongation, ZeroNullspaceOnAggregateThrows) {
  Aggregation agg;
  agg.node_to_aggregate = {0, 0, 1};
  agg.n_aggregates = 2;
  DenseMatrix ns(3, 1);
  ns(0, 0) = 1.0;
  ns(1, 0) = 1.0;
  ns(2, 0) = 0.0;  // aggregate 1's restriction is identically zero
  EXPECT_THROW(tentative_prolongation(agg, ns), SingularMatrixError);
}

TEST(SmoothProlongation, ZeroOverrideReturnsTentative) {
  const SparseMatrix A = tridiag(9, -1.0, 2.0, -1.0);
  const Aggregation agg = standard_aggregation(chain_graph(9));
  const SparseMatrix T = tentative_prolongation(agg, constant_nullspace(9));
  const SparseMatrix P = smooth_prolongation(A, T, 0.0);
  EXPECT_LT(testsupport::max_abs_diff(to_dense(P), to_dense(T)), 1e-300);
}

TEST(SmoothProlongation, MatchesExplicitJacobiFormula) {
  const SparseMatrix A = tridiag(9, -1.0, 2.0, -1.0);
  const Aggregation agg = standard_aggregation(chain_graph(9));
  const SparseMatrix T = tentative_prolongation(agg, constant_nullspace(9));
  const double omega = 0.7;
  const SparseMatrix P = smooth_prolongation(A, T, omega);
  // Oracle: P = T - omega D^-1 (A T), dense arithmetic.
  const DenseMatrix Td = to_dense(T);
  const DenseMatrix Ad = to_dense(A);
  DenseMatrix expected = Td;
  const DenseMatrix AT = dense_multiply(Ad, Td);
  for (index_t i = 0; i < 9; ++i)
    for (index_t j = 0; j < 3; ++j) expected(i, j) -= omega / Ad(i, i) * AT(i, j);
  EXPECT_LT(testsupport::max_abs_diff(to_dense(P), expected), 1e-13);
}

TEST(SmoothProlongation, PatternWithinOneRingOfTentative) {
  const StokesBundle s = make_stokes(3);
  const SparseMatrix& A = s.system.A_scalar;
  const StrengthGraph S = evolution_soc(A, 2, 1.5);
  const Aggregation agg = standard_aggregation(S);
  const SparseMatrix T = tentative_prolongation(agg, constant_nullspace(A.nrows));
  const SparseMatrix P = smooth_prolongation(A, T);
  const SparseMatrix AT = multiply(A, T);
  const SparseMatrix envelope = add(1.0, AT, 1.0, T);  // pattern union
  for (index_t i = 0; i < P.nrows; ++i) {
    std::set<index_t> allowed;
    for (index_t k = envelope.row_offsets[i]; k < envelope.row_offsets[i + 1]; ++k)
      allowed.insert(envelope.col_indices[k]);
    for (index_t k = P.row_offsets[i]; k < P.row_offsets[i + 1]; ++k)
      EXPECT_TRUE(allowed.count(P.col_indices[k])) << "row " << i;
  }
}

TEST(SmoothProlongation, LowersEnergyOfCoarseInterpolants) {
  // The point of the Jacobi step: smoothed coarse vectors carry no more
  // A-energy than the tentative ones, aggregate by aggregate on 1D Poisson.
  const SparseMatrix A = tridiag(30, -1.0, 2.0, -1.0);
  const StrengthGraph S = evolution_soc(A, 2, 4.0);
  const Aggregation agg = standard_aggregation(S);
  const SparseMatrix T = tentative_prolongation(agg, constant_nullspace(30));
  const SparseMatrix P = smooth_prolongation(A, T);
  auto energy = [&](const SparseMatrix& M, index_t col) {
    std::vector<double> e(static_cast<std::size_t>(M.ncols), 0.0);
    e[static_cast<std::size_t>(col)] = 1.0;
    const std::vector<double> v = spmv(M, e);
    return dot(v, spmv(A, v));
  };
  for (index_t c = 0; c < T.ncols; ++c) EXPECT_LE(energy(P, c), energy(T, c) + 1e-12);
}

TEST(Hierarchy, TwoLevelShapesAndGalerkinOracle) {
  const StokesBundle s = make_stokes(4);
  HierarchyParams params;
  const std::vector<Level> levels = build_monolithic_hierarchy(s.system, s.A_p, 2, params);
  ASSERT_EQ(levels.size(), 1u);
  const Level& L = levels[0];
  EXPECT_EQ(L.P.nrows, s.system.size());
  EXPECT_EQ(L.P.ncols, L.coarse_size());
  EXPECT_EQ(L.K_coarse.nrows, L.coarse_size());
  EXPECT_EQ(L.field_offsets.size(), 3u);
  EXPECT_EQ(L.field_offsets[0], 0);

  // R = P^T entrywise.
  EXPECT_LT(testsupport::max_abs_diff(to_dense(L.R), to_dense(transpose(L.P))), 1e-300);

  // Galerkin product against a dense oracle.
  const DenseMatrix Pd = to_dense(L.P);
  const DenseMatrix Kd = to_dense(s.system.K);
  const DenseMatrix expected = dense_multiply(dense_transpose(Pd), dense_multiply(Kd, Pd));
  EXPECT_LT(testsupport::max_abs_diff(to_dense(L.K_coarse), expected),
            1e-12 * frobenius_norm(s.system.K));

  // Coarse operator inherits symmetry and the empty pressure-pressure block.
  EXPECT_LT(symmetry_gap(L.K_coarse), 1e-12);
  for (index_t i = L.field_offsets[1]; i < L.field_offsets[2]; ++i)
    for (index_t k = L.K_coarse.row_offsets[i]; k < L.K_coarse.row_offsets[i + 1]; ++k)
      EXPECT_LT(L.K_coarse.col_indices[k], L.field_offsets[1]);
}

TEST(Hierarchy, ProlongationIsBlockDiagonalAcrossFields) {
  const StokesBundle s = make_stokes(4);
  const std::vector<Level> levels = build_monolithic_hierarchy(s.system, s.A_p, 2);
  const Level& L = levels[0];
  const index_t nf = s.system.dof_map.n_free();
  const index_t cu = L.coarse_velocity_size();
  for (index_t i = 0; i < L.P.nrows; ++i) {
    for (index_t k = L.P.row_offsets[i]; k < L.P.row_offsets[i + 1]; ++k) {
      const index_t j = L.P.col_indices[k];
      if (i < nf)
        EXPECT_LT(j, cu / 2);  // x-velocity rows hit x-velocity coarse columns
      else if (i < 2 * nf)
        EXPECT_TRUE(j >= cu / 2 && j < cu);
      else
        EXPECT_GE(j, cu);  // pressure rows stay in the pressure block
    }
  }
  // Both velocity components share one scalar prolongation.
  EXPECT_EQ(cu % 2, 0);
  const DenseMatrix Pd = to_dense(L.P);
  for (index_t i = 0; i < nf; ++i)
    for (index_t j = 0; j < cu / 2; ++j)
      EXPECT_EQ(Pd(i, j), Pd(nf + i, cu / 2 + j));
}

TEST(Hierarchy, ProlongationHasFullColumnRank) {
  const StokesBundle s = make_stokes(4);
  const std::vector<Level> levels = build_monolithic_hierarchy(s.system, s.A_p, 2);
  const SparseMatrix PtP = multiply(transpose(levels[0].P), levels[0].P);
  const EigenDecomposition eig = dense_eig(to_dense(PtP));
  double min_eig = 1e300;
  for (const auto& v : eig.values) min_eig = std::min(min_eig, v.real());
  EXPECT_GT(min_eig, 1e-10);
}

TEST(Hierarchy, CoarseningRatioStaysModerate) {
  const StokesBundle s = make_stokes(8);
  const std::vector<Level> levels = build_monolithic_hierarchy(s.system, s.A_p, 2);
  const Level& L = levels[0];
  const double vel_ratio = static_cast<double>(s.system.n_velocity()) /
                           static_cast<double>(L.coarse_velocity_size());
  const double p_ratio = static_cast<double>(s.system.n_pressure()) /
                         static_cast<double>(L.coarse_pressure_size());
  EXPECT_GE(vel_ratio, 2.0);
  EXPECT_LE(vel_ratio, 12.0);
  EXPECT_GE(p_ratio, 2.0);
  EXPECT_LE(p_ratio, 12.0);
}

TEST(Hierarchy, ThreeLevelSizesStrictlyDecrease) {
  const StokesBundle s = make_stokes(10);
  HierarchyParams params;
  const std::vector<Level> levels = build_monolithic_hierarchy(s.system, s.A_p, 3, params);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_LT(levels[0].coarse_size(), s.system.size());
  EXPECT_LT(levels[1].coarse_size(), levels[0].coarse_size());
  EXPECT_EQ(levels[1].P.nrows, levels[0].coarse_size());
}

TEST(Hierarchy, StopsEarlyAtMinCoarseSize) {
  const StokesBundle s = make_stokes(2);  // 33 unknowns
  HierarchyParams params;
  params.min_coarse_size = 30;
  const std::vector<Level> levels = build_monolithic_hierarchy(s.system, s.A_p, 5, params);
  // First coarse level is already at or below the floor, so exactly one step.
  ASSERT_GE(levels.size(), 1u);
  EXPECT_LE(levels.back().coarse_size(), 30);
  if (levels.size() > 1)
    EXPECT_GT(levels[levels.size() - 2].coarse_size(), 30);
}

TEST(Hierarchy, FewerThanTwoLevelsThrows) {
  const StokesBundle s = make_stokes(2);
  EXPECT_THROW(build_monolithic_hierarchy(s.system, s.A_p, 1), ConfigError);
}

}  // namespace
