#include "amglab/strength.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amglab/dense_linalg.hpp"
#include "amglab/errors.hpp"

namespace amglab {

StrengthGraph evolution_soc(const SparseMatrix& A, int k, double theta) {
  if (A.nrows != A.ncols) throw DimensionError("evolution_soc: operator must be square");
  if (k < 1) throw ConfigError("evolution_soc: k must be >= 1");
  if (theta < 1.0) throw ConfigError("evolution_soc: theta must be >= 1");
  const index_t n = A.nrows;

  std::vector<double> dinv(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    const double d = A.at(i, i);
    if (d == 0.0)
      throw SingularMatrixError("evolution_soc: zero diagonal at row " + std::to_string(i), i);
    dinv[static_cast<std::size_t>(i)] = 1.0 / d;
  }

  const double rho = spectral_radius(
      [&](const std::vector<double>& x) {
        std::vector<double> y = spmv(A, x);
        for (index_t i = 0; i < n; ++i)
          y[static_cast<std::size_t>(i)] *= dinv[static_cast<std::size_t>(i)];
        return y;
      },
      n, /*dense_fallback=*/true, /*tol=*/1e-3);
  const double omega = 4.0 / (3.0 * rho);

  // Column access for the Jacobi sweeps on sparse-support vectors.
  const SparseMatrix At = transpose(A);

  StrengthGraph graph;
  graph.n = n;
  graph.theta = theta;
  graph.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);

  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::vector<index_t> z_support, w_support;
  std::vector<char> in_w(static_cast<std::size_t>(n), 0);

  for (index_t i = 0; i < n; ++i) {
    z[static_cast<std::size_t>(i)] = 1.0;
    z_support = {i};
    for (int step = 0; step < k; ++step) {
      // w = A z over the support's 1-ring, via columns of A.
      w_support.clear();
      for (index_t c : z_support) {
        const double zc = z[static_cast<std::size_t>(c)];
        for (index_t p = At.row_offsets[static_cast<std::size_t>(c)];
             p < At.row_offsets[static_cast<std::size_t>(c) + 1]; ++p) {
          const index_t r = At.col_indices[static_cast<std::size_t>(p)];
          if (!in_w[static_cast<std::size_t>(r)]) {
            in_w[static_cast<std::size_t>(r)] = 1;
            w_support.push_back(r);
            w[static_cast<std::size_t>(r)] = 0.0;
          }
          w[static_cast<std::size_t>(r)] += At.values[static_cast<std::size_t>(p)] * zc;
        }
      }
      // z <- z - omega D^-1 w; the union of supports becomes the new support.
      for (index_t r : w_support) {
        z[static_cast<std::size_t>(r)] -= omega * dinv[static_cast<std::size_t>(r)] * w[static_cast<std::size_t>(r)];
        in_w[static_cast<std::size_t>(r)] = 0;
      }
      for (index_t c : z_support)
        if (std::find(w_support.begin(), w_support.end(), c) == w_support.end())
          w_support.push_back(c);
      z_support.swap(w_support);
    }

    double denom = 0.0;
    for (index_t p = A.row_offsets[static_cast<std::size_t>(i)];
         p < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++p) {
      const index_t j = A.col_indices[static_cast<std::size_t>(p)];
      if (j != i) denom = std::max(denom, std::abs(z[static_cast<std::size_t>(j)]));
    }
    if (denom > 0.0) {
      for (index_t p = A.row_offsets[static_cast<std::size_t>(i)];
           p < A.row_offsets[static_cast<std::size_t>(i) + 1]; ++p) {
        const index_t j = A.col_indices[static_cast<std::size_t>(p)];
        if (j == i) continue;
        const double s = std::abs(z[static_cast<std::size_t>(j)]) / denom;
        if (s >= 1.0 / theta) {
          graph.col_indices.push_back(j);
          graph.weights.push_back(s);
        }
      }
    }
    graph.row_offsets[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(graph.col_indices.size());

    for (index_t c : z_support) z[static_cast<std::size_t>(c)] = 0.0;
  }
  return graph;
}

}  // namespace amglab
