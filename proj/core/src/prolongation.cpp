#include "amglab/prolongation.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "amglab/dense_linalg.hpp"
#include "amglab/errors.hpp"

namespace amglab {

SparseMatrix tentative_prolongation(const Aggregation& agg, const DenseMatrix& nullspace) {
  const index_t n = static_cast<index_t>(agg.node_to_aggregate.size());
  const index_t m = nullspace.ncols;
  if (nullspace.nrows != n)
    throw DimensionError("tentative_prolongation: nullspace rows must match node count");
  if (m < 1) throw DimensionError("tentative_prolongation: nullspace must have a column");

  std::vector<std::vector<index_t>> members(static_cast<std::size_t>(agg.n_aggregates));
  for (index_t v = 0; v < n; ++v)
    members[static_cast<std::size_t>(agg.node_to_aggregate[static_cast<std::size_t>(v)])].push_back(v);

  std::vector<Triplet> trips;
  for (index_t a = 0; a < agg.n_aggregates; ++a) {
    const auto& rows = members[static_cast<std::size_t>(a)];
    if (rows.empty())
      throw ConfigError("tentative_prolongation: empty aggregate " + std::to_string(a));
    // Modified Gram-Schmidt on the local nullspace block.
    const std::size_t r = rows.size();
    std::vector<std::vector<double>> q(static_cast<std::size_t>(m), std::vector<double>(r));
    for (index_t c = 0; c < m; ++c)
      for (std::size_t i = 0; i < r; ++i)
        q[static_cast<std::size_t>(c)][i] = nullspace(rows[i], c);
    for (index_t c = 0; c < m; ++c) {
      auto& qc = q[static_cast<std::size_t>(c)];
      for (index_t prev = 0; prev < c; ++prev) {
        const auto& qp = q[static_cast<std::size_t>(prev)];
        double proj = 0.0;
        for (std::size_t i = 0; i < r; ++i) proj += qp[i] * qc[i];
        for (std::size_t i = 0; i < r; ++i) qc[i] -= proj * qp[i];
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < r; ++i) nrm += qc[i] * qc[i];
      nrm = std::sqrt(nrm);
      if (nrm <= 1e-12)
        throw SingularMatrixError(
            "tentative_prolongation: rank-deficient nullspace on aggregate " + std::to_string(a), a);
      for (std::size_t i = 0; i < r; ++i) qc[i] /= nrm;
      for (std::size_t i = 0; i < r; ++i)
        trips.push_back({rows[i], a * m + c, qc[i]});
    }
  }
  return from_triplets(n, agg.n_aggregates * m, trips);
}

SparseMatrix smooth_prolongation(const SparseMatrix& A, const SparseMatrix& T,
                                 std::optional<double> omega_override) {
  if (A.nrows != A.ncols) throw DimensionError("smooth_prolongation: A must be square");
  if (T.nrows != A.ncols) throw DimensionError("smooth_prolongation: T rows must match A");
  const index_t n = A.nrows;

  std::vector<double> dinv(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    const double d = A.at(i, i);
    if (d == 0.0)
      throw SingularMatrixError("smooth_prolongation: zero diagonal at row " + std::to_string(i), i);
    dinv[static_cast<std::size_t>(i)] = 1.0 / d;
  }

  double omega;
  if (omega_override) {
    omega = *omega_override;
  } else {
    const double rho = spectral_radius(
        [&](const std::vector<double>& x) {
          std::vector<double> y = spmv(A, x);
          for (index_t i = 0; i < n; ++i)
            y[static_cast<std::size_t>(i)] *= dinv[static_cast<std::size_t>(i)];
          return y;
        },
        n, /*dense_fallback=*/true, /*tol=*/1e-3);
    omega = 4.0 / (3.0 * rho);
  }
  if (omega == 0.0) return T;

  // P = T - omega * D^-1 (A T)
  SparseMatrix AT = multiply(A, T);
  for (index_t i = 0; i < n; ++i)
    for (index_t p = AT.row_offsets[static_cast<std::size_t>(i)];
         p < AT.row_offsets[static_cast<std::size_t>(i) + 1]; ++p)
      AT.values[static_cast<std::size_t>(p)] *= dinv[static_cast<std::size_t>(i)];
  return add(1.0, T, -omega, AT);
}

}  // namespace amglab
