#include "amglab/aggregation.hpp"

#include <algorithm>

namespace amglab {

Aggregation standard_aggregation(const StrengthGraph& S) {
  const index_t n = S.n;
  Aggregation agg;
  agg.node_to_aggregate.assign(static_cast<std::size_t>(n), -1);

  const auto covered = [&](index_t v) { return agg.node_to_aggregate[static_cast<std::size_t>(v)] >= 0; };
  const auto neighbors_uncovered = [&](index_t v) {
    for (index_t p = S.row_offsets[static_cast<std::size_t>(v)];
         p < S.row_offsets[static_cast<std::size_t>(v) + 1]; ++p)
      if (covered(S.col_indices[static_cast<std::size_t>(p)])) return false;
    return true;
  };

  // Pass 1: while some node plus its whole strong neighborhood is uncovered,
  // seed an aggregate there, preferring the node with most strong neighbors.
  while (true) {
    index_t seed = -1;
    index_t best_degree = -1;
    for (index_t v = 0; v < n; ++v) {
      if (covered(v) || !neighbors_uncovered(v)) continue;
      const index_t d = S.degree(v);
      if (d > best_degree) {
        best_degree = d;
        seed = v;
      }
    }
    if (seed < 0) break;
    const index_t id = agg.n_aggregates++;
    agg.node_to_aggregate[static_cast<std::size_t>(seed)] = id;
    for (index_t p = S.row_offsets[static_cast<std::size_t>(seed)];
         p < S.row_offsets[static_cast<std::size_t>(seed) + 1]; ++p)
      agg.node_to_aggregate[static_cast<std::size_t>(S.col_indices[static_cast<std::size_t>(p)])] = id;
  }

  // Pass 2: attach leftovers along their strongest covered connection,
  // sweeping until the cascade settles.
  bool changed = true;
  while (changed) {
    changed = false;
    for (index_t v = 0; v < n; ++v) {
      if (covered(v)) continue;
      index_t best_agg = -1;
      double best_weight = -1.0;
      for (index_t p = S.row_offsets[static_cast<std::size_t>(v)];
           p < S.row_offsets[static_cast<std::size_t>(v) + 1]; ++p) {
        const index_t u = S.col_indices[static_cast<std::size_t>(p)];
        if (!covered(u)) continue;
        const index_t a = agg.node_to_aggregate[static_cast<std::size_t>(u)];
        const double w = S.weights[static_cast<std::size_t>(p)];
        if (w > best_weight || (w == best_weight && a < best_agg)) {
          best_weight = w;
          best_agg = a;
        }
      }
      if (best_agg >= 0) {
        agg.node_to_aggregate[static_cast<std::size_t>(v)] = best_agg;
        changed = true;
      }
    }
  }

  // Pass 3: anything still uncovered has no strong ties at all.
  for (index_t v = 0; v < n; ++v)
    if (!covered(v)) agg.node_to_aggregate[static_cast<std::size_t>(v)] = agg.n_aggregates++;

  return agg;
}

std::vector<index_t> aggregate_sizes(const Aggregation& agg) {
  std::vector<index_t> sizes(static_cast<std::size_t>(agg.n_aggregates), 0);
  for (index_t a : agg.node_to_aggregate) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

}  // namespace amglab
