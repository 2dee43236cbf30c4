#pragma once

#include <vector>

#include "amglab/strength.hpp"

namespace amglab {

// Disjoint cover of the nodes by aggregates; every node belongs to exactly
// one aggregate and every aggregate is connected in the strength graph.
struct Aggregation {
  std::vector<index_t> node_to_aggregate;
  index_t n_aggregates = 0;
};

// Greedy three-pass aggregation. Pass 1 repeatedly seeds an aggregate (seed
// plus its strong neighbors) at the eligible node with the most strong
// neighbors, where eligible means the node and its whole strong neighborhood
// are uncovered; ties go to the lowest index. Pass 2 attaches each remaining
// node to the adjacent aggregate behind its strongest connection. Pass 3
// turns isolated leftovers into singletons.
Aggregation standard_aggregation(const StrengthGraph& S);

// Aggregate sizes, indexed by aggregate id.
std::vector<index_t> aggregate_sizes(const Aggregation& agg);

}  // namespace amglab
