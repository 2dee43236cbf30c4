#pragma once

#include <array>
#include <vector>

#include "amglab/sparse.hpp"

namespace amglab {

/// Boundary-condition layout of the unit square.
/// The saddle-point system needs at least one Dirichlet and one Neumann
/// segment to be nonsingular; the degenerate layouts exist so assembly can
/// reject them with a pointed error.
enum class BcLayout {
  dirichlet_left_bottom_top,  // default: Neumann on the right edge
  all_dirichlet,              // pressure determined only up to a constant
  all_neumann,                // velocity not pinned
};

enum class BoundaryTag { dirichlet, neumann };

struct BoundaryEdge {
  index_t v0;
  index_t v1;
  BoundaryTag tag;
};

/// Conforming triangulation of the unit square.
/// Invariants: every triangle is counterclockwise (positive signed area);
/// each boundary edge lies in exactly one triangle, interior edges in two.
struct TriMesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<index_t, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
};

/// n x n cells, each split along the (0,0)-(1,1) diagonal: (n+1)^2 vertices,
/// 2n^2 triangles, signed areas all 1/(2n^2). Boundary tags per `layout`.
TriMesh build_structured_mesh(index_t n, BcLayout layout = BcLayout::dirichlet_left_bottom_top);

double triangle_signed_area(const TriMesh& mesh, index_t t);

/// Checks the TriMesh invariants; throws ConfigError naming the first violation.
void validate_mesh(const TriMesh& mesh);

}  // namespace amglab
