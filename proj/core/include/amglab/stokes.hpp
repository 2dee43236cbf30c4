#pragma once

#include <array>
#include <functional>
#include <vector>

#include "amglab/mesh.hpp"
#include "amglab/sparse.hpp"

namespace amglab {

using VectorField = std::function<std::array<double, 2>(double, double)>;
using ScalarField = std::function<double(double, double)>;

/// Taylor-Hood degree-of-freedom bookkeeping.
/// Scalar P2 nodes are the vertices followed by edge midpoints (edges sorted by
/// vertex pair). Global ordering: all u_x nodes, all u_y nodes, then pressure
/// vertices, so every operator block is contiguous.
struct DofMap {
  index_t n_vertices = 0;
  index_t n_edges = 0;
  std::vector<std::array<double, 2>> node_coords;  // size n_scalar()

  std::vector<index_t> dirichlet_nodes;  // scalar P2 nodes on the Dirichlet boundary
  std::vector<index_t> free_nodes;       // ascending complement
  std::vector<index_t> node_to_free;     // -1 for Dirichlet nodes

  index_t n_scalar() const { return n_vertices + n_edges; }
  index_t n_free() const { return static_cast<index_t>(free_nodes.size()); }
  /// Size of the full (unreduced) velocity+pressure ordering.
  index_t n_full() const { return 2 * n_scalar() + n_vertices; }
  /// Size of the reduced system.
  index_t n_reduced() const { return 2 * n_free() + n_vertices; }
};

/// Reduced saddle-point system K = [[A, B^T], [B, 0]] with Dirichlet velocity
/// DoFs eliminated symmetrically. A is block-diagonal over the two velocity
/// components with identical scalar blocks A_scalar.
struct StokesSystem {
  SparseMatrix K;         // n_reduced x n_reduced
  SparseMatrix A;         // velocity-velocity block view
  SparseMatrix A_scalar;  // one component of A
  SparseMatrix B;         // pressure-velocity block view
  std::vector<double> rhs;
  DofMap dof_map;
  std::vector<index_t> eliminated_dirichlet;  // full-ordering velocity DoF ids
  std::vector<double> dirichlet_values;       // boundary values, same order

  index_t size() const { return K.nrows; }
  index_t n_velocity() const { return 2 * dof_map.n_free(); }
  index_t n_pressure() const { return dof_map.n_vertices; }
};

/// Assembles the Taylor-Hood Stokes system on `mesh`:
/// a(u,v) = integral of grad u : grad v, b(p,v) = -integral of p div v,
/// rhs F(v) = integral of f.v plus the Neumann boundary term and the Dirichlet
/// lifting. Throws ConfigError when the mesh has no Dirichlet or no Neumann
/// segment (either way the reduced system would be singular).
StokesSystem assemble_stokes(const TriMesh& mesh, const VectorField& g_dirichlet,
                             const VectorField& forcing,
                             const VectorField& g_neumann = nullptr);

/// P1 stiffness matrix on the pressure vertices, natural boundary everywhere.
/// Singular (constant nullspace) by construction; used as the coarsening
/// auxiliary operator for the pressure field.
SparseMatrix assemble_pressure_laplacian(const TriMesh& mesh);

/// Solves the reduced system directly and returns (velocity L2, pressure L2)
/// errors against the exact fields, integrated with a high-order quadrature.
std::array<double, 2> discretization_error(const StokesSystem& system, const TriMesh& mesh,
                                           const VectorField& exact_u, const ScalarField& exact_p);

/// Full-ordering velocity coefficient vector (free values from `reduced`,
/// Dirichlet values from the stored boundary data).
std::vector<double> expand_velocity(const StokesSystem& system, const std::vector<double>& reduced);

/// Residual of the incompressibility constraint: ||B_full u_full||_2 where
/// B_full includes the eliminated Dirichlet columns.
double divergence_residual(const StokesSystem& system, const TriMesh& mesh,
                           const std::vector<double>& reduced_solution);

// Reference problems shared by tests and the experiment harness.

/// Lid-driven cavity data: g_D = (1,0) on the top edge, zero elsewhere, f = 0.
VectorField lid_driven_boundary();
VectorField zero_field();

/// Smooth reference pair: u = (pi sin^2(pi x) sin(2 pi y), -pi sin(2 pi x) sin^2(pi y)),
/// p = sin(pi x) cos(pi y); u is divergence-free and vanishes on the whole boundary.
VectorField reference_velocity();
ScalarField reference_pressure();
/// f = -laplace(u) + grad(p) for the reference pair.
VectorField reference_forcing();
/// (grad u - p I) n on the x=1 edge for the reference pair.
VectorField reference_neumann();

}  // namespace amglab
