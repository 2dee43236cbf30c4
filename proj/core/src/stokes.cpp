#include "amglab/stokes.hpp"

#include <cmath>
#include <map>
#include <string>

#include "amglab/dense_linalg.hpp"
#include "amglab/errors.hpp"

namespace amglab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Degree-5 symmetric 7-point rule on the reference triangle (0,0)-(1,0)-(0,1).
// Weights sum to the reference area 1/2; integrate via sum(w * f) * |detJ|.
struct TriRule {
  std::array<std::array<double, 2>, 7> points;
  std::array<double, 7> weights;
};

const TriRule& assembly_rule() {
  static const TriRule rule = [] {
    TriRule r;
    const double a1 = 0.059715871789769820, b1 = 0.470142064105115090;
    const double a2 = 0.797426985353087320, b2 = 0.101286507323456340;
    const double w1 = (155.0 + std::sqrt(15.0)) / 1200.0;
    const double w2 = (155.0 - std::sqrt(15.0)) / 1200.0;
    r.points = {{{1.0 / 3.0, 1.0 / 3.0},
                 {a1, b1},
                 {b1, a1},
                 {b1, b1},
                 {a2, b2},
                 {b2, a2},
                 {b2, b2}}};
    r.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    for (double& w : r.weights) w *= 0.5;
    return r;
  }();
  return rule;
}

// 8x8 Gauss-Legendre collapsed onto the triangle (Duffy map x=s(1-t), y=st,
// Jacobian s); resolves the non-polynomial error integrands far below
// discretization error.
struct ErrorRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
};

const ErrorRule& error_rule() {
  static const ErrorRule rule = [] {
    const std::array<double, 4> gl_x = {0.18343464249564980, 0.52553240991632899,
                                        0.79666647741362674, 0.96028985649753623};
    const std::array<double, 4> gl_w = {0.36268378337836198, 0.31370664587788729,
                                        0.22238103445337447, 0.10122853629037626};
    std::array<double, 8> s, w;
    for (int i = 0; i < 4; ++i) {
      s[static_cast<std::size_t>(4 + i)] = 0.5 + 0.5 * gl_x[static_cast<std::size_t>(i)];
      s[static_cast<std::size_t>(3 - i)] = 0.5 - 0.5 * gl_x[static_cast<std::size_t>(i)];
      w[static_cast<std::size_t>(4 + i)] = 0.5 * gl_w[static_cast<std::size_t>(i)];
      w[static_cast<std::size_t>(3 - i)] = 0.5 * gl_w[static_cast<std::size_t>(i)];
    }
    ErrorRule r;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const double si = s[static_cast<std::size_t>(i)], tj = s[static_cast<std::size_t>(j)];
        r.points.push_back({si * (1.0 - tj), si * tj});
        r.weights.push_back(w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * si);
      }
    }
    return r;
  }();
  return rule;
}

// 4-point Gauss-Legendre on [0,1] for Neumann edge integrals.
struct EdgeRule {
  std::array<double, 4> points;
  std::array<double, 4> weights;
};

const EdgeRule& edge_rule() {
  static const EdgeRule r = [] {
    EdgeRule e;
    const double a = 0.33998104358485626, b = 0.86113631159405258;
    const double wa = 0.65214515486254614, wb = 0.34785484513745385;
    e.points = {0.5 - 0.5 * b, 0.5 - 0.5 * a, 0.5 + 0.5 * a, 0.5 + 0.5 * b};
    e.weights = {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb};
    return e;
  }();
  return r;
}

// P2 basis on the reference triangle; local node order: vertices 0,1,2 then
// edge midpoints (0,1), (1,2), (2,0).
void p2_shape(double x, double y, std::array<double, 6>& N, std::array<std::array<double, 2>, 6>& dN) {
  const double l1 = 1.0 - x - y, l2 = x, l3 = y;
  N = {l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1),
       4 * l1 * l2, 4 * l2 * l3, 4 * l3 * l1};
  const double d1[2] = {-1.0, -1.0}, d2[2] = {1.0, 0.0}, d3[2] = {0.0, 1.0};
  for (int c = 0; c < 2; ++c) {
    dN[0][static_cast<std::size_t>(c)] = (4 * l1 - 1) * d1[c];
    dN[1][static_cast<std::size_t>(c)] = (4 * l2 - 1) * d2[c];
    dN[2][static_cast<std::size_t>(c)] = (4 * l3 - 1) * d3[c];
    dN[3][static_cast<std::size_t>(c)] = 4 * (l2 * d1[c] + l1 * d2[c]);
    dN[4][static_cast<std::size_t>(c)] = 4 * (l3 * d2[c] + l2 * d3[c]);
    dN[5][static_cast<std::size_t>(c)] = 4 * (l1 * d3[c] + l3 * d1[c]);
  }
}

void p1_shape(double x, double y, std::array<double, 3>& N) {
  N = {1.0 - x - y, x, y};
}
// P1 reference gradients are constant.
constexpr std::array<std::array<double, 2>, 3> kP1Grad = {{{-1, -1}, {1, 0}, {0, 1}}};

using EdgeMap = std::map<std::pair<index_t, index_t>, index_t>;

EdgeMap build_edge_map(const TriMesh& mesh) {
  EdgeMap edges;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      index_t a = tri[static_cast<std::size_t>(e)];
      index_t b = tri[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      edges.emplace(std::make_pair(a, b), 0);
    }
  }
  index_t id = 0;
  for (auto& [key, value] : edges) value = id++;
  return edges;
}

DofMap build_dof_map(const TriMesh& mesh, const EdgeMap& edges) {
  DofMap dof;
  dof.n_vertices = static_cast<index_t>(mesh.vertices.size());
  dof.n_edges = static_cast<index_t>(edges.size());
  dof.node_coords.resize(static_cast<std::size_t>(dof.n_scalar()));
  for (index_t v = 0; v < dof.n_vertices; ++v)
    dof.node_coords[static_cast<std::size_t>(v)] = mesh.vertices[static_cast<std::size_t>(v)];
  for (const auto& [key, id] : edges) {
    const auto& a = mesh.vertices[static_cast<std::size_t>(key.first)];
    const auto& b = mesh.vertices[static_cast<std::size_t>(key.second)];
    dof.node_coords[static_cast<std::size_t>(dof.n_vertices + id)] = {0.5 * (a[0] + b[0]),
                                                                      0.5 * (a[1] + b[1])};
  }
  std::vector<char> is_dirichlet(static_cast<std::size_t>(dof.n_scalar()), 0);
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::dirichlet) continue;
    index_t a = be.v0, b = be.v1;
    if (a > b) std::swap(a, b);
    const auto it = edges.find({a, b});
    if (it == edges.end())
      throw ConfigError("build_dof_map: boundary edge not present in the mesh");
    is_dirichlet[static_cast<std::size_t>(a)] = 1;
    is_dirichlet[static_cast<std::size_t>(b)] = 1;
    is_dirichlet[static_cast<std::size_t>(dof.n_vertices + it->second)] = 1;
  }
  dof.node_to_free.assign(static_cast<std::size_t>(dof.n_scalar()), -1);
  for (index_t k = 0; k < dof.n_scalar(); ++k) {
    if (is_dirichlet[static_cast<std::size_t>(k)]) {
      dof.dirichlet_nodes.push_back(k);
    } else {
      dof.node_to_free[static_cast<std::size_t>(k)] = static_cast<index_t>(dof.free_nodes.size());
      dof.free_nodes.push_back(k);
    }
  }
  return dof;
}

struct FullAssembly {
  SparseMatrix As;          // scalar velocity Laplacian, n_scalar x n_scalar
  SparseMatrix Bx, By;      // pressure x one velocity component, n_vertices x n_scalar
  std::vector<double> load; // full-ordering rhs (volume forcing + Neumann term)
};

FullAssembly assemble_full(const TriMesh& mesh, const EdgeMap& edges, const DofMap& dof,
                           const VectorField& forcing, const VectorField& g_neumann) {
  const index_t ns = dof.n_scalar();
  FullAssembly full;
  full.load.assign(static_cast<std::size_t>(dof.n_full()), 0.0);
  std::vector<Triplet> ta, tbx, tby;
  const TriRule& rule = assembly_rule();

  for (const auto& tri : mesh.triangles) {
    const auto& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const auto& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const auto& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double j00 = p1[0] - p0[0], j01 = p2[0] - p0[0];
    const double j10 = p1[1] - p0[1], j11 = p2[1] - p0[1];
    const double det = j00 * j11 - j01 * j10;
    // inv(J)^T rows map reference gradients to physical ones.
    const double i00 = j11 / det, i01 = -j10 / det;
    const double i10 = -j01 / det, i11 = j00 / det;

    std::array<index_t, 6> loc;
    loc[0] = tri[0];
    loc[1] = tri[1];
    loc[2] = tri[2];
    for (int e = 0; e < 3; ++e) {
      index_t a = tri[static_cast<std::size_t>(e)];
      index_t b = tri[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      loc[static_cast<std::size_t>(3 + e)] = dof.n_vertices + edges.at({a, b});
    }

    std::array<std::array<double, 6>, 6> a_loc{};
    std::array<std::array<std::array<double, 2>, 6>, 3> b_loc{};  // [p-node][u-node][component]
    std::array<std::array<double, 2>, 6> f_loc{};

    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double xq = rule.points[q][0], yq = rule.points[q][1];
      const double wq = rule.weights[q] * std::abs(det);
      std::array<double, 6> N;
      std::array<std::array<double, 2>, 6> dN;
      p2_shape(xq, yq, N, dN);
      std::array<std::array<double, 2>, 6> g;  // physical gradients
      for (int i = 0; i < 6; ++i) {
        g[static_cast<std::size_t>(i)][0] = i00 * dN[static_cast<std::size_t>(i)][0] + i01 * dN[static_cast<std::size_t>(i)][1];
        g[static_cast<std::size_t>(i)][1] = i10 * dN[static_cast<std::size_t>(i)][0] + i11 * dN[static_cast<std::size_t>(i)][1];
      }
      std::array<double, 3> Np;
      p1_shape(xq, yq, Np);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          a_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
              wq * (g[static_cast<std::size_t>(i)][0] * g[static_cast<std::size_t>(j)][0] +
                    g[static_cast<std::size_t>(i)][1] * g[static_cast<std::size_t>(j)][1]);
      for (int a = 0; a < 3; ++a)
        for (int j = 0; j < 6; ++j)
          for (int c = 0; c < 2; ++c)
            b_loc[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -=
                wq * Np[static_cast<std::size_t>(a)] * g[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
      const double px = p0[0] + j00 * xq + j01 * yq;
      const double py = p0[1] + j10 * xq + j11 * yq;
      const std::array<double, 2> fv = forcing ? forcing(px, py) : std::array<double, 2>{0.0, 0.0};
      for (int j = 0; j < 6; ++j)
        for (int c = 0; c < 2; ++c)
          f_loc[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] +=
              wq * fv[static_cast<std::size_t>(c)] * N[static_cast<std::size_t>(j)];
    }

    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        ta.push_back({loc[static_cast<std::size_t>(i)], loc[static_cast<std::size_t>(j)],
                      a_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 6; ++j) {
        tbx.push_back({tri[static_cast<std::size_t>(a)], loc[static_cast<std::size_t>(j)],
                       b_loc[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)][0]});
        tby.push_back({tri[static_cast<std::size_t>(a)], loc[static_cast<std::size_t>(j)],
                       b_loc[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)][1]});
      }
    for (int j = 0; j < 6; ++j) {
      full.load[static_cast<std::size_t>(loc[static_cast<std::size_t>(j)])] +=
          f_loc[static_cast<std::size_t>(j)][0];
      full.load[static_cast<std::size_t>(ns + loc[static_cast<std::size_t>(j)])] +=
          f_loc[static_cast<std::size_t>(j)][1];
    }
  }

  if (g_neumann) {
    const EdgeRule& erule = edge_rule();
    for (const auto& be : mesh.boundary_edges) {
      if (be.tag != BoundaryTag::neumann) continue;
      index_t a = be.v0, b = be.v1;
      if (a > b) std::swap(a, b);
      const index_t mid = dof.n_vertices + edges.at({a, b});
      const auto& pa = mesh.vertices[static_cast<std::size_t>(be.v0)];
      const auto& pb = mesh.vertices[static_cast<std::size_t>(be.v1)];
      const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
      for (std::size_t q = 0; q < erule.points.size(); ++q) {
        const double s = erule.points[q];
        const double w = erule.weights[q] * len;
        const double phi_a = (1 - s) * (1 - 2 * s);
        const double phi_b = s * (2 * s - 1);
        const double phi_m = 4 * s * (1 - s);
        const double px = pa[0] + s * (pb[0] - pa[0]);
        const double py = pa[1] + s * (pb[1] - pa[1]);
        const std::array<double, 2> gn = g_neumann(px, py);
        for (int c = 0; c < 2; ++c) {
          const index_t base = static_cast<index_t>(c) * ns;
          full.load[static_cast<std::size_t>(base + be.v0)] += w * gn[static_cast<std::size_t>(c)] * phi_a;
          full.load[static_cast<std::size_t>(base + be.v1)] += w * gn[static_cast<std::size_t>(c)] * phi_b;
          full.load[static_cast<std::size_t>(base + mid)] += w * gn[static_cast<std::size_t>(c)] * phi_m;
        }
      }
    }
  }

  full.As = from_triplets(ns, ns, ta);
  full.Bx = from_triplets(dof.n_vertices, ns, tbx);
  full.By = from_triplets(dof.n_vertices, ns, tby);
  return full;
}

}  // namespace

StokesSystem assemble_stokes(const TriMesh& mesh, const VectorField& g_dirichlet,
                             const VectorField& forcing, const VectorField& g_neumann) {
  validate_mesh(mesh);
  bool has_dirichlet = false, has_neumann = false;
  for (const auto& be : mesh.boundary_edges) {
    has_dirichlet |= be.tag == BoundaryTag::dirichlet;
    has_neumann |= be.tag == BoundaryTag::neumann;
  }
  if (!has_neumann)
    throw ConfigError(
        "assemble_stokes: no Neumann segment; the pressure is only determined up to a "
        "constant and the reduced system is singular. Use a bc_layout with a Neumann edge.");
  if (!has_dirichlet)
    throw ConfigError(
        "assemble_stokes: no Dirichlet segment; the velocity is not pinned. "
        "Use a bc_layout with a Dirichlet edge.");

  const EdgeMap edges = build_edge_map(mesh);
  StokesSystem sys;
  sys.dof_map = build_dof_map(mesh, edges);
  const DofMap& dof = sys.dof_map;
  const index_t ns = dof.n_scalar();
  const index_t nf = dof.n_free();
  const index_t np = dof.n_vertices;

  const FullAssembly full = assemble_full(mesh, edges, dof, forcing, g_neumann);

  // Dirichlet data at eliminated nodes.
  std::vector<double> gx(static_cast<std::size_t>(ns), 0.0), gy(static_cast<std::size_t>(ns), 0.0);
  for (index_t node : dof.dirichlet_nodes) {
    const auto& c = dof.node_coords[static_cast<std::size_t>(node)];
    const std::array<double, 2> g = g_dirichlet ? g_dirichlet(c[0], c[1]) : std::array<double, 2>{0.0, 0.0};
    gx[static_cast<std::size_t>(node)] = g[0];
    gy[static_cast<std::size_t>(node)] = g[1];
    sys.eliminated_dirichlet.push_back(node);
    sys.dirichlet_values.push_back(g[0]);
    sys.eliminated_dirichlet.push_back(ns + node);
    sys.dirichlet_values.push_back(g[1]);
  }

  sys.A_scalar = extract_submatrix(full.As, dof.free_nodes, dof.free_nodes);
  sys.A = block_diag({&sys.A_scalar, &sys.A_scalar});
  std::vector<index_t> all_p(static_cast<std::size_t>(np));
  for (index_t a = 0; a < np; ++a) all_p[static_cast<std::size_t>(a)] = a;
  const SparseMatrix Bx = extract_submatrix(full.Bx, all_p, dof.free_nodes);
  const SparseMatrix By = extract_submatrix(full.By, all_p, dof.free_nodes);
  {
    std::vector<Triplet> tb;
    tb.reserve(static_cast<std::size_t>(Bx.nnz() + By.nnz()));
    for (index_t i = 0; i < np; ++i) {
      for (index_t k = Bx.row_offsets[static_cast<std::size_t>(i)];
           k < Bx.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
        tb.push_back({i, Bx.col_indices[static_cast<std::size_t>(k)], Bx.values[static_cast<std::size_t>(k)]});
      for (index_t k = By.row_offsets[static_cast<std::size_t>(i)];
           k < By.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
        tb.push_back({i, nf + By.col_indices[static_cast<std::size_t>(k)], By.values[static_cast<std::size_t>(k)]});
    }
    sys.B = from_triplets(np, 2 * nf, tb);
  }

  {
    const index_t n = 2 * nf + np;
    std::vector<Triplet> tk;
    tk.reserve(static_cast<std::size_t>(sys.A.nnz() + 2 * sys.B.nnz()));
    for (index_t i = 0; i < sys.A.nrows; ++i)
      for (index_t k = sys.A.row_offsets[static_cast<std::size_t>(i)];
           k < sys.A.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
        tk.push_back({i, sys.A.col_indices[static_cast<std::size_t>(k)], sys.A.values[static_cast<std::size_t>(k)]});
    for (index_t i = 0; i < sys.B.nrows; ++i)
      for (index_t k = sys.B.row_offsets[static_cast<std::size_t>(i)];
           k < sys.B.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
        const index_t j = sys.B.col_indices[static_cast<std::size_t>(k)];
        const double v = sys.B.values[static_cast<std::size_t>(k)];
        tk.push_back({2 * nf + i, j, v});
        tk.push_back({j, 2 * nf + i, v});
      }
    sys.K = from_triplets(n, n, tk);
  }

  // rhs: forcing/Neumann on free rows, minus the Dirichlet lifting.
  sys.rhs.assign(static_cast<std::size_t>(2 * nf + np), 0.0);
  for (index_t r = 0; r < nf; ++r) {
    const index_t node = dof.free_nodes[static_cast<std::size_t>(r)];
    sys.rhs[static_cast<std::size_t>(r)] = full.load[static_cast<std::size_t>(node)];
    sys.rhs[static_cast<std::size_t>(nf + r)] = full.load[static_cast<std::size_t>(ns + node)];
  }
  const SparseMatrix As_fd = extract_submatrix(full.As, dof.free_nodes, dof.dirichlet_nodes);
  const SparseMatrix Bx_d = extract_submatrix(full.Bx, all_p, dof.dirichlet_nodes);
  const SparseMatrix By_d = extract_submatrix(full.By, all_p, dof.dirichlet_nodes);
  std::vector<double> gxd(dof.dirichlet_nodes.size()), gyd(dof.dirichlet_nodes.size());
  for (std::size_t d = 0; d < dof.dirichlet_nodes.size(); ++d) {
    gxd[d] = gx[static_cast<std::size_t>(dof.dirichlet_nodes[d])];
    gyd[d] = gy[static_cast<std::size_t>(dof.dirichlet_nodes[d])];
  }
  const std::vector<double> lift_x = spmv(As_fd, gxd);
  const std::vector<double> lift_y = spmv(As_fd, gyd);
  for (index_t r = 0; r < nf; ++r) {
    sys.rhs[static_cast<std::size_t>(r)] -= lift_x[static_cast<std::size_t>(r)];
    sys.rhs[static_cast<std::size_t>(nf + r)] -= lift_y[static_cast<std::size_t>(r)];
  }
  const std::vector<double> lift_px = spmv(Bx_d, gxd);
  const std::vector<double> lift_py = spmv(By_d, gyd);
  for (index_t a = 0; a < np; ++a)
    sys.rhs[static_cast<std::size_t>(2 * nf + a)] -=
        lift_px[static_cast<std::size_t>(a)] + lift_py[static_cast<std::size_t>(a)];

  return sys;
}

SparseMatrix assemble_pressure_laplacian(const TriMesh& mesh) {
  validate_mesh(mesh);
  std::vector<Triplet> trips;
  for (const auto& tri : mesh.triangles) {
    const auto& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const auto& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const auto& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double j00 = p1[0] - p0[0], j01 = p2[0] - p0[0];
    const double j10 = p1[1] - p0[1], j11 = p2[1] - p0[1];
    const double det = j00 * j11 - j01 * j10;
    const double i00 = j11 / det, i01 = -j10 / det;
    const double i10 = -j01 / det, i11 = j00 / det;
    // Constant gradients: the element integral is area * (g_i . g_j).
    std::array<std::array<double, 2>, 3> g;
    for (int i = 0; i < 3; ++i) {
      g[static_cast<std::size_t>(i)][0] =
          i00 * kP1Grad[static_cast<std::size_t>(i)][0] + i01 * kP1Grad[static_cast<std::size_t>(i)][1];
      g[static_cast<std::size_t>(i)][1] =
          i10 * kP1Grad[static_cast<std::size_t>(i)][0] + i11 * kP1Grad[static_cast<std::size_t>(i)][1];
    }
    const double area = 0.5 * std::abs(det);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.push_back({tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                         area * (g[static_cast<std::size_t>(i)][0] * g[static_cast<std::size_t>(j)][0] +
                                 g[static_cast<std::size_t>(i)][1] * g[static_cast<std::size_t>(j)][1])});
  }
  const index_t nv = static_cast<index_t>(mesh.vertices.size());
  return from_triplets(nv, nv, trips);
}

std::vector<double> expand_velocity(const StokesSystem& system, const std::vector<double>& reduced) {
  const DofMap& dof = system.dof_map;
  const index_t ns = dof.n_scalar();
  const index_t nf = dof.n_free();
  if (static_cast<index_t>(reduced.size()) != system.size())
    throw DimensionError("expand_velocity: reduced vector has wrong length");
  std::vector<double> u(static_cast<std::size_t>(2 * ns), 0.0);
  for (index_t r = 0; r < nf; ++r) {
    const index_t node = dof.free_nodes[static_cast<std::size_t>(r)];
    u[static_cast<std::size_t>(node)] = reduced[static_cast<std::size_t>(r)];
    u[static_cast<std::size_t>(ns + node)] = reduced[static_cast<std::size_t>(nf + r)];
  }
  for (std::size_t d = 0; d < system.eliminated_dirichlet.size(); ++d)
    u[static_cast<std::size_t>(system.eliminated_dirichlet[d])] = system.dirichlet_values[d];
  return u;
}

std::array<double, 2> discretization_error(const StokesSystem& system, const TriMesh& mesh,
                                           const VectorField& exact_u, const ScalarField& exact_p) {
  const LuFactor lu(to_dense(system.K));
  const std::vector<double> sol = lu.solve(system.rhs);
  const std::vector<double> u_full = expand_velocity(system, sol);

  const EdgeMap edges = build_edge_map(mesh);
  const DofMap& dof = system.dof_map;
  const index_t ns = dof.n_scalar();
  const index_t nf = dof.n_free();
  const ErrorRule& rule = error_rule();

  double err_u = 0.0, err_p = 0.0;
  for (const auto& tri : mesh.triangles) {
    const auto& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const auto& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const auto& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double j00 = p1[0] - p0[0], j01 = p2[0] - p0[0];
    const double j10 = p1[1] - p0[1], j11 = p2[1] - p0[1];
    const double det = j00 * j11 - j01 * j10;
    std::array<index_t, 6> loc;
    loc[0] = tri[0];
    loc[1] = tri[1];
    loc[2] = tri[2];
    for (int e = 0; e < 3; ++e) {
      index_t a = tri[static_cast<std::size_t>(e)];
      index_t b = tri[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      loc[static_cast<std::size_t>(3 + e)] = dof.n_vertices + edges.at({a, b});
    }
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double xq = rule.points[q][0], yq = rule.points[q][1];
      const double w = rule.weights[q] * std::abs(det);
      std::array<double, 6> N;
      std::array<std::array<double, 2>, 6> dN;
      p2_shape(xq, yq, N, dN);
      std::array<double, 3> Np;
      p1_shape(xq, yq, Np);
      const double px = p0[0] + j00 * xq + j01 * yq;
      const double py = p0[1] + j10 * xq + j11 * yq;
      double uhx = 0.0, uhy = 0.0, ph = 0.0;
      for (int i = 0; i < 6; ++i) {
        uhx += N[static_cast<std::size_t>(i)] * u_full[static_cast<std::size_t>(loc[static_cast<std::size_t>(i)])];
        uhy += N[static_cast<std::size_t>(i)] * u_full[static_cast<std::size_t>(ns + loc[static_cast<std::size_t>(i)])];
      }
      for (int a = 0; a < 3; ++a)
        ph += Np[static_cast<std::size_t>(a)] *
              sol[static_cast<std::size_t>(2 * nf + tri[static_cast<std::size_t>(a)])];
      const std::array<double, 2> ue = exact_u(px, py);
      const double pe = exact_p(px, py);
      err_u += w * ((uhx - ue[0]) * (uhx - ue[0]) + (uhy - ue[1]) * (uhy - ue[1]));
      err_p += w * (ph - pe) * (ph - pe);
    }
  }
  return {std::sqrt(err_u), std::sqrt(err_p)};
}

double divergence_residual(const StokesSystem& system, const TriMesh& mesh,
                           const std::vector<double>& reduced_solution) {
  const EdgeMap edges = build_edge_map(mesh);
  const DofMap& dof = system.dof_map;
  const FullAssembly full = assemble_full(mesh, edges, dof, nullptr, nullptr);
  const std::vector<double> u = expand_velocity(system, reduced_solution);
  const index_t ns = dof.n_scalar();
  std::vector<double> ux(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(ns));
  std::vector<double> uy(u.begin() + static_cast<std::ptrdiff_t>(ns), u.end());
  std::vector<double> bu = spmv(full.Bx, ux);
  axpy(1.0, spmv(full.By, uy), bu);
  return norm2(bu);
}

VectorField lid_driven_boundary() {
  return [](double /*x*/, double y) -> std::array<double, 2> {
    return y >= 1.0 - 1e-12 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 0.0};
  };
}

VectorField zero_field() {
  return [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
}

VectorField reference_velocity() {
  return [](double x, double y) -> std::array<double, 2> {
    const double sx = std::sin(kPi * x), sy2 = std::sin(2 * kPi * y);
    const double sy = std::sin(kPi * y), sx2 = std::sin(2 * kPi * x);
    return {kPi * sx * sx * sy2, -kPi * sx2 * sy * sy};
  };
}

ScalarField reference_pressure() {
  return [](double x, double y) { return std::sin(kPi * x) * std::cos(kPi * y); };
}

VectorField reference_forcing() {
  return [](double x, double y) -> std::array<double, 2> {
    const double p3 = kPi * kPi * kPi;
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    const double s2x = std::sin(2 * kPi * x), c2x = std::cos(2 * kPi * x);
    const double s2y = std::sin(2 * kPi * y), c2y = std::cos(2 * kPi * y);
    const double lap_ux = 2 * p3 * s2y * c2x - 4 * p3 * sx * sx * s2y;
    const double lap_uy = 4 * p3 * s2x * sy * sy - 2 * p3 * s2x * c2y;
    return {-lap_ux + kPi * cx * cy, -lap_uy - kPi * sx * sy};
  };
}

VectorField reference_neumann() {
  return [](double /*x*/, double y) -> std::array<double, 2> {
    const double sy = std::sin(kPi * y);
    return {0.0, -2 * kPi * kPi * sy * sy};
  };
}

}  // namespace amglab
