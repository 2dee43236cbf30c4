#include "amglab/mesh.hpp"

#include <map>
#include <string>

#include "amglab/errors.hpp"

namespace amglab {

TriMesh build_structured_mesh(index_t n, BcLayout layout) {
  if (n < 1) throw ConfigError("build_structured_mesh: need n >= 1 cells per side");
  TriMesh mesh;
  const index_t stride = n + 1;
  auto vid = [stride](index_t i, index_t j) { return j * stride + i; };
  mesh.vertices.reserve(static_cast<std::size_t>(stride * stride));
  for (index_t j = 0; j <= n; ++j)
    for (index_t i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / static_cast<double>(n),
                               static_cast<double>(j) / static_cast<double>(n)});
  mesh.triangles.reserve(static_cast<std::size_t>(2 * n * n));
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < n; ++i) {
      const index_t v00 = vid(i, j), v10 = vid(i + 1, j);
      const index_t v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  auto tag_of = [layout](bool on_right) {
    switch (layout) {
      case BcLayout::dirichlet_left_bottom_top:
        return on_right ? BoundaryTag::neumann : BoundaryTag::dirichlet;
      case BcLayout::all_dirichlet:
        return BoundaryTag::dirichlet;
      case BcLayout::all_neumann:
        return BoundaryTag::neumann;
    }
    throw ConfigError("build_structured_mesh: unknown bc layout");
  };
  for (index_t i = 0; i < n; ++i) {  // bottom and top
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), tag_of(false)});
    mesh.boundary_edges.push_back({vid(i, n), vid(i + 1, n), tag_of(false)});
  }
  for (index_t j = 0; j < n; ++j) {  // left and right
    mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), tag_of(false)});
    mesh.boundary_edges.push_back({vid(n, j), vid(n, j + 1), tag_of(true)});
  }
  return mesh;
}

double triangle_signed_area(const TriMesh& mesh, index_t t) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const auto& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
  const auto& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
  const auto& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void validate_mesh(const TriMesh& mesh) {
  for (index_t t = 0; t < static_cast<index_t>(mesh.triangles.size()); ++t) {
    if (triangle_signed_area(mesh, t) <= 0.0)
      throw ConfigError("validate_mesh: non-positive area in triangle " + std::to_string(t));
    for (index_t v : mesh.triangles[static_cast<std::size_t>(t)])
      if (v < 0 || v >= static_cast<index_t>(mesh.vertices.size()))
        throw ConfigError("validate_mesh: vertex index out of range in triangle " +
                          std::to_string(t));
  }
  // Edge incidence: boundary edges in exactly one triangle, interior in two.
  std::map<std::pair<index_t, index_t>, int> edge_count;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      index_t a = tri[static_cast<std::size_t>(e)];
      index_t b = tri[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2)
      throw ConfigError("validate_mesh: edge shared by more than two triangles");
  }
  for (const auto& be : mesh.boundary_edges) {
    index_t a = be.v0, b = be.v1;
    if (a > b) std::swap(a, b);
    const auto it = edge_count.find({a, b});
    if (it == edge_count.end() || it->second != 1)
      throw ConfigError("validate_mesh: tagged boundary edge is not a one-triangle edge");
  }
  index_t boundary_total = 0;
  for (const auto& [edge, count] : edge_count)
    if (count == 1) ++boundary_total;
  if (boundary_total != static_cast<index_t>(mesh.boundary_edges.size()))
    throw ConfigError("validate_mesh: untagged boundary edges present");
}

}  // namespace amglab
