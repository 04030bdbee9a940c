#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vkplate/geometry.hpp"

namespace vkplate {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MeshFamily { triangular, square, concave, voronoi_structured, voronoi_random };
enum class Domain { unit_square, l_shape };

std::string to_string(MeshFamily f);
std::string to_string(Domain d);
MeshFamily mesh_family_from_string(const std::string& s);
Domain domain_from_string(const std::string& s);

inline double domain_area(Domain d) { return d == Domain::unit_square ? 1.0 : 3.0; }

struct MeshEdge {
  int v0 = -1, v1 = -1;      // endpoint vertex ids
  int cell0 = -1, cell1 = -1;  // adjacent cells; cell1 < 0 on the boundary
  Vec2 normal = Vec2::Zero();  // fixed global unit normal; outward on boundary edges
};

/// Polygonal mesh with full edge topology. Immutable after construction;
/// all fields are plain data so tests can assemble meshes by hand and call
/// finalize_topology().
struct PolygonalMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;  // CCW vertex rings
  std::vector<MeshEdge> edges;
  std::vector<std::vector<int>> cell_edges;  // edge id for ring position k (ring[k] -> ring[k+1])
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;
  double h_max = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  std::vector<Vec2> cell_ring(int c) const {
    std::vector<Vec2> r;
    r.reserve(cells[c].size());
    for (int v : cells[c]) r.push_back(vertices[v]);
    return r;
  }
};

/// Builds edges, boundary flags and h_max from vertices+cells and enforces the
/// mesh invariants (simple CCW cells, 1-or-2 cells per edge, Euler relation).
/// Throws MeshError naming the offending entity otherwise.
void finalize_topology(PolygonalMesh& mesh);

/// Shape-regularity measurements for the mesh assumptions: edge-length/diameter
/// ratio and star-shapedness (kernel inradius). Ratios are relative to the
/// cell diameter, so both lie in [0,1].
struct MeshQualityReport {
  double min_edge_to_diameter_ratio = 1.0;
  double min_kernel_radius_to_diameter = 1.0;
  int worst_cell_id = -1;  // cell attaining the kernel minimum
};

MeshQualityReport validate(const PolygonalMesh& mesh);

/// Deterministic mesh generators for the five families. `n` is the number of
/// subdivisions per unit square (Voronoi families use n*n seed points).
/// Voronoi families require the unit square; the L-shape is triangular-only.
PolygonalMesh generate_mesh(MeshFamily family, Domain domain, int n, std::uint64_t seed = 0,
                            int lloyd_iters = 3);

/// JSON mesh format: {"vertices":[[x,y],...],"cells":[[i,...],...]}.
/// Vertex coordinates round-trip bit-exactly; boundary is re-inferred from
/// edge multiplicity on load.
void save_mesh(const PolygonalMesh& mesh, const std::filesystem::path& path);
PolygonalMesh load_mesh(const std::filesystem::path& path);

/// Kernel inradius of a simple polygon: radius of the largest disk inside the
/// intersection of the inward edge half-planes (0 if the kernel is empty).
double polygon_kernel_inradius(std::span<const Vec2> ring);

}  // namespace vkplate
