#include "vkplate/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

using namespace vkplate;

namespace {

double mesh_area(const PolygonalMesh& mesh) {
  double area = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) area += polygon_signed_area(mesh.cell_ring(c));
  return area;
}

void check_invariants(const PolygonalMesh& mesh, double expected_area) {
  CHECK(mesh.n_vertices() - mesh.n_edges() + mesh.n_cells() == 1);
  CHECK(mesh_area(mesh) == doctest::Approx(expected_area).epsilon(1e-10));
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(polygon_signed_area(mesh.cell_ring(c)) > 0.0);
  int boundary_edges = 0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto& edge = mesh.edges[e];
    CHECK(edge.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    if (edge.cell1 < 0) ++boundary_edges;
  }
  CHECK(boundary_edges > 0);
}

// Sign of outward-normal(cell, edge) . stored normal.
double sigma_of(const PolygonalMesh& mesh, int c, int k) {
  const auto& ring = mesh.cells[c];
  const int nv = static_cast<int>(ring.size());
  const Vec2 a = mesh.vertices[ring[k]];
  const Vec2 b = mesh.vertices[ring[(k + 1) % nv]];
  const Vec2 t = (b - a).normalized();
  const Vec2 outward(t.y(), -t.x());
  return outward.dot(mesh.edges[mesh.cell_edges[c][k]].normal) > 0 ? 1.0 : -1.0;
}

}  // namespace

TEST_CASE("square family 2x2") {
  const PolygonalMesh mesh = generate_mesh(MeshFamily::square, Domain::unit_square, 2);
  CHECK(mesh.n_cells() == 4);
  CHECK(mesh.n_vertices() == 9);
  CHECK(mesh.n_edges() == 12);
  CHECK(mesh.h_max == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  check_invariants(mesh, 1.0);
}

TEST_CASE("triangular family 2x2") {
  const PolygonalMesh mesh = generate_mesh(MeshFamily::triangular, Domain::unit_square, 2);
  CHECK(mesh.n_cells() == 8);
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(polygon_signed_area(mesh.cell_ring(c)) == doctest::Approx(0.125).epsilon(1e-14));
  check_invariants(mesh, 1.0);
}

TEST_CASE("concave family splits every grid square into two pentagons") {
  const PolygonalMesh mesh = generate_mesh(MeshFamily::concave, Domain::unit_square, 3);
  CHECK(mesh.n_cells() == 18);
  check_invariants(mesh, 1.0);
  // one reflex cell per square: kernel strictly positive anyway (star-shaped)
  const MeshQualityReport rep = validate(mesh);
  CHECK(rep.min_kernel_radius_to_diameter > 0.0);
}

TEST_CASE("L-shape triangulation") {
  const PolygonalMesh mesh = generate_mesh(MeshFamily::triangular, Domain::l_shape, 2);
  CHECK(mesh.n_cells() == 3 * 2 * 2 * 2);
  CHECK(mesh.h_max == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  check_invariants(mesh, 3.0);
}

TEST_CASE("voronoi families") {
  SUBCASE("random: deterministic, areas sum to 1") {
    const PolygonalMesh mesh =
        generate_mesh(MeshFamily::voronoi_random, Domain::unit_square, 8, 42, 3);
    CHECK(mesh.n_cells() == 64);
    check_invariants(mesh, 1.0);
    const PolygonalMesh again =
        generate_mesh(MeshFamily::voronoi_random, Domain::unit_square, 8, 42, 3);
    REQUIRE(again.n_vertices() == mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      CHECK(mesh.vertices[v].x() == again.vertices[v].x());
      CHECK(mesh.vertices[v].y() == again.vertices[v].y());
    }
    CHECK(mesh.cells == again.cells);
    const PolygonalMesh other =
        generate_mesh(MeshFamily::voronoi_random, Domain::unit_square, 8, 43, 3);
    CHECK(mesh_area(other) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("structured: deterministic pattern, valid") {
    const PolygonalMesh mesh =
        generate_mesh(MeshFamily::voronoi_structured, Domain::unit_square, 6);
    CHECK(mesh.n_cells() == 36);
    check_invariants(mesh, 1.0);
  }
  SUBCASE("unsupported pairs are rejected") {
    CHECK_THROWS_AS(generate_mesh(MeshFamily::voronoi_random, Domain::l_shape, 4), MeshError);
    CHECK_THROWS_AS(generate_mesh(MeshFamily::square, Domain::l_shape, 4), MeshError);
    CHECK_THROWS_AS(generate_mesh(MeshFamily::triangular, Domain::unit_square, 0), MeshError);
  }
}

TEST_CASE("refinement monotonicity for structured families") {
  for (const MeshFamily fam :
       {MeshFamily::triangular, MeshFamily::square, MeshFamily::concave}) {
    const double h1 = generate_mesh(fam, Domain::unit_square, 2).h_max;
    const double h2 = generate_mesh(fam, Domain::unit_square, 4).h_max;
    const double h3 = generate_mesh(fam, Domain::unit_square, 8).h_max;
    CHECK(h2 < h1);
    CHECK(h3 < h2);
  }
}

TEST_CASE("interior edges are seen with opposite orientations") {
  const PolygonalMesh mesh = generate_mesh(MeshFamily::concave, Domain::unit_square, 2);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto& edge = mesh.edges[e];
    if (edge.cell1 < 0) continue;
    double product = 1.0;
    for (const int c : {edge.cell0, edge.cell1}) {
      const auto& ce = mesh.cell_edges[c];
      for (std::size_t k = 0; k < ce.size(); ++k)
        if (ce[k] == e) product *= sigma_of(mesh, c, static_cast<int>(k));
    }
    CHECK(product == -1.0);
  }
}

TEST_CASE("quality report") {
  SUBCASE("single unit-square cell") {
    PolygonalMesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.cells = {{0, 1, 2, 3}};
    finalize_topology(mesh);
    const MeshQualityReport rep = validate(mesh);
    CHECK(rep.min_edge_to_diameter_ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(rep.min_kernel_radius_to_diameter ==
          doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("concave dart is star-shaped: kernel radius positive") {
    const std::vector<Vec2> dart = {{0.0, 0.0}, {0.5, 0.0}, {0.25, 0.5}, {0.5, 1.0}, {0.0, 1.0}};
    CHECK(polygon_kernel_inradius(dart) > 0.0);
    // non-star-shaped comb has an empty kernel
    const std::vector<Vec2> comb = {{0, 0}, {4, 0}, {4, 3}, {3, 3}, {3, 1},
                                    {2, 1}, {2, 3},  {1, 3},  {1, 1}, {0, 1}};
    CHECK(polygon_kernel_inradius(comb) == 0.0);
  }
  SUBCASE("degenerate cell with repeated vertex is rejected") {
    PolygonalMesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.cells = {{0, 1, 1, 2, 3}};
    CHECK_THROWS_AS(finalize_topology(mesh), MeshError);
  }
}

TEST_CASE("mesh file round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vkplate_mesh_test";
  fs::create_directories(dir);

  SUBCASE("bit-exact round trip") {
    const PolygonalMesh mesh =
        generate_mesh(MeshFamily::voronoi_random, Domain::unit_square, 5, 11, 2);
    const fs::path file = dir / "roundtrip.json";
    save_mesh(mesh, file);
    const PolygonalMesh loaded = load_mesh(file);
    REQUIRE(loaded.n_vertices() == mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      CHECK(loaded.vertices[v].x() == mesh.vertices[v].x());
      CHECK(loaded.vertices[v].y() == mesh.vertices[v].y());
    }
    CHECK(loaded.cells == mesh.cells);
    CHECK(loaded.h_max == mesh.h_max);
  }
  SUBCASE("out-of-range vertex index is a load error") {
    const fs::path file = dir / "bad_index.json";
    std::ofstream(file) << R"({"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,7]]})";
    CHECK_THROWS_AS(load_mesh(file), MeshError);
  }
  SUBCASE("clockwise cell is a load error naming the cell") {
    const fs::path file = dir / "clockwise.json";
    std::ofstream(file) << R"({"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,2,1]]})";
    try {
      load_mesh(file);
      FAIL("expected MeshError");
    } catch (const MeshError& e) {
      CHECK(std::string(e.what()).find("cell 0") != std::string::npos);
    }
  }
  SUBCASE("parse error carries diagnostics") {
    const fs::path file = dir / "invalid.json";
    std::ofstream(file) << "{\"vertices\": [[0, oops";
    CHECK_THROWS_AS(load_mesh(file), MeshError);
  }
}
