#include "vkplate/mesh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace vkplate {

std::string to_string(MeshFamily f) {
  switch (f) {
    case MeshFamily::triangular: return "triangular";
    case MeshFamily::square: return "square";
    case MeshFamily::concave: return "concave";
    case MeshFamily::voronoi_structured: return "voronoi-structured";
    case MeshFamily::voronoi_random: return "voronoi-random";
  }
  return "?";
}

std::string to_string(Domain d) { return d == Domain::unit_square ? "unit-square" : "l-shape"; }

MeshFamily mesh_family_from_string(const std::string& s) {
  if (s == "triangular") return MeshFamily::triangular;
  if (s == "square") return MeshFamily::square;
  if (s == "concave") return MeshFamily::concave;
  if (s == "voronoi-structured" || s == "voronoi_structured") return MeshFamily::voronoi_structured;
  if (s == "voronoi-random" || s == "voronoi_random") return MeshFamily::voronoi_random;
  throw MeshError("unknown mesh family '" + s + "'");
}

Domain domain_from_string(const std::string& s) {
  if (s == "unit-square" || s == "unit_square") return Domain::unit_square;
  if (s == "l-shape" || s == "l_shape") return Domain::l_shape;
  throw MeshError("unknown domain '" + s + "'");
}

void finalize_topology(PolygonalMesh& mesh) {
  const int nv = mesh.n_vertices();
  const int nc = mesh.n_cells();
  if (nv < 3 || nc < 1) throw MeshError("mesh needs at least 3 vertices and 1 cell");

  mesh.edges.clear();
  mesh.cell_edges.assign(nc, {});
  mesh.boundary_vertex.assign(nv, false);
  mesh.boundary_edge.clear();
  mesh.h_max = 0.0;

  for (int c = 0; c < nc; ++c) {
    const auto& ring = mesh.cells[c];
    if (ring.size() < 3) throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    std::vector<int> sorted(ring);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw MeshError("cell " + std::to_string(c) + " repeats a vertex");
    for (int v : ring)
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) +
                        " out of range");
    const auto coords = mesh.cell_ring(c);
    if (polygon_signed_area(coords) <= 0.0)
      throw MeshError("cell " + std::to_string(c) + " is clockwise or degenerate");
    if (!polygon_is_simple(coords))
      throw MeshError("cell " + std::to_string(c) + " is not a simple polygon");
    mesh.h_max = std::max(mesh.h_max, polygon_diameter(coords));
  }

  // Edge identification by vertex pair; first-seen cell fixes the global normal.
  std::unordered_map<std::uint64_t, int> edge_ids;
  auto pack = [nv](int a, int b) {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(nv) +
           static_cast<std::uint64_t>(b);
  };
  for (int c = 0; c < nc; ++c) {
    const auto& ring = mesh.cells[c];
    const int m = static_cast<int>(ring.size());
    mesh.cell_edges[c].resize(m);
    for (int k = 0; k < m; ++k) {
      const int a = ring[k];
      const int b = ring[(k + 1) % m];
      auto [it, inserted] = edge_ids.try_emplace(pack(a, b), mesh.n_edges());
      if (inserted) {
        MeshEdge e;
        e.v0 = a;
        e.v1 = b;
        e.cell0 = c;
        const Vec2 t = (mesh.vertices[b] - mesh.vertices[a]).normalized();
        e.normal = Vec2(t.y(), -t.x());  // outward for the CCW cell that created it
        mesh.edges.push_back(e);
      } else {
        MeshEdge& e = mesh.edges[it->second];
        if (e.cell1 >= 0)
          throw MeshError("edge between vertices " + std::to_string(a) + " and " +
                          std::to_string(b) + " is shared by more than two cells");
        e.cell1 = c;
      }
      mesh.cell_edges[c][k] = it->second;
    }
  }

  const int ne = mesh.n_edges();
  if (nv - ne + nc != 1)
    throw MeshError("Euler relation violated: V-E+C = " + std::to_string(nv - ne + nc) +
                    " (expected 1 for a simply connected domain)");

  mesh.boundary_edge.assign(ne, false);
  for (int e = 0; e < ne; ++e) {
    if (mesh.edges[e].cell1 < 0) {
      mesh.boundary_edge[e] = true;
      mesh.boundary_vertex[mesh.edges[e].v0] = true;
      mesh.boundary_vertex[mesh.edges[e].v1] = true;
    }
  }
}

double polygon_kernel_inradius(std::span<const Vec2> ring) {
  // Chebyshev center of {x : n_i.x <= b_i} over the inward half-planes of all
  // edges; the LP optimum sits on three active constraints, so enumerating
  // triples is exact. Empty kernel shows up as a negative optimum.
  const int m = static_cast<int>(ring.size());
  const double scale = polygon_diameter(ring);
  std::vector<Vec2> normals;
  std::vector<double> offsets;
  for (int i = 0; i < m; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % m];
    const double len = (b - a).norm();
    if (len <= 1e-14 * scale) continue;
    const Vec2 t = (b - a) / len;
    const Vec2 n(t.y(), -t.x());
    normals.push_back(n);
    offsets.push_back(n.dot(a));
  }
  const int k = static_cast<int>(normals.size());
  double best = -std::numeric_limits<double>::infinity();
  Eigen::Matrix3d sys;
  Eigen::Vector3d rhs;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      for (int l = j + 1; l < k; ++l) {
        sys << normals[i].x(), normals[i].y(), 1.0, normals[j].x(), normals[j].y(), 1.0,
            normals[l].x(), normals[l].y(), 1.0;
        rhs << offsets[i], offsets[j], offsets[l];
        Eigen::PartialPivLU<Eigen::Matrix3d> lu(sys);
        if (std::abs(lu.determinant()) < 1e-12) continue;
        const Eigen::Vector3d sol = lu.solve(rhs);
        const Vec2 x(sol[0], sol[1]);
        const double r = sol[2];
        if (r <= best) continue;
        bool feasible = true;
        for (int q = 0; q < k && feasible; ++q)
          feasible = normals[q].dot(x) + r <= offsets[q] + 1e-10 * scale;
        if (feasible) best = r;
      }
  return std::max(best, 0.0);
}

MeshQualityReport validate(const PolygonalMesh& mesh) {
  MeshQualityReport rep;
  rep.min_edge_to_diameter_ratio = std::numeric_limits<double>::infinity();
  rep.min_kernel_radius_to_diameter = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto ring = mesh.cell_ring(c);
    const int m = static_cast<int>(ring.size());
    const double diam = polygon_diameter(ring);
    for (int i = 0; i < m; ++i)
      if ((ring[i] - ring[(i + 1) % m]).norm() <= 1e-14 * std::max(diam, 1e-300))
        throw MeshError("cell " + std::to_string(c) + " has a repeated vertex");
    if (!polygon_is_simple(ring))
      throw MeshError("cell " + std::to_string(c) + " has a self-intersecting ring");
    for (int i = 0; i < m; ++i) {
      const double len = (ring[i] - ring[(i + 1) % m]).norm();
      rep.min_edge_to_diameter_ratio = std::min(rep.min_edge_to_diameter_ratio, len / diam);
    }
    const double kr = polygon_kernel_inradius(ring) / diam;
    if (kr < rep.min_kernel_radius_to_diameter) {
      rep.min_kernel_radius_to_diameter = kr;
      rep.worst_cell_id = c;
    }
  }
  return rep;
}

namespace {

// Deduplicates vertices by bit-identical coordinates; generators construct
// shared coordinates with identical expressions.
class VertexPool {
 public:
  int id(const Vec2& p) {
    const auto key = std::make_pair(p.x(), p.y());
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(points_.size()));
    if (inserted) points_.push_back(p);
    return it->second;
  }
  std::vector<Vec2> take() { return std::move(points_); }

 private:
  std::map<std::pair<double, double>, int> ids_;
  std::vector<Vec2> points_;
};

PolygonalMesh grid_mesh(Domain domain, int n, bool split_triangles) {
  PolygonalMesh mesh;
  VertexPool pool;
  const double h = 1.0 / n;
  const int lo = domain == Domain::unit_square ? 0 : -n;
  const int hi = domain == Domain::unit_square ? n : n;
  for (int j = lo; j < hi; ++j) {
    for (int i = lo; i < hi; ++i) {
      if (domain == Domain::l_shape && i >= 0 && j < 0) continue;  // removed quadrant
      const double x0 = i * h, x1 = (i + 1) * h;
      const double y0 = j * h, y1 = (j + 1) * h;
      const int v00 = pool.id({x0, y0});
      const int v10 = pool.id({x1, y0});
      const int v11 = pool.id({x1, y1});
      const int v01 = pool.id({x0, y1});
      if (split_triangles) {
        mesh.cells.push_back({v00, v10, v11});
        mesh.cells.push_back({v00, v11, v01});
      } else {
        mesh.cells.push_back({v00, v10, v11, v01});
      }
    }
  }
  mesh.vertices = pool.take();
  return mesh;
}

PolygonalMesh concave_mesh(int n) {
  // Each grid square splits along (mid bottom) -> (1/4,1/2) -> (mid top) into a
  // concave dart (left) and a convex pentagon (right), both star-shaped.
  PolygonalMesh mesh;
  VertexPool pool;
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x0 = i * h, x1 = (i + 1) * h;
      const double y0 = j * h, y1 = (j + 1) * h;
      const int v00 = pool.id({x0, y0});
      const int v10 = pool.id({x1, y0});
      const int v11 = pool.id({x1, y1});
      const int v01 = pool.id({x0, y1});
      const int mb = pool.id({x0 + 0.5 * h, y0});
      const int mt = pool.id({x0 + 0.5 * h, y1});
      const int q = pool.id({x0 + 0.25 * h, y0 + 0.5 * h});
      mesh.cells.push_back({v00, mb, q, mt, v01});
      mesh.cells.push_back({mb, v10, v11, mt, q});
    }
  }
  mesh.vertices = pool.take();
  return mesh;
}

// ---- clipped Voronoi on the unit square -----------------------------------

// Constraint ids: >= 0 is the bisector towards that seed, -1..-4 are the
// square sides bottom/right/top/left.
struct ClipVertex {
  Vec2 p;
  int c_in;  // constraint of the edge arriving at this vertex
};

void clip_by_bisector(std::vector<ClipVertex>& poly, const Vec2& si, const Vec2& sj, int j) {
  const Vec2 mid = 0.5 * (si + sj);
  const Vec2 dir = sj - si;
  auto f = [&](const Vec2& p) { return (p - mid).dot(dir); };
  std::vector<ClipVertex> out;
  out.reserve(poly.size() + 2);
  const int m = static_cast<int>(poly.size());
  for (int k = 0; k < m; ++k) {
    const ClipVertex& a = poly[k];
    const ClipVertex& b = poly[(k + 1) % m];
    const double fa = f(a.p), fb = f(b.p);
    auto cut = [&] {
      const double t = fa / (fa - fb);
      return Vec2(a.p + t * (b.p - a.p));
    };
    if (fa <= 0.0) {
      if (fb <= 0.0)
        out.push_back(b);
      else
        out.push_back({cut(), b.c_in});
    } else if (fb <= 0.0) {
      out.push_back({cut(), j});
      out.push_back(b);
    }
  }
  poly = std::move(out);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  return a + Vec2(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

// Canonical coordinates of the point where the bisector of (si,sj) meets a
// square side, computed from sorted seed order so adjacent cells agree bitwise.
Vec2 side_bisector_point(int side, const Vec2& si, const Vec2& sj) {
  const Vec2 mid = 0.5 * (si + sj);
  const Vec2 dir = sj - si;
  switch (side) {
    case -1: return {mid.x() + mid.y() * dir.y() / dir.x(), 0.0};                  // y = 0
    case -2: return {1.0, mid.y() - (1.0 - mid.x()) * dir.x() / dir.y()};          // x = 1
    case -3: return {mid.x() - (1.0 - mid.y()) * dir.y() / dir.x(), 1.0};          // y = 1
    default: return {0.0, mid.y() + mid.x() * dir.x() / dir.y()};                  // x = 0
  }
}

PolygonalMesh voronoi_mesh_from_seeds(std::vector<Vec2> seeds, int lloyd_iters) {
  const int ns = static_cast<int>(seeds.size());
  const int grid = std::max(1, static_cast<int>(std::floor(std::sqrt(double(ns)))));
  const double cell_w = 1.0 / grid;

  std::vector<std::vector<ClipVertex>> polys(ns);

  for (int pass = 0; pass <= lloyd_iters; ++pass) {
    std::vector<std::vector<int>> buckets(grid * grid);
    auto bucket_of = [&](const Vec2& p) {
      const int bx = std::clamp(static_cast<int>(p.x() * grid), 0, grid - 1);
      const int by = std::clamp(static_cast<int>(p.y() * grid), 0, grid - 1);
      return by * grid + bx;
    };
    for (int i = 0; i < ns; ++i) buckets[bucket_of(seeds[i])].push_back(i);

    for (int i = 0; i < ns; ++i) {
      const Vec2 si = seeds[i];
      std::vector<ClipVertex> poly = {{{0.0, 0.0}, -4}, {{1.0, 0.0}, -1}, {{1.0, 1.0}, -2},
                                      {{0.0, 1.0}, -3}};
      auto radius = [&] {
        double r2 = 0.0;
        for (const auto& v : poly) r2 = std::max(r2, (v.p - si).squaredNorm());
        return std::sqrt(r2);
      };
      double R = radius();
      const int bx = std::clamp(static_cast<int>(si.x() * grid), 0, grid - 1);
      const int by = std::clamp(static_cast<int>(si.y() * grid), 0, grid - 1);
      for (int ring = 0; ring < 2 * grid; ++ring) {
        if (ring > 0 && (ring - 1) * cell_w > 2.0 * R) break;
        std::vector<std::pair<double, int>> cand;
        for (int dy = -ring; dy <= ring; ++dy) {
          for (int dx = -ring; dx <= ring; ++dx) {
            if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
            const int cx = bx + dx, cy = by + dy;
            if (cx < 0 || cx >= grid || cy < 0 || cy >= grid) continue;
            for (int j : buckets[cy * grid + cx])
              if (j != i) cand.emplace_back((seeds[j] - si).squaredNorm(), j);
          }
        }
        std::sort(cand.begin(), cand.end());
        for (const auto& [d2, j] : cand) {
          if (std::sqrt(d2) > 2.0 * R) break;
          clip_by_bisector(poly, si, seeds[j], j);
          if (poly.size() < 3) throw MeshError("Voronoi cell of seed " + std::to_string(i) +
                                               " degenerated during clipping");
          R = radius();
        }
      }
      polys[i] = std::move(poly);
    }

    if (pass < lloyd_iters) {
      for (int i = 0; i < ns; ++i) {
        std::vector<Vec2> ring;
        ring.reserve(polys[i].size());
        for (const auto& v : polys[i]) ring.push_back(v.p);
        seeds[i] = polygon_centroid(ring);
      }
    }
  }

  // Weld shared vertices through their defining constraint sets, with one
  // canonical coordinate per key, so adjacent cells match bit-exactly.
  PolygonalMesh mesh;
  std::map<std::array<int, 3>, int> vertex_ids;
  const std::array<Vec2, 4> corners = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
  mesh.cells.resize(ns);
  for (int i = 0; i < ns; ++i) {
    const int m = static_cast<int>(polys[i].size());
    for (int k = 0; k < m; ++k) {
      int c1 = polys[i][k].c_in;
      int c2 = polys[i][(k + 1) % m].c_in;
      std::array<int, 3> key;
      Vec2 canon;
      if (c1 < 0 && c2 < 0) {  // square corner, identified by its two sides
        const int side_a = std::min(-c1, -c2), side_b = std::max(-c1, -c2);
        key = {-10 - side_a, -10 - side_b, 0};
        if (side_a == 1)
          canon = side_b == 2 ? corners[1] : corners[0];  // bottom-right / bottom-left
        else
          canon = side_a == 2 ? corners[2] : corners[3];  // top-right / top-left
      } else if (c1 < 0 || c2 < 0) {  // side x bisector
        const int side = std::min(c1, c2);
        const int j = std::max(c1, c2);
        const int a = std::min(i, j), b = std::max(i, j);
        key = {side, a, b};
        canon = side_bisector_point(side, seeds[a], seeds[b]);
      } else {  // bisector x bisector: Voronoi vertex of three seeds
        std::array<int, 3> tri = {i, c1, c2};
        std::sort(tri.begin(), tri.end());
        key = tri;
        canon = circumcenter(seeds[tri[0]], seeds[tri[1]], seeds[tri[2]]);
      }
      auto [it, inserted] = vertex_ids.try_emplace(key, static_cast<int>(mesh.vertices.size()));
      if (inserted) mesh.vertices.push_back(canon);
      mesh.cells[i].push_back(it->second);
    }
  }
  return mesh;
}

std::vector<Vec2> structured_seeds(int n) {
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(n) * n);
  const double h = 1.0 / n;
  const double delta = 0.2 * h;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double sx = ((i + j) % 2 == 0) ? delta : -delta;
      const double sy = ((i + j) % 2 == 0) ? -delta : delta;
      seeds.emplace_back(std::clamp((i + 0.5) * h + sx, 0.0, 1.0),
                         std::clamp((j + 0.5) * h + sy, 0.0, 1.0));
    }
  return seeds;
}

std::vector<Vec2> random_seeds(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) {
    const double x = uniform();
    const double y = uniform();
    seeds.emplace_back(x, y);
  }
  return seeds;
}

}  // namespace

PolygonalMesh generate_mesh(MeshFamily family, Domain domain, int n, std::uint64_t seed,
                            int lloyd_iters) {
  if (n < 1) throw MeshError("subdivision count must be >= 1");
  if (domain == Domain::l_shape && family != MeshFamily::triangular)
    throw MeshError("the L-shape domain supports only the triangular family");
  if ((family == MeshFamily::voronoi_structured || family == MeshFamily::voronoi_random) &&
      domain != Domain::unit_square)
    throw MeshError("Voronoi families require the unit square domain");

  PolygonalMesh mesh;
  switch (family) {
    case MeshFamily::triangular: mesh = grid_mesh(domain, n, true); break;
    case MeshFamily::square: mesh = grid_mesh(domain, n, false); break;
    case MeshFamily::concave: mesh = concave_mesh(n); break;
    case MeshFamily::voronoi_structured:
      mesh = voronoi_mesh_from_seeds(structured_seeds(n), lloyd_iters);
      break;
    case MeshFamily::voronoi_random:
      mesh = voronoi_mesh_from_seeds(random_seeds(n, seed), lloyd_iters);
      break;
  }
  finalize_topology(mesh);

  double area = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) area += polygon_signed_area(mesh.cell_ring(c));
  const double expected = domain_area(domain);
  if (std::abs(area - expected) > 1e-10 * expected)
    throw MeshError("cell areas sum to " + std::to_string(area) + ", expected " +
                    std::to_string(expected));
  return mesh;
}

void save_mesh(const PolygonalMesh& mesh, const std::filesystem::path& path) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x(), v.y()});
  j["cells"] = mesh.cells;
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw MeshError("failed writing '" + path.string() + "'");
}

PolygonalMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open '" + path.string() + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MeshError("parse error in '" + path.string() + "': " + e.what());
  }
  PolygonalMesh mesh;
  try {
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2) throw MeshError("vertex entries must be [x, y] pairs");
      mesh.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    mesh.cells = j.at("cells").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw MeshError("invalid mesh file '" + path.string() + "': " + e.what());
  }
  finalize_topology(mesh);
  return mesh;
}

}  // namespace vkplate
