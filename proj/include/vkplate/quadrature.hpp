#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "vkplate/geometry.hpp"

namespace vkplate {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gauss-Legendre nodes/weights on [0,1]; weights sum to 1 and the rule is
/// exact for polynomials of degree <= 2n-1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre_01(int n);

/// Quadrature on the reference triangle {(0,0),(1,0),(0,1)}: conical-product
/// rule, so all weights are positive and all points interior at any degree.
/// Weights sum to 1; integrals scale by the physical triangle area.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;
};
const TriangleRule& triangle_rule(int degree);  // degree in 2..12

/// Ear-clipping triangulation of a simple CCW polygon; returns index triples
/// into the ring. Handles nonconvex cells.
std::vector<std::array<int, 3>> triangulate_polygon(std::span<const Vec2> ring);

/// Physical quadrature points/weights on a polygonal cell, exact for total
/// degree <= `degree`. Weights sum to the cell area.
struct PolygonQuadrature {
  int cell = -1;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec2> points;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
    return s;
  }
};
PolygonQuadrature polygon_rule(std::span<const Vec2> ring, int degree, int cell_id = -1);

/// Gauss points/weights along the segment a->b; weights sum to |b-a|.
struct EdgeRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
};
EdgeRule edge_rule(const Vec2& a, const Vec2& b, int npoints);

}  // namespace vkplate
