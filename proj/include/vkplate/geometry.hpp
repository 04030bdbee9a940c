#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace vkplate {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Signed area of a polygon ring (positive for counterclockwise).
double polygon_signed_area(std::span<const Vec2> ring);

/// Area centroid of a simple polygon ring.
Vec2 polygon_centroid(std::span<const Vec2> ring);

/// Diameter = largest pairwise vertex distance.
double polygon_diameter(std::span<const Vec2> ring);

/// True if the point lies in the closed polygon (boundary counts as inside).
bool point_in_polygon(const Vec2& p, std::span<const Vec2> ring);

/// True if the ring bounds a simple polygon: no repeated vertices and no
/// proper or improper intersection between non-adjacent edges.
bool polygon_is_simple(std::span<const Vec2> ring);

/// cof(A) for a 2x2 matrix: cof(A)*A^T = det(A)*I. Symmetric when A is.
inline Mat2 cofactor(const Mat2& a) {
  Mat2 c;
  c << a(1, 1), -a(1, 0), -a(0, 1), a(0, 0);
  return c;
}

}  // namespace vkplate
