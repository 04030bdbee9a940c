#include "vkplate/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vkplate {

double polygon_signed_area(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

Vec2 polygon_centroid(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  double twice = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    const double cross = a.x() * b.y() - b.x() * a.y();
    twice += cross;
    c += cross * (a + b);
  }
  return c / (3.0 * twice);
}

double polygon_diameter(std::span<const Vec2> ring) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i)
    for (std::size_t j = i + 1; j < ring.size(); ++j)
      d2 = std::max(d2, (ring[i] - ring[j]).squaredNorm());
  return std::sqrt(d2);
}

namespace {

double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

// Orientation of c relative to segment a->b, scaled; 0 means collinear.
double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p, double tol) {
  if (std::abs(orient(a, b, p)) > tol) return false;
  return p.x() >= std::min(a.x(), b.x()) - tol && p.x() <= std::max(a.x(), b.x()) + tol &&
         p.y() >= std::min(a.y(), b.y()) - tol && p.y() <= std::max(a.y(), b.y()) + tol;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) &&
      ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol)))
    return true;
  if (on_segment(a, b, c, tol) || on_segment(a, b, d, tol) || on_segment(c, d, a, tol) ||
      on_segment(c, d, b, tol))
    return true;
  return false;
}

}  // namespace

bool point_in_polygon(const Vec2& p, std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  const double scale = polygon_diameter(ring);
  const double tol = 1e-12 * scale * scale;
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    if (on_segment(a, b, p, tol)) return true;
    const bool crosses = (a.y() > p.y()) != (b.y() > p.y());
    if (crosses) {
      const double xint = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < xint) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  const double scale = polygon_diameter(ring);
  if (scale <= 0.0) return false;
  const double tol = 1e-12 * scale * scale;
  for (std::size_t i = 0; i < n; ++i) {
    if ((ring[i] - ring[(i + 1) % n]).norm() <= 1e-14 * scale) return false;  // repeated vertex
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t in = (i + 1) % n;
      const std::size_t jn = (j + 1) % n;
      if (in == j || jn == i || i == j) continue;  // adjacent edges share a vertex
      if (segments_intersect(ring[i], ring[in], ring[j], ring[jn], tol)) return false;
    }
  }
  return true;
}

}  // namespace vkplate
