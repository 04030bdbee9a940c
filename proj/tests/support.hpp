#pragma once

#include <random>

#include "vkplate/element.hpp"
#include "vkplate/mesh.hpp"
#include "vkplate/quadrature.hpp"

namespace vkplate::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

/// Random star-shaped polygon around a center: strictly increasing angles with
/// per-vertex radii, always simple and CCW.
inline std::vector<Vec2> random_star_polygon(std::mt19937_64& rng, int n_min = 3, int n_max = 9) {
  const int n = n_min + static_cast<int>(rng() % std::uint64_t(n_max - n_min + 1));
  const Vec2 center(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  const double scale = uniform(rng, 0.3, 2.0);
  const double start = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
  std::vector<double> gaps(n);
  double total = 0.0;
  for (auto& g : gaps) {
    g = 0.15 + uniform(rng, 0.0, 1.0);
    total += g;
  }
  std::vector<Vec2> ring(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double angle = start + 2.0 * 3.14159265358979323846 * acc / total;
    const double r = scale * uniform(rng, 0.5, 1.0);
    ring[i] = center + r * Vec2(std::cos(angle), std::sin(angle));
    acc += gaps[i];
  }
  return ring;
}

/// Exact integral of x^i y^j over a polygon via Green's theorem,
/// int_K x^i y^j = 1/(i+1) oint x^(i+1) y^j dy, with per-edge Gauss rules of
/// sufficient order. Independent of the ear-clipping quadrature path.
inline double polygon_monomial_moment(std::span<const Vec2> ring, int i, int j) {
  const int n = static_cast<int>(ring.size());
  const int gauss_n = (i + j + 2) / 2 + 1;
  const GaussRule gl = gauss_legendre_01(gauss_n);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec2& a = ring[k];
    const Vec2& b = ring[(k + 1) % n];
    const double dy = b.y() - a.y();
    double edge = 0.0;
    for (int q = 0; q < gauss_n; ++q) {
      const Vec2 p = a + gl.nodes[q] * (b - a);
      edge += gl.weights[q] * std::pow(p.x(), i + 1) * std::pow(p.y(), j);
    }
    total += edge * dy;
  }
  return total / (i + 1);
}

/// Quadratic c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2 and its derivatives.
struct GlobalQuadratic {
  Vector6d c;
  double value(const Vec2& p) const {
    return c[0] + c[1] * p.x() + c[2] * p.y() + c[3] * p.x() * p.x() + c[4] * p.x() * p.y() +
           c[5] * p.y() * p.y();
  }
  Vec2 grad(const Vec2& p) const {
    return {c[1] + 2.0 * c[3] * p.x() + c[4] * p.y(), c[2] + c[4] * p.x() + 2.0 * c[5] * p.y()};
  }
  Mat2 hess() const {
    Mat2 h;
    h << 2.0 * c[3], c[4], c[4], 2.0 * c[5];
    return h;
  }
};

inline GlobalQuadratic random_quadratic(std::mt19937_64& rng) {
  GlobalQuadratic q;
  for (int i = 0; i < 6; ++i) q.c[i] = uniform(rng, -1.0, 1.0);
  return q;
}

/// Classical Morley stiffness on a triangle by brute force: solve for the
/// nodal P2 basis dual to the six dofs (monomial coefficients from a dense
/// 6x6 solve), then integrate Hessian products with a quadrature loop.
/// Shares no code with the projector path.
inline Eigen::MatrixXd morley_stiffness_oracle(const std::vector<Vec2>& tri,
                                               std::span<const Vec2> normals) {
  if (tri.size() != 3) throw std::runtime_error("oracle needs a triangle");
  // monomial basis 1, x, y, x^2, xy, y^2 (global coordinates)
  auto value = [](int j, const Vec2& p) -> double {
    switch (j) {
      case 0: return 1.0;
      case 1: return p.x();
      case 2: return p.y();
      case 3: return p.x() * p.x();
      case 4: return p.x() * p.y();
      default: return p.y() * p.y();
    }
  };
  auto grad = [](int j, const Vec2& p) -> Vec2 {
    switch (j) {
      case 0: return {0, 0};
      case 1: return {1, 0};
      case 2: return {0, 1};
      case 3: return {2.0 * p.x(), 0};
      case 4: return {p.y(), p.x()};
      default: return {0, 2.0 * p.y()};
    }
  };
  auto hess = [](int j) -> Mat2 {
    Mat2 h = Mat2::Zero();
    if (j == 3) h(0, 0) = 2.0;
    if (j == 4) h(0, 1) = h(1, 0) = 1.0;
    if (j == 5) h(1, 1) = 2.0;
    return h;
  };
  Eigen::MatrixXd dof_of_monomial(6, 6);
  for (int j = 0; j < 6; ++j) {
    for (int i = 0; i < 3; ++i) dof_of_monomial(i, j) = value(j, tri[i]);
    for (int k = 0; k < 3; ++k) {
      const EdgeRule er = edge_rule(tri[k], tri[(k + 1) % 3], 3);
      double m = 0.0;
      for (std::size_t q = 0; q < er.points.size(); ++q)
        m += er.weights[q] * grad(j, er.points[q]).dot(normals[k]);
      dof_of_monomial(3 + k, j) = m;
    }
  }
  const Eigen::MatrixXd coeffs = dof_of_monomial.inverse();  // column i: nodal basis i
  const PolygonQuadrature rule = polygon_rule(tri, 2);
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      Mat2 hi = Mat2::Zero(), hj = Mat2::Zero();
      for (int m = 0; m < 6; ++m) {
        hi += coeffs(m, i) * hess(m);
        hj += coeffs(m, j) * hess(m);
      }
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q)
        acc += rule.weights[q] * (hi.cwiseProduct(hj)).sum();
      stiff(i, j) = acc;
    }
  return stiff;
}

}  // namespace vkplate::testing
