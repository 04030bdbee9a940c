#include "vkplate/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

namespace vkplate {

namespace {

// Golub-Welsch: nodes/weights of the Gauss rule for the weight with Jacobi
// matrix recurrence (alpha_k diagonal, beta_k off-diagonal squared) and total
// mass mu0, on [-1,1].
void golub_welsch(int n, const std::vector<double>& alpha, const std::vector<double>& beta,
                  double mu0, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jac(i, i) = alpha[i];
    if (i + 1 < n) {
      const double b = std::sqrt(beta[i + 1]);
      jac(i, i + 1) = b;
      jac(i + 1, i) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = eig.eigenvalues()[i];
    const double v0 = eig.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

// Legendre P_n and P_{n-1} at x via the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double pm1 = 1.0, p = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
    pm1 = p;
    p = pk;
  }
  return {p, pm1};
}

// Newton-polishes Legendre nodes and recomputes weights from the derivative,
// w = 2 / ((1-x^2) P_n'(x)^2).
void polish_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  for (int i = 0; i < n; ++i) {
    double dp = 0.0;
    for (int it = 0; it < 2; ++it) {
      const auto [p, pm1] = legendre_pair(n, x[i]);
      dp = n * (x[i] * p - pm1) / (x[i] * x[i] - 1.0);
      x[i] -= p / dp;
    }
    const auto [p, pm1] = legendre_pair(n, x[i]);
    dp = n * (x[i] * p - pm1) / (x[i] * x[i] - 1.0);
    w[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
  }
}

}  // namespace

GaussRule gauss_legendre_01(int n) {
  if (n < 1) throw QuadratureError("edge rule needs at least one point");
  std::vector<double> alpha(n, 0.0), beta(n, 0.0);
  for (int k = 1; k < n; ++k) beta[k] = k * k / (4.0 * k * k - 1.0);
  std::vector<double> x, w;
  golub_welsch(n, alpha, beta, 2.0, x, w);
  polish_legendre(n, x, w);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

namespace {

// Gauss-Jacobi rule for weight (1-y) on [0,1]; sum of weights is 1/2.
GaussRule gauss_jacobi10_01(int n) {
  std::vector<double> alpha(n), beta(n, 0.0);
  for (int k = 0; k < n; ++k) alpha[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) beta[k] = k * (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
  std::vector<double> x, w;
  golub_welsch(n, alpha, beta, 2.0, x, w);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.25 * w[i];
  }
  return rule;
}

TriangleRule build_triangle_rule(int degree) {
  const int n = (degree + 2) / 2;  // conical product is exact up to 2n-1
  const GaussRule gl = gauss_legendre_01(n);
  const GaussRule gj = gauss_jacobi10_01(n);
  TriangleRule rule;
  rule.degree = degree;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = gj.nodes[j];
      const double x = gl.nodes[i] * (1.0 - v);
      const double y = v;
      rule.barycentric.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * gl.weights[i] * gj.weights[j]);  // normalized to sum 1
    }
  }
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  if (degree < 2 || degree > 12) throw QuadratureError("triangle rule supports degrees 2..12");
  static std::map<int, TriangleRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, build_triangle_rule(degree)).first;
  return it->second;
}

namespace {

double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double tol) {
  const double d1 = cross2(b - a, p - a);
  const double d2 = cross2(c - b, p - b);
  const double d3 = cross2(a - c, p - c);
  return d1 >= -tol && d2 >= -tol && d3 >= -tol;
}

}  // namespace

std::vector<std::array<int, 3>> triangulate_polygon(std::span<const Vec2> ring) {
  const int n = static_cast<int>(ring.size());
  if (n < 3) throw QuadratureError("cannot triangulate a ring with fewer than 3 vertices");
  if (!polygon_is_simple(ring)) throw QuadratureError("cannot triangulate a self-intersecting ring");
  const double scale = polygon_diameter(ring);
  const double tol = 1e-14 * scale * scale;

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  tris.reserve(n - 2);

  while (idx.size() > 3) {
    const int m = static_cast<int>(idx.size());
    bool clipped = false;
    for (int k = 0; k < m; ++k) {
      const int ia = idx[(k + m - 1) % m], ib = idx[k], ic = idx[(k + 1) % m];
      const Vec2 &a = ring[ia], &b = ring[ib], &c = ring[ic];
      if (cross2(b - a, c - a) <= tol) continue;  // reflex or collinear corner
      bool ear = true;
      for (int q : idx) {
        if (q == ia || q == ib || q == ic) continue;
        if (point_in_triangle(ring[q], a, b, c, tol)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + k);
      clipped = true;
      break;
    }
    if (!clipped) throw QuadratureError("ear clipping failed; ring is degenerate");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

PolygonQuadrature polygon_rule(std::span<const Vec2> ring, int degree, int cell_id) {
  const TriangleRule& ref = triangle_rule(degree);
  PolygonQuadrature quad;
  quad.cell = cell_id;
  quad.triangles = triangulate_polygon(ring);
  quad.points.reserve(quad.triangles.size() * ref.weights.size());
  quad.weights.reserve(quad.triangles.size() * ref.weights.size());
  for (const auto& tri : quad.triangles) {
    const Vec2 &a = ring[tri[0]], &b = ring[tri[1]], &c = ring[tri[2]];
    const double area = 0.5 * cross2(b - a, c - a);
    for (std::size_t q = 0; q < ref.weights.size(); ++q) {
      const auto& l = ref.barycentric[q];
      quad.points.push_back(l[0] * a + l[1] * b + l[2] * c);
      quad.weights.push_back(area * ref.weights[q]);
    }
  }
  return quad;
}

EdgeRule edge_rule(const Vec2& a, const Vec2& b, int npoints) {
  const GaussRule gl = gauss_legendre_01(npoints);
  const double len = (b - a).norm();
  EdgeRule rule;
  rule.points.reserve(npoints);
  rule.weights.reserve(npoints);
  for (int i = 0; i < npoints; ++i) {
    rule.points.push_back(a + gl.nodes[i] * (b - a));
    rule.weights.push_back(len * gl.weights[i]);
  }
  return rule;
}

}  // namespace vkplate
