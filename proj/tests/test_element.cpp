#include "vkplate/element.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace vkplate;
using vkplate::testing::GlobalQuadratic;
using vkplate::testing::random_quadratic;
using vkplate::testing::random_star_polygon;
using vkplate::testing::uniform;

namespace {

const std::vector<Vec2> kUnitSquare = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};

// Outward-convention dofs of a quadratic on a standalone cell.
Eigen::VectorXd dofs_of(const LocalElement& elem, const GlobalQuadratic& q) {
  return elem.interpolate([&](const Vec2& p) { return q.value(p); },
                          [&](const Vec2& p) { return q.grad(p); });
}

}  // namespace

TEST_CASE("interpolation dofs") {
  const LocalElement elem(kUnitSquare);
  SUBCASE("constants: vertex dofs 1, edge dofs 0") {
    const Eigen::VectorXd d = elem.interpolate([](const Vec2&) { return 1.0; },
                                               [](const Vec2&) { return Vec2::Zero().eval(); });
    for (int i = 0; i < 4; ++i) CHECK(d[i] == doctest::Approx(1.0));
    for (int i = 4; i < 8; ++i) CHECK(d[i] == doctest::Approx(0.0));
  }
  SUBCASE("phi = xy: bottom-edge moment with n=(0,1) is 1/2") {
    // standalone cell, stored normal = outward = (0,-1) on the bottom edge;
    // the moment with the +y normal is the negative of the outward dof
    const Eigen::VectorXd d = elem.interpolate(
        [](const Vec2& p) { return p.x() * p.y(); },
        [](const Vec2& p) { return Vec2(p.y(), p.x()); });
    CHECK(-d[4] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("projector reproduces P2") {
  SUBCASE("q = x^2 on the unit square") {
    const LocalElement elem(kUnitSquare);
    GlobalQuadratic q;
    q.c << 0, 0, 0, 1, 0, 0;
    const Vector6d coeffs = elem.project(dofs_of(elem, q));
    const Vector6d expected = elem.basis().from_global_quadratic(q.c);
    CHECK((coeffs - expected).norm() < 1e-12 * expected.norm());
  }
  SUBCASE("constant projects to itself") {
    const LocalElement elem(kUnitSquare);
    GlobalQuadratic one;
    one.c << 1, 0, 0, 0, 0, 0;
    const Vector6d coeffs = elem.project(dofs_of(elem, one));
    CHECK(coeffs[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(coeffs.tail(5).norm() < 1e-13);
  }
  SUBCASE("200 random cells, random quadratics, 1e-11 relative") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      const LocalElement elem(random_star_polygon(rng));
      const GlobalQuadratic q = random_quadratic(rng);
      const Vector6d expected = elem.basis().from_global_quadratic(q.c);
      const Vector6d coeffs = elem.project(dofs_of(elem, q));
      CHECK((coeffs - expected).norm() <= 1e-11 * std::max(1.0, expected.norm()));
      // Pi_star * D = identity on the 6x6
      const auto& proj = elem.projector();
      CHECK((proj.Pi_star * proj.D - Matrix6d::Identity()).norm() < 1e-11);
      // idempotent dof projector
      CHECK((proj.Pi_dof * proj.Pi_dof - proj.Pi_dof).norm() < 1e-12 * proj.Pi_dof.norm());
    }
  }
  SUBCASE("triangles: Pi_dof is the identity (Morley element)") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const LocalElement elem(random_star_polygon(rng, 3, 3));
      const int n = elem.n_dofs();
      CHECK((elem.projector().Pi_dof - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-10);
    }
  }
}

TEST_CASE("hessian moment") {
  const LocalElement elem(kUnitSquare);
  const LocalBasis& basis = elem.basis();
  CHECK(basis.h == doctest::Approx(std::sqrt(2.0)));
  SUBCASE("phi = xi^2 on the unit square gives [[1,0],[0,0]]") {
    Eigen::VectorXd d(8);
    for (int i = 0; i < 4; ++i) d[i] = basis.eval(3, kUnitSquare[i]);
    for (int k = 0; k < 4; ++k) {
      const Vec2 mid = 0.5 * (kUnitSquare[k] + kUnitSquare[(k + 1) % 4]);
      d[4 + k] = elem.edge_length(k) * basis.grad(3, mid).dot(elem.outward_normal(k));
    }
    const Mat2 m = elem.hessian_moment(d);
    CHECK(m(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(m(0, 1)) < 1e-14);
    CHECK(std::abs(m(1, 0)) < 1e-14);
    CHECK(std::abs(m(1, 1)) < 1e-14);
  }
  SUBCASE("affine dofs give zero moment") {
    GlobalQuadratic aff;
    aff.c << 0.3, -1.2, 0.7, 0, 0, 0;
    const Mat2 m = elem.hessian_moment(dofs_of(elem, aff));
    CHECK(m.norm() < 1e-13);
  }
  SUBCASE("cross terms agree for arbitrary dof vectors") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      const LocalElement cell(random_star_polygon(rng));
      Eigen::VectorXd d(cell.n_dofs());
      for (int i = 0; i < d.size(); ++i) d[i] = uniform(rng, -1.0, 1.0);
      const Mat2 m = cell.hessian_moment(d);
      CHECK(std::abs(m(0, 1) - m(1, 0)) < 1e-12 * std::max(1.0, m.norm()));
    }
  }
  SUBCASE("phi = xi eta: off-diagonals equal, diagonal zero") {
    Eigen::VectorXd d(8);
    for (int i = 0; i < 4; ++i) d[i] = basis.eval(4, kUnitSquare[i]);
    for (int k = 0; k < 4; ++k) {
      const Vec2 mid = 0.5 * (kUnitSquare[k] + kUnitSquare[(k + 1) % 4]);
      d[4 + k] = elem.edge_length(k) * basis.grad(4, mid).dot(elem.outward_normal(k));
    }
    const Mat2 m = elem.hessian_moment(d);
    CHECK(m(0, 1) == doctest::Approx(m(1, 0)).epsilon(1e-13));
    CHECK(std::abs(m(0, 0)) < 1e-14);
    CHECK(std::abs(m(1, 1)) < 1e-14);
  }
}

TEST_CASE("local stiffness") {
  SUBCASE("kernel is exactly the affine dofs (dimension 3)") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const LocalElement elem(random_star_polygon(rng));
      const Eigen::MatrixXd& A = elem.stiffness().A;
      CHECK((A - A.transpose()).norm() < 1e-12 * A.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
      const double lmax = eig.eigenvalues().maxCoeff();
      int nzero = 0;
      for (int i = 0; i < eig.eigenvalues().size(); ++i) {
        CHECK(eig.eigenvalues()[i] > -1e-9 * lmax);  // positive semidefinite
        if (std::abs(eig.eigenvalues()[i]) < 1e-9 * lmax) ++nzero;
      }
      CHECK(nzero == 3);
    }
  }
  SUBCASE("affine dof vectors are annihilated") {
    std::mt19937_64 rng(32);
    const LocalElement elem(random_star_polygon(rng));
    GlobalQuadratic aff;
    aff.c << 0.4, 1.3, -0.2, 0, 0, 0;
    const Eigen::VectorXd d = dofs_of(elem, aff);
    CHECK((elem.stiffness().A * d).norm() < 1e-11 * std::max(1.0, d.norm()));
  }
  SUBCASE("energy of q = xi^2 on the unit square is 1") {
    const LocalElement elem(kUnitSquare);
    Eigen::VectorXd d(8);
    for (int i = 0; i < 4; ++i) d[i] = elem.basis().eval(3, kUnitSquare[i]);
    for (int k = 0; k < 4; ++k) {
      const Vec2 mid = 0.5 * (kUnitSquare[k] + kUnitSquare[(k + 1) % 4]);
      d[4 + k] = elem.edge_length(k) * elem.basis().grad(3, mid).dot(elem.outward_normal(k));
    }
    CHECK(d.dot(elem.stiffness().A * d) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("stabilization annihilates P2 (consistency)") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
      const LocalElement elem(random_star_polygon(rng));
      const GlobalQuadratic q = random_quadratic(rng);
      const Eigen::VectorXd dq = dofs_of(elem, q);
      Eigen::VectorXd w(elem.n_dofs());
      for (int i = 0; i < w.size(); ++i) w[i] = uniform(rng, -1.0, 1.0);
      const double full = w.dot(elem.stiffness().A * dq);
      const double cons = w.dot(elem.stiffness().consistency * dq);
      CHECK(full == doctest::Approx(cons).epsilon(1e-9));
      CHECK((elem.stiffness().stabilization * dq).norm() < 1e-10 * std::max(1.0, dq.norm()));
    }
  }
  SUBCASE("triangle element equals the brute-force Morley oracle") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 40; ++trial) {
      const auto tri = random_star_polygon(rng, 3, 3);
      const LocalElement elem(tri);
      std::vector<Vec2> normals(3);
      for (int k = 0; k < 3; ++k) normals[k] = elem.outward_normal(k);
      const Eigen::MatrixXd oracle = vkplate::testing::morley_stiffness_oracle(tri, normals);
      CHECK((elem.stiffness().A - oracle).norm() <= 1e-10 * oracle.norm());
    }
  }
  SUBCASE("stabilization/consistency Rayleigh quotients stay within [1e-3, 1e3]") {
    std::mt19937_64 rng(35);
    double qmin = 1e300, qmax = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const LocalElement elem(random_star_polygon(rng, 4, 9));
      const int n = elem.n_dofs();
      // random dof vector orthogonal to the affine kernel
      Eigen::MatrixXd kernel(n, 3);
      for (int j = 0; j < 3; ++j) {
        GlobalQuadratic aff;
        aff.c.setZero();
        aff.c[j] = 1.0;
        kernel.col(j) = dofs_of(elem, aff);
      }
      Eigen::VectorXd w(n);
      for (int i = 0; i < n; ++i) w[i] = uniform(rng, -1.0, 1.0);
      w -= kernel * (kernel.colPivHouseholderQr().solve(w));
      const double stab = w.dot(elem.stiffness().stabilization * w);
      const double cons = w.dot(elem.stiffness().consistency * w);
      if (cons > 0.0 && stab > 0.0) {
        const double ratio = stab / cons;
        qmin = std::min(qmin, ratio);
        qmax = std::max(qmax, ratio);
      }
      CHECK(w.dot(elem.stiffness().A * w) > 0.0);  // definite off the kernel
    }
    MESSAGE("stabilization/consistency ratio range: [", qmin, ", ", qmax, "]");
    CHECK(qmin >= 1e-3);
    CHECK(qmax <= 1e3);
  }
}

TEST_CASE("local trilinear form") {
  const LocalElement elem(kUnitSquare);
  const LocalBasis& basis = elem.basis();
  SUBCASE("hand-computed case p=x^2, q=y^2, r=xy gives 1/2") {
    Vector6d cp, cq, cr;
    cp << 0, 0, 0, 1, 0, 0;
    cq << 0, 0, 0, 0, 0, 1;
    cr << 0, 0, 0, 0, 1, 0;
    const double val = elem.trilinear(basis.from_global_quadratic(cp),
                                      basis.from_global_quadratic(cq),
                                      basis.from_global_quadratic(cr));
    CHECK(val == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("affine first slot vanishes") {
    std::mt19937_64 rng(41);
    Vector6d aff = Vector6d::Zero();
    aff[1] = 1.7;
    aff[2] = -0.3;
    const GlobalQuadratic q = random_quadratic(rng), r = random_quadratic(rng);
    const double val = elem.trilinear(aff, basis.from_global_quadratic(q.c),
                                      basis.from_global_quadratic(r.c));
    CHECK(std::abs(val) < 1e-14);
  }
  SUBCASE("symmetric in the last two arguments; slot matrices consistent") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
      const LocalElement cell(random_star_polygon(rng));
      const Vector6d p = cell.basis().from_global_quadratic(random_quadratic(rng).c);
      const Vector6d q = cell.basis().from_global_quadratic(random_quadratic(rng).c);
      const Vector6d r = cell.basis().from_global_quadratic(random_quadratic(rng).c);
      const double vqr = cell.trilinear(p, q, r);
      const double vrq = cell.trilinear(p, r, q);
      const double scale = 1.0 + std::abs(vqr);
      CHECK(std::abs(vqr - vrq) < 1e-12 * scale);
      CHECK(std::abs(r.dot(cell.trilinear_second_slot(p) * q) - vqr) < 1e-12 * scale);
      CHECK(std::abs(r.dot(cell.trilinear_first_slot(q) * p) - vqr) < 1e-12 * scale);
    }
  }
}

TEST_CASE("local load vector") {
  const LocalElement elem(kUnitSquare);
  SUBCASE("constant 2 on the unit square: vertex entries 1/2") {
    const Eigen::VectorXd l = elem.load([](const Vec2&) { return 2.0; });
    for (int i = 0; i < 4; ++i) CHECK(l[i] == doctest::Approx(0.5).epsilon(1e-14));
    for (int i = 4; i < 8; ++i) CHECK(l[i] == 0.0);
  }
  SUBCASE("zero load") {
    const Eigen::VectorXd l = elem.load([](const Vec2&) { return 0.0; });
    CHECK(l.norm() == 0.0);
  }
  SUBCASE("f = x: cell average 1/2, vertex entries 1/8") {
    const Eigen::VectorXd l = elem.load([](const Vec2& p) { return p.x(); });
    for (int i = 0; i < 4; ++i) CHECK(l[i] == doctest::Approx(0.125).epsilon(1e-13));
  }
}

TEST_CASE("degenerate cells are rejected") {
  const std::vector<Vec2> needle = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  CHECK_THROWS_AS((void)LocalElement{needle}, std::exception);
}
