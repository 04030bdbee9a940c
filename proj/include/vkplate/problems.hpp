#pragma once

#include <functional>
#include <stdexcept>

#include "vkplate/mesh.hpp"

namespace vkplate {

struct ProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// [a,b] = axx byy + ayy bxx - 2 axy bxy on Hessians.
inline double von_karman_bracket(const Mat2& a, const Mat2& b) {
  return a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - 2.0 * a(0, 1) * b(0, 1);
}

/// Exact solution pair with derivative evaluators and the loads
/// f = biharmonic(u) - [u,v], g = biharmonic(v) + [u,u]/2.
struct ManufacturedProblem {
  Domain domain = Domain::unit_square;
  double alpha = 1.0;  // index of elliptic regularity
  std::function<double(const Vec2&)> u, v;
  std::function<Vec2(const Vec2&)> grad_u, grad_v;
  std::function<Mat2(const Vec2&)> hess_u, hess_v;
  std::function<double(const Vec2&)> f, g;
};

/// u = x^2 y^2 (1-x)^2 (1-y)^2, v = sin^2(pi x) sin^2(pi y) on (0,1)^2,
/// all derivatives closed-form.
ManufacturedProblem square_problem();

/// Singular solution u = v = (x^2-1)^2 (y^2-1)^2 r^(1+alpha) g(theta) on the
/// L-shape (-1,1)^2 \ [0,1)x(-1,0]. Second derivatives blow up like
/// r^(alpha-1) at the re-entrant corner; evaluators return 0 exactly at r=0
/// (quadrature never places points there).
ManufacturedProblem lshape_problem();

struct SingularExponent {
  double omega = 0.0;
  double alpha = 0.0;
};

/// Residual of the corner characteristic equation sin^2(a w) - a^2 sin^2(w).
double singular_exponent_residual(double alpha, double omega);

/// Root of the characteristic equation in (0,1) nearest 0.54, by safeguarded
/// bisection plus Newton polish. Requires omega in (pi, 2 pi).
SingularExponent find_alpha(double omega);

/// Same search on an explicit bracket, without the omega precondition.
double find_alpha_in(double omega, double lo, double hi);

}  // namespace vkplate
