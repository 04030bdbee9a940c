#include "vkplate/problems.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace vkplate {

namespace {

constexpr double kPi = std::numbers::pi;

// Derivatives 0..4 of t^2 (1-t)^2.
std::array<double, 5> bump(double t) {
  return {t * t - 2.0 * t * t * t + t * t * t * t, 2.0 * t - 6.0 * t * t + 4.0 * t * t * t,
          2.0 - 12.0 * t + 12.0 * t * t, -12.0 + 24.0 * t, 24.0};
}

// Derivatives 0..4 of sin^2(pi t).
std::array<double, 5> sine_sq(double t) {
  const double s = std::sin(kPi * t), c = std::cos(2.0 * kPi * t);
  return {s * s, kPi * std::sin(2.0 * kPi * t), 2.0 * kPi * kPi * c,
          -4.0 * kPi * kPi * kPi * std::sin(2.0 * kPi * t), -8.0 * kPi * kPi * kPi * kPi * c};
}

// Derivatives 0..4 of (t^2-1)^2.
std::array<double, 5> outer_bump(double t) {
  const double q = t * t - 1.0;
  return {q * q, 4.0 * t * q, 12.0 * t * t - 4.0, 24.0 * t, 24.0};
}

struct SeparableField {
  std::array<double, 5> (*fx)(double);
  std::array<double, 5> (*fy)(double);

  double value(const Vec2& p) const { return fx(p.x())[0] * fy(p.y())[0]; }
  Vec2 grad(const Vec2& p) const {
    const auto px = fx(p.x()), py = fy(p.y());
    return {px[1] * py[0], px[0] * py[1]};
  }
  Mat2 hess(const Vec2& p) const {
    const auto px = fx(p.x()), py = fy(p.y());
    Mat2 h;
    h << px[2] * py[0], px[1] * py[1], px[1] * py[1], px[0] * py[2];
    return h;
  }
  double biharmonic(const Vec2& p) const {
    const auto px = fx(p.x()), py = fy(p.y());
    return px[4] * py[0] + 2.0 * px[2] * py[2] + px[0] * py[4];
  }
};

}  // namespace

ManufacturedProblem square_problem() {
  const SeparableField uf{&bump, &bump};
  const SeparableField vf{&sine_sq, &sine_sq};
  ManufacturedProblem prob;
  prob.domain = Domain::unit_square;
  prob.alpha = 1.0;
  prob.u = [uf](const Vec2& p) { return uf.value(p); };
  prob.v = [vf](const Vec2& p) { return vf.value(p); };
  prob.grad_u = [uf](const Vec2& p) { return uf.grad(p); };
  prob.grad_v = [vf](const Vec2& p) { return vf.grad(p); };
  prob.hess_u = [uf](const Vec2& p) { return uf.hess(p); };
  prob.hess_v = [vf](const Vec2& p) { return vf.hess(p); };
  prob.f = [uf, vf](const Vec2& p) {
    return uf.biharmonic(p) - von_karman_bracket(uf.hess(p), vf.hess(p));
  };
  prob.g = [uf, vf](const Vec2& p) {
    return vf.biharmonic(p) + 0.5 * von_karman_bracket(uf.hess(p), uf.hess(p));
  };
  return prob;
}

double singular_exponent_residual(double alpha, double omega) {
  const double sw = std::sin(omega);
  const double s = std::sin(alpha * omega);
  return s * s - alpha * alpha * sw * sw;
}

double find_alpha_in(double omega, double lo, double hi) {
  auto F = [omega](double a) { return singular_exponent_residual(a, omega); };
  double fa = F(lo), fb = F(hi);
  if (fa * fb > 0.0) throw ProblemError("no sign change in the initial bracket");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    if (fa * fm <= 0.0) {
      hi = mid;
      fb = fm;
    } else {
      lo = mid;
      fa = fm;
    }
  }
  double a = 0.5 * (lo + hi);
  const double sw2 = std::sin(omega) * std::sin(omega);
  for (int it = 0; it < 8; ++it) {
    const double dF = omega * std::sin(2.0 * a * omega) - 2.0 * a * sw2;
    if (dF == 0.0) break;
    a -= F(a) / dF;
  }
  return a;
}

SingularExponent find_alpha(double omega) {
  if (!(omega > kPi && omega < 2.0 * kPi))
    throw ProblemError("interior angle must lie in (pi, 2 pi)");
  // Scan (0,1) for sign changes and keep the non-characteristic root nearest 0.54.
  auto F = [omega](double a) { return singular_exponent_residual(a, omega); };
  double best = -1.0;
  const int steps = 1000;
  double prev_a = 1e-3, prev_f = F(prev_a);
  for (int i = 2; i < steps; ++i) {
    const double a = double(i) / steps;
    const double fa = F(a);
    if (prev_f == 0.0 || prev_f * fa < 0.0) {
      const double root = find_alpha_in(omega, prev_a, a);
      if (best < 0.0 || std::abs(root - 0.54) < std::abs(best - 0.54)) best = root;
    }
    prev_a = a;
    prev_f = fa;
  }
  if (best < 0.0) throw ProblemError("no root of the characteristic equation found in (0,1)");
  if (std::abs(singular_exponent_residual(best, omega)) > 1e-13)
    throw ProblemError("characteristic root did not converge");
  if (!(best > 0.5 && best < 1.0))
    throw ProblemError("characteristic root lies outside (0.5, 1)");
  return {omega, best};
}

namespace {

// Goursat form of the biharmonic corner singularity: s = Re(conj(z) phi + chi)
// with phi = a z^alpha, chi = c z^(alpha+1); all Cartesian derivatives come
// from Wirtinger calculus. The branch uses theta in [0, 2 pi) so it is smooth
// across the L-shape interior (interior angle 3 pi / 2 from the positive x-axis).
struct CornerSingularity {
  double alpha;
  std::complex<double> a, c;

  std::complex<double> zpow(double r, double theta, double beta) const {
    return std::polar(std::pow(r, beta), beta * theta);
  }

  struct Values {
    double s;
    Vec2 grad;
    Mat2 hess;
    double lap;
    Vec2 grad_lap;
  };

  Values eval(const Vec2& p) const {
    const double r = std::hypot(p.x(), p.y());
    Values out{};
    if (r == 0.0) return out;
    double theta = std::atan2(p.y(), p.x());
    if (theta < 0.0) theta += 2.0 * kPi;
    const std::complex<double> z(p.x(), p.y());
    const std::complex<double> zbar = std::conj(z);
    const std::complex<double> za1 = zpow(r, theta, alpha - 1.0);
    const std::complex<double> za = za1 * z;
    const std::complex<double> phi = a * za;
    const std::complex<double> dphi = a * alpha * za1;
    const std::complex<double> ddphi = a * alpha * (alpha - 1.0) * zpow(r, theta, alpha - 2.0);
    const std::complex<double> dchi = c * (alpha + 1.0) * za;
    const std::complex<double> ddchi = c * (alpha + 1.0) * alpha * za1;

    out.s = (zbar * phi + c * za * z).real();
    const std::complex<double> w1 = zbar * dphi + dchi;
    out.grad = Vec2(w1.real() + phi.real(), -w1.imag() + phi.imag());
    const std::complex<double> w2 = zbar * ddphi + ddchi;
    out.hess(0, 0) = w2.real() + 2.0 * dphi.real();
    out.hess(1, 1) = -w2.real() + 2.0 * dphi.real();
    out.hess(0, 1) = out.hess(1, 0) = -w2.imag();
    out.lap = 4.0 * dphi.real();
    out.grad_lap = Vec2(4.0 * ddphi.real(), -4.0 * ddphi.imag());
    return out;
  }
};

struct LShapeExact {
  CornerSingularity sing;

  struct Values {
    double u;
    Vec2 grad;
    Mat2 hess;
    double biharmonic;
  };

  Values eval(const Vec2& p) const {
    Values out{};
    const auto px = outer_bump(p.x());
    const auto py = outer_bump(p.y());
    const auto s = sing.eval(p);
    if (p.x() == 0.0 && p.y() == 0.0) return out;  // corner limits all vanish

    const double b = px[0] * py[0];
    const Vec2 gb(px[1] * py[0], px[0] * py[1]);
    Mat2 hb;
    hb << px[2] * py[0], px[1] * py[1], px[1] * py[1], px[0] * py[2];
    const double lap_b = hb(0, 0) + hb(1, 1);
    const Vec2 grad_lap_b(px[3] * py[0] + px[1] * py[2], px[2] * py[1] + px[0] * py[3]);
    const double bih_b = px[4] * py[0] + 2.0 * px[2] * py[2] + px[0] * py[4];

    out.u = b * s.s;
    out.grad = s.s * gb + b * s.grad;
    out.hess = s.s * hb + gb * s.grad.transpose() + s.grad * gb.transpose() + b * s.hess;
    // biharmonic(b s) with biharmonic(s) = 0
    out.biharmonic = s.s * bih_b + 4.0 * gb.dot(s.grad_lap) + 4.0 * s.grad.dot(grad_lap_b) +
                     2.0 * lap_b * s.lap + 4.0 * (hb.cwiseProduct(s.hess)).sum();
    return out;
  }
};

}  // namespace

ManufacturedProblem lshape_problem() {
  const double omega = 1.5 * kPi;
  const double alpha = find_alpha(omega).alpha;
  const double am1 = alpha - 1.0, ap1 = alpha + 1.0;
  const double c1 = std::sin(am1 * omega) / am1 - std::sin(ap1 * omega) / ap1;
  const double c2 = std::cos(am1 * omega) - std::cos(ap1 * omega);
  CornerSingularity sing{alpha, {c1, c2 / am1}, {-c1, -c2 / ap1}};
  const LShapeExact exact{sing};

  ManufacturedProblem prob;
  prob.domain = Domain::l_shape;
  prob.alpha = alpha;
  prob.u = [exact](const Vec2& p) { return exact.eval(p).u; };
  prob.v = prob.u;
  prob.grad_u = [exact](const Vec2& p) { return exact.eval(p).grad; };
  prob.grad_v = prob.grad_u;
  prob.hess_u = [exact](const Vec2& p) { return exact.eval(p).hess; };
  prob.hess_v = prob.hess_u;
  prob.f = [exact](const Vec2& p) {
    const auto e = exact.eval(p);
    return e.biharmonic - von_karman_bracket(e.hess, e.hess);
  };
  prob.g = [exact](const Vec2& p) {
    const auto e = exact.eval(p);
    return e.biharmonic + 0.5 * von_karman_bracket(e.hess, e.hess);
  };
  return prob;
}

}  // namespace vkplate
