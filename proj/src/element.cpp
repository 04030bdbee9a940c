#include "vkplate/element.hpp"

#include <cmath>

namespace vkplate {

double LocalBasis::eval(int j, const Vec2& p) const {
  const double xi = (p.x() - centroid.x()) / h;
  const double eta = (p.y() - centroid.y()) / h;
  switch (j) {
    case 0: return 1.0;
    case 1: return xi;
    case 2: return eta;
    case 3: return xi * xi;
    case 4: return xi * eta;
    default: return eta * eta;
  }
}

Vec2 LocalBasis::grad(int j, const Vec2& p) const {
  const double xi = (p.x() - centroid.x()) / h;
  const double eta = (p.y() - centroid.y()) / h;
  const double s = 1.0 / h;
  switch (j) {
    case 0: return {0.0, 0.0};
    case 1: return {s, 0.0};
    case 2: return {0.0, s};
    case 3: return {2.0 * xi * s, 0.0};
    case 4: return {eta * s, xi * s};
    default: return {0.0, 2.0 * eta * s};
  }
}

Mat2 LocalBasis::hess(int j) const {
  const double s = 1.0 / (h * h);
  Mat2 m = Mat2::Zero();
  switch (j) {
    case 3: m(0, 0) = 2.0 * s; break;
    case 4: m(0, 1) = m(1, 0) = s; break;
    case 5: m(1, 1) = 2.0 * s; break;
    default: break;
  }
  return m;
}

double LocalBasis::eval(const Vector6d& coeff, const Vec2& p) const {
  double v = 0.0;
  for (int j = 0; j < 6; ++j) v += coeff[j] * eval(j, p);
  return v;
}

Vec2 LocalBasis::grad(const Vector6d& coeff, const Vec2& p) const {
  Vec2 g = Vec2::Zero();
  for (int j = 1; j < 6; ++j) g += coeff[j] * grad(j, p);
  return g;
}

Mat2 LocalBasis::hess(const Vector6d& coeff) const {
  Mat2 m = Mat2::Zero();
  for (int j = 3; j < 6; ++j) m += coeff[j] * hess(j);
  return m;
}

Vector6d LocalBasis::from_global_quadratic(const Vector6d& c) const {
  const double xc = centroid.x(), yc = centroid.y();
  Vector6d s;
  s[0] = c[0] + c[1] * xc + c[2] * yc + c[3] * xc * xc + c[4] * xc * yc + c[5] * yc * yc;
  s[1] = h * (c[1] + 2.0 * c[3] * xc + c[4] * yc);
  s[2] = h * (c[2] + 2.0 * c[5] * yc + c[4] * xc);
  s[3] = h * h * c[3];
  s[4] = h * h * c[4];
  s[5] = h * h * c[5];
  return s;
}

LocalElement::LocalElement(const PolygonalMesh& mesh, int cell)
    : cell_(cell), ring_(mesh.cell_ring(cell)) {
  nv_ = static_cast<int>(ring_.size());
  sigma_.resize(nv_);
  build();
  for (int k = 0; k < nv_; ++k) {
    const Vec2 stored = mesh.edges[mesh.cell_edges[cell][k]].normal;
    const double d = normal_[k].dot(stored);
    if (std::abs(std::abs(d) - 1.0) > 1e-9)
      throw ElementError("cell " + std::to_string(cell) + ": stored edge normal is not aligned");
    sigma_[k] = d > 0 ? 1.0 : -1.0;
  }
}

LocalElement::LocalElement(std::vector<Vec2> ring, int cell) : cell_(cell), ring_(std::move(ring)) {
  nv_ = static_cast<int>(ring_.size());
  sigma_.assign(nv_, 1.0);
  build();
}

void LocalElement::build() {
  if (nv_ < 3) throw ElementError("cell " + std::to_string(cell_) + " has fewer than 3 vertices");
  area_ = polygon_signed_area(ring_);
  if (area_ <= 0.0)
    throw ElementError("cell " + std::to_string(cell_) + " is not counterclockwise");
  basis_.centroid = polygon_centroid(ring_);
  basis_.h = polygon_diameter(ring_);

  edge_len_.resize(nv_);
  tangent_.resize(nv_);
  normal_.resize(nv_);
  for (int k = 0; k < nv_; ++k) {
    const Vec2 d = ring_[(k + 1) % nv_] - ring_[k];
    edge_len_[k] = d.norm();
    tangent_[k] = d / edge_len_[k];
    normal_[k] = Vec2(tangent_[k].y(), -tangent_[k].x());
  }

  rule2_ = polygon_rule(ring_, 2, cell_);
  rule10_ = polygon_rule(ring_, 10, cell_);

  // Gradient product moments and cofactor Hessians for the trilinear form.
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      Matrix6d m = Matrix6d::Zero();
      for (std::size_t q = 0; q < rule2_.points.size(); ++q) {
        const Vec2& p = rule2_.points[q];
        const double w = rule2_.weights[q];
        Vec2 g[6];
        for (int j = 0; j < 6; ++j) g[j] = basis_.grad(j, p);
        for (int a = 0; a < 6; ++a)
          for (int b = 0; b < 6; ++b) m(a, b) += w * g[a][s] * g[b][t];
      }
      gm_[s][t] = m;
    }
  for (int j = 0; j < 6; ++j) cof_hess_[j] = cofactor(basis_.hess(j));

  const int n = n_dofs();
  proj_.D.resize(n, 6);
  for (int j = 0; j < 6; ++j) {
    for (int i = 0; i < nv_; ++i) proj_.D(i, j) = basis_.eval(j, ring_[i]);
    for (int k = 0; k < nv_; ++k) {
      const Vec2 mid = 0.5 * (ring_[k] + ring_[(k + 1) % nv_]);
      proj_.D(nv_ + k, j) = edge_len_[k] * basis_.grad(j, mid).dot(normal_[k]);
    }
  }

  proj_.G = Matrix6d::Zero();
  for (int j = 3; j < 6; ++j)
    for (int k = 3; k < 6; ++k)
      proj_.G(j, k) = area_ * (basis_.hess(j).cwiseProduct(basis_.hess(k))).sum();

  // Projector system: one vertex-average row, two boundary-gradient rows,
  // three energy rows tested against the quadratic monomials.
  Matrix6d B = Matrix6d::Zero();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(6, n);
  for (int j = 0; j < 6; ++j) {
    double hat = 0.0;
    for (int i = 0; i < nv_; ++i) hat += basis_.eval(j, ring_[i]);
    B(0, j) = hat / nv_;
    Vec2 bnd = Vec2::Zero();
    for (int k = 0; k < nv_; ++k) {
      const Vec2 mid = 0.5 * (ring_[k] + ring_[(k + 1) % nv_]);
      bnd += edge_len_[k] * basis_.grad(j, mid);
    }
    B(1, j) = bnd.x();
    B(2, j) = bnd.y();
    for (int r = 3; r < 6; ++r) B(r, j) = proj_.G(r, j);
  }
  for (int i = 0; i < nv_; ++i) C(0, i) = 1.0 / nv_;
  for (int k = 0; k < nv_; ++k) {
    C(1, nv_ + k) = normal_[k].x();
    C(2, nv_ + k) = normal_[k].y();
    const int a = k, b = (k + 1) % nv_;
    C(1, b) += tangent_[k].x();
    C(1, a) -= tangent_[k].x();
    C(2, b) += tangent_[k].y();
    C(2, a) -= tangent_[k].y();
  }
  for (int r = 3; r < 6; ++r) {
    const Mat2 hr = basis_.hess(r);
    for (int k = 0; k < nv_; ++k) {
      const Mat2 en = normal_[k] * normal_[k].transpose();
      const Mat2 et = tangent_[k] * normal_[k].transpose();
      C(r, nv_ + k) += (hr.cwiseProduct(en)).sum();
      const double ct = (hr.cwiseProduct(et)).sum();
      C(r, (k + 1) % nv_) += ct;
      C(r, k) -= ct;
    }
  }

  Eigen::PartialPivLU<Matrix6d> lu(B);
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (pivot_min < 1e-12 * B.norm())
    throw ElementError("projector system singular on cell " + std::to_string(cell_));
  proj_.Pi_star = lu.solve(C);
  proj_.Pi_dof = proj_.D * proj_.Pi_star;

  stiff_.consistency = proj_.Pi_star.transpose() * proj_.G * proj_.Pi_star;
  const Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(n, n) - proj_.Pi_dof;
  stiff_.stabilization = residual.transpose() * residual / (basis_.h * basis_.h);
  stiff_.A = stiff_.consistency + stiff_.stabilization;
}

Eigen::VectorXd LocalElement::interpolate(const std::function<double(const Vec2&)>& f,
                                          const std::function<Vec2(const Vec2&)>& grad_f) const {
  Eigen::VectorXd dofs(n_dofs());
  for (int i = 0; i < nv_; ++i) dofs[i] = f(ring_[i]);
  for (int k = 0; k < nv_; ++k) {
    const EdgeRule er = edge_rule(ring_[k], ring_[(k + 1) % nv_], 5);
    double moment = 0.0;
    for (std::size_t q = 0; q < er.points.size(); ++q)
      moment += er.weights[q] * grad_f(er.points[q]).dot(normal_[k]);
    dofs[nv_ + k] = sigma_[k] * moment;  // stored-normal convention
  }
  return dofs;
}

Eigen::VectorXd LocalElement::to_outward(const Eigen::VectorXd& stored_convention) const {
  Eigen::VectorXd d = stored_convention;
  for (int k = 0; k < nv_; ++k) d[nv_ + k] *= sigma_[k];
  return d;
}

Mat2 LocalElement::hessian_moment(const Eigen::VectorXd& dofs) const {
  Mat2 m = Mat2::Zero();
  for (int k = 0; k < nv_; ++k) {
    const double jump = dofs[(k + 1) % nv_] - dofs[k];
    const Vec2 grad_int = dofs[nv_ + k] * normal_[k] + jump * tangent_[k];
    m += grad_int * normal_[k].transpose();
  }
  return m;
}

Vector6d LocalElement::project(const Eigen::VectorXd& dofs) const {
  return proj_.Pi_star * dofs;
}

double LocalElement::trilinear(const Vector6d& p, const Vector6d& q, const Vector6d& r) const {
  Mat2 cof = Mat2::Zero();
  for (int j = 3; j < 6; ++j) cof += p[j] * cof_hess_[j];
  double value = 0.0;
  for (std::size_t i = 0; i < rule2_.points.size(); ++i) {
    const Vec2& x = rule2_.points[i];
    value += rule2_.weights[i] * (cof * basis_.grad(q, x)).dot(basis_.grad(r, x));
  }
  return 0.5 * value;
}

Matrix6d LocalElement::trilinear_second_slot(const Vector6d& p) const {
  Mat2 cof = Mat2::Zero();
  for (int j = 3; j < 6; ++j) cof += p[j] * cof_hess_[j];
  Matrix6d n1 = Matrix6d::Zero();
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) n1 += 0.5 * cof(s, t) * gm_[t][s].transpose();
  return n1;
}

Matrix6d LocalElement::trilinear_first_slot(const Vector6d& q) const {
  Matrix6d n2 = Matrix6d::Zero();
  Vector6d v[2][2];
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) v[s][t] = gm_[t][s].transpose() * q;
  for (int b = 3; b < 6; ++b) {
    Vector6d col = Vector6d::Zero();
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) col += 0.5 * cof_hess_[b](s, t) * v[s][t];
    n2.col(b) = col;
  }
  return n2;
}

Eigen::VectorXd LocalElement::load(const std::function<double(const Vec2&)>& f) const {
  const double p0 = rule10_.integrate(f) / area_;
  Eigen::VectorXd vec = Eigen::VectorXd::Zero(n_dofs());
  for (int i = 0; i < nv_; ++i) vec[i] = p0 * area_ / nv_;
  return vec;
}

}  // namespace vkplate
