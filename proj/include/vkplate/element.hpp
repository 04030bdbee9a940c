#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "vkplate/mesh.hpp"
#include "vkplate/quadrature.hpp"

namespace vkplate {

struct ElementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Scaled monomial basis of P2 on a cell: {1, xi, eta, xi^2, xi*eta, eta^2}
/// with xi = (x - x_K)/h_K, eta = (y - y_K)/h_K. Hessians are constant.
struct LocalBasis {
  Vec2 centroid = Vec2::Zero();
  double h = 1.0;

  double eval(int j, const Vec2& p) const;
  Vec2 grad(int j, const Vec2& p) const;
  Mat2 hess(int j) const;

  double eval(const Vector6d& coeff, const Vec2& p) const;
  Vec2 grad(const Vector6d& coeff, const Vec2& p) const;
  Mat2 hess(const Vector6d& coeff) const;

  /// Scaled coefficients of c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2.
  Vector6d from_global_quadratic(const Vector6d& c) const;
};

/// Dof-computable matrices of the energy projector onto P2. Local dof order:
/// the cell's vertex values, then its edge normal moments taken with the
/// outward normal of the cell.
struct ProjectorMatrices {
  Eigen::MatrixXd D;        // N x 6, dofs of monomials
  Matrix6d G;               // a^K(m_j, m_k)
  Eigen::MatrixXd Pi_star;  // 6 x N, dofs -> projected coefficients
  Eigen::MatrixXd Pi_dof;   // N x N = D * Pi_star, idempotent
};

struct LocalStiffness {
  Eigen::MatrixXd consistency;    // Pi_star^T G Pi_star
  Eigen::MatrixXd stabilization;  // (I-Pi_dof)^T diag(h^-2) (I-Pi_dof)
  Eigen::MatrixXd A;              // sum of the two
};

/// Per-cell Morley-type virtual element: dof functionals, projector, stiffness
/// with dof stabilization, the projected trilinear form and the vertex-average
/// load. All quantities are pure functions of the cell geometry.
class LocalElement {
 public:
  LocalElement(const PolygonalMesh& mesh, int cell);
  /// Standalone cell (tests); stored edge normals are taken outward (sigma=1).
  explicit LocalElement(std::vector<Vec2> ring, int cell = -1);

  int cell() const { return cell_; }
  int n_vertices() const { return nv_; }
  int n_dofs() const { return 2 * nv_; }
  double area() const { return area_; }
  double diameter() const { return basis_.h; }
  const LocalBasis& basis() const { return basis_; }
  const std::vector<Vec2>& ring() const { return ring_; }
  double edge_length(int k) const { return edge_len_[k]; }
  Vec2 outward_normal(int k) const { return normal_[k]; }
  double sigma(int k) const { return sigma_[k]; }

  const ProjectorMatrices& projector() const { return proj_; }
  const LocalStiffness& stiffness() const { return stiff_; }
  const PolygonQuadrature& rule2() const { return rule2_; }
  const PolygonQuadrature& rule10() const { return rule10_; }

  /// Dof vector of a smooth function; edge moments use the mesh's stored
  /// global normals and a 5-point Gauss rule per edge.
  Eigen::VectorXd interpolate(const std::function<double(const Vec2&)>& f,
                              const std::function<Vec2(const Vec2&)>& grad_f) const;

  /// Convert between the stored-normal dof convention and the outward one.
  Eigen::VectorXd to_outward(const Eigen::VectorXd& stored_convention) const;

  /// M = integral of the Hessian over the cell from outward-convention dofs,
  /// by the divergence identity; symmetric by construction.
  Mat2 hessian_moment(const Eigen::VectorXd& dofs) const;

  /// Coefficients of Pi^K applied to the dof vector (outward convention).
  Vector6d project(const Eigen::VectorXd& dofs) const;

  /// b_h^K on projected coefficients: 1/2 int_K cof(D^2 p) grad q . grad r.
  double trilinear(const Vector6d& p, const Vector6d& q, const Vector6d& r) const;
  /// Matrix of q -> b_h^K(p, q, m_j) for fixed first slot.
  Matrix6d trilinear_second_slot(const Vector6d& p) const;
  /// Matrix of p -> b_h^K(p, q, m_j) for fixed second slot.
  Matrix6d trilinear_first_slot(const Vector6d& q) const;

  /// Vertex-average load vector: entries (P0 f) |K| / n on vertex dofs.
  Eigen::VectorXd load(const std::function<double(const Vec2&)>& f) const;

 private:
  void build();

  int cell_;
  int nv_;
  std::vector<Vec2> ring_;
  std::vector<double> edge_len_;
  std::vector<Vec2> tangent_;  // unit, in ring traversal direction
  std::vector<Vec2> normal_;   // outward unit normals
  std::vector<double> sigma_;  // outward . stored global normal (+-1)
  double area_;
  LocalBasis basis_;
  PolygonQuadrature rule2_, rule10_;
  Matrix6d gm_[2][2];  // gm_[s][t](a,b) = int d_s m_a d_t m_b
  Mat2 cof_hess_[6];
  ProjectorMatrices proj_;
  LocalStiffness stiff_;
};

}  // namespace vkplate
