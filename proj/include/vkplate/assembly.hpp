#pragma once

#include <Eigen/Sparse>
#include <stdexcept>

#include "vkplate/element.hpp"
#include "vkplate/mesh.hpp"

namespace vkplate {

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Global numbering of the internal-vertex and internal-edge dofs with the
/// clamped boundary eliminated (boundary entities map to -1). Edge dofs carry
/// the stored global normal; cell_sigma holds the per-cell sign relating it
/// to the cell's outward normal.
struct DofMap {
  std::vector<int> vertex_dof;  // global index or -1
  std::vector<int> edge_dof;    // global index (already offset past vertices) or -1
  int n_vertex_dofs = 0;
  int n_edge_dofs = 0;
  int n_dof = 0;
  std::vector<std::vector<int>> cell_global;     // per cell: 2*nv entries
  std::vector<std::vector<double>> cell_sigma;   // per cell: 2*nv entries (+1 on vertices)
};

DofMap build_dof_map(const PolygonalMesh& mesh);

using ElementTable = std::vector<LocalElement>;
ElementTable build_elements(const PolygonalMesh& mesh, int threads = 1);

struct SparseOperator {
  Eigen::SparseMatrix<double> mat;
  bool symmetric = false;
};

/// Stacked coefficients (U; V) for the displacement and the Airy stress.
struct StateVector {
  int n_dof = 0;
  Eigen::VectorXd coeffs;

  StateVector() = default;
  explicit StateVector(int n) : n_dof(n), coeffs(Eigen::VectorXd::Zero(2 * n)) {}

  auto U() { return coeffs.head(n_dof); }
  auto V() { return coeffs.tail(n_dof); }
  auto U() const { return coeffs.head(n_dof); }
  auto V() const { return coeffs.tail(n_dof); }

  void check() const;  // finite entries, length 2*n_dof
};

/// Outward-convention dof vector of one scalar field on a cell; boundary dofs
/// read as zero.
Eigen::VectorXd gather_local(const DofMap& dof_map, int cell,
                             const Eigen::Ref<const Eigen::VectorXd>& field);

/// One-field stiffness a_h, SPD after boundary elimination.
SparseOperator assemble_stiffness(const PolygonalMesh& mesh, const ElementTable& elems,
                                  const DofMap& dof_map, int threads = 1);

/// Load vector of length 2*n_dof: U-block from f, V-block from g.
Eigen::VectorXd assemble_load(const PolygonalMesh& mesh, const ElementTable& elems,
                              const DofMap& dof_map, const std::function<double(const Vec2&)>& f,
                              const std::function<double(const Vec2&)>& g, int threads = 1);

/// Residual vector r with r.Phi = B_h(Psi,Psi,Phi) and the Newton coupling
/// Jacobian J with (J Y).Phi = B_h(Psi,Y,Phi) + B_h(Y,Psi,Phi).
struct TrilinearSystem {
  Eigen::VectorXd residual;
  SparseOperator jacobian;
};

TrilinearSystem trilinear_scatter(const PolygonalMesh& mesh, const ElementTable& elems,
                                  const DofMap& dof_map, const StateVector& state,
                                  int threads = 1);

/// Residual only (used inside the Newton loop for logging).
Eigen::VectorXd trilinear_residual(const PolygonalMesh& mesh, const ElementTable& elems,
                                   const DofMap& dof_map, const StateVector& state,
                                   int threads = 1);

}  // namespace vkplate
