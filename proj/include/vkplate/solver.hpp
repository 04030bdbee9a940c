#pragma once

#include <stdexcept>
#include <vector>

#include "vkplate/assembly.hpp"

namespace vkplate {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Direct sparse solve: symmetric-definite path (LDLT) when the operator is
/// flagged symmetric, general sparse LU otherwise. Throws on singular systems
/// and verifies ||Ax-b|| <= 1e-10 (||A|| ||x|| + ||b||).
Eigen::VectorXd linear_solve(const SparseOperator& A, const Eigen::VectorXd& b);

struct NewtonIterationLog {
  double update_norm = 0.0;    // energy norm of X^j - X^{j-1}
  double residual_norm = 0.0;  // l2 norm of F - A X - B(X,X,.)
  double wall_time_s = 0.0;
};

struct NewtonLog {
  std::vector<NewtonIterationLog> iterations;
  bool converged = false;
  int n_iterations() const { return static_cast<int>(iterations.size()); }
};

struct NewtonResult {
  StateVector state;
  NewtonLog log;
};

/// Biharmonic solve without the trilinear term: blockdiag(A,A) X = loads.
StateVector initial_guess(const SparseOperator& stiffness, const Eigen::VectorXd& loads);

/// Newton iteration on the discrete system; each step solves
/// [blockdiag(A,A) + J(X_prev)] X = loads + B(X_prev, X_prev, .) and stops
/// when the energy norm of the update drops below tol. Non-convergence is not
/// an exception: the log reports it.
NewtonResult newton_solve(const PolygonalMesh& mesh, const ElementTable& elems,
                          const DofMap& dof_map, const Eigen::VectorXd& loads, double tol = 1e-8,
                          int max_iter = 20, int threads = 1);

}  // namespace vkplate
