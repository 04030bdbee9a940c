#include "vkplate/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>

namespace vkplate {

namespace {

void check_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b) {
  const double res = (A * x - b).norm();
  const double bound = 1e-10 * (A.norm() * x.norm() + b.norm());
  if (!(res <= bound))
    throw SolverError("linear solve residual " + std::to_string(res) + " exceeds bound " +
                      std::to_string(bound));
}

}  // namespace

Eigen::VectorXd linear_solve(const SparseOperator& A, const Eigen::VectorXd& b) {
  if (A.mat.rows() != A.mat.cols()) throw SolverError("matrix is not square");
  if (A.mat.rows() != b.size()) throw SolverError("right-hand side length mismatch");
  Eigen::VectorXd x;
  if (A.symmetric) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A.mat);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("LDLT factorization failed (matrix not definite?)");
    if (ldlt.vectorD().minCoeff() <= 0.0)
      throw SolverError("LDLT factorization found a nonpositive pivot");
    x = ldlt.solve(b);
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A.mat);
    if (lu.info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
    x = lu.solve(b);
  }
  check_residual(A.mat, x, b);
  return x;
}

namespace {

// blockdiag(A,A) applied to a stacked vector.
Eigen::VectorXd block_apply(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd y(2 * n);
  y.head(n) = A * x.head(n);
  y.tail(n) = A * x.tail(n);
  return y;
}

double energy_norm(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(A.rows());
  const double qu = x.head(n).dot(A * x.head(n));
  const double qv = x.tail(n).dot(A * x.tail(n));
  return std::sqrt(std::max(qu + qv, 0.0));
}

Eigen::SparseMatrix<double> block_diag(const Eigen::SparseMatrix<double>& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      trip.emplace_back(static_cast<int>(it.row()) + n, static_cast<int>(it.col()) + n,
                        it.value());
    }
  Eigen::SparseMatrix<double> B(2 * n, 2 * n);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

}  // namespace

StateVector initial_guess(const SparseOperator& stiffness, const Eigen::VectorXd& loads) {
  const int n = static_cast<int>(stiffness.mat.rows());
  if (loads.size() != 2 * n) throw SolverError("load vector length mismatch");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(stiffness.mat);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
    throw SolverError("stiffness factorization failed; operator is not SPD");
  StateVector x(n);
  x.U() = ldlt.solve(loads.head(n));
  x.V() = ldlt.solve(loads.tail(n));
  check_residual(stiffness.mat, x.U(), loads.head(n));
  check_residual(stiffness.mat, x.V(), loads.tail(n));
  return x;
}

NewtonResult newton_solve(const PolygonalMesh& mesh, const ElementTable& elems,
                          const DofMap& dof_map, const Eigen::VectorXd& loads, double tol,
                          int max_iter, int threads) {
  if (!(tol > 0.0)) throw SolverError("tolerance must be positive");
  if (max_iter < 1) throw SolverError("max_iter must be at least 1");

  const SparseOperator A = assemble_stiffness(mesh, elems, dof_map, threads);
  const Eigen::SparseMatrix<double> AA = block_diag(A.mat);

  NewtonResult result;
  result.state = initial_guess(A, loads);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  for (int j = 1; j <= max_iter; ++j) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrilinearSystem sys = trilinear_scatter(mesh, elems, dof_map, result.state, threads);
    Eigen::SparseMatrix<double> newton_mat = AA + sys.jacobian.mat;
    if (!analyzed) {
      lu.analyzePattern(newton_mat);
      analyzed = true;
    }
    lu.factorize(newton_mat);
    if (lu.info() != Eigen::Success)
      throw SolverError("Newton matrix singular at iteration " + std::to_string(j) + ": " +
                        lu.lastErrorMessage());
    const Eigen::VectorXd rhs = loads + sys.residual;
    StateVector next(dof_map.n_dof);
    next.coeffs = lu.solve(rhs);

    NewtonIterationLog entry;
    entry.update_norm = energy_norm(A.mat, next.coeffs - result.state.coeffs);
    result.state = std::move(next);
    const Eigen::VectorXd nonlinear_res =
        loads - block_apply(A.mat, result.state.coeffs) -
        trilinear_residual(mesh, elems, dof_map, result.state, threads);
    entry.residual_norm = nonlinear_res.norm();
    entry.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.iterations.push_back(entry);
    if (entry.update_norm <= tol) {
      result.log.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace vkplate
