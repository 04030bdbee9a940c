#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vkplate/assembly.hpp"
#include "vkplate/problems.hpp"

namespace vkplate {

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One convergence-study level: mesh size, dof count (per scalar field), the
/// six projected errors and the Newton iteration count. Order columns are NaN
/// until convergence_orders fills them (first level stays NaN).
struct ConvergenceRecord {
  int level = 0;
  double h = 0.0;
  int n_dof = 0;
  double err_u_l2 = 0.0, err_u_h1 = 0.0, err_u_h2 = 0.0;
  double err_v_l2 = 0.0, err_v_h1 = 0.0, err_v_h2 = 0.0;
  int newton_iters = 0;
  double ord_u_l2, ord_u_h1, ord_u_h2, ord_v_l2, ord_v_h1, ord_v_h2;

  ConvergenceRecord();
};

/// Broken-norm errors of u - Pi^h u_h and v - Pi^h v_h in L2, H1 and H2,
/// integrated cellwise against the exact solution with a degree-`degree` rule.
ConvergenceRecord compute_errors(const PolygonalMesh& mesh, const ElementTable& elems,
                                 const DofMap& dof_map, const StateVector& state,
                                 const ManufacturedProblem& problem, int degree = 10,
                                 int threads = 1);

/// Fills order columns: ord_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k).
/// Nonpositive errors give NaN rather than a crash.
void convergence_orders(std::vector<ConvergenceRecord>& records);

enum class TableFormat { csv, markdown };
TableFormat table_format_from_string(const std::string& s);

std::string render_table(const std::vector<ConvergenceRecord>& records, TableFormat format);
void emit(const std::vector<ConvergenceRecord>& records, TableFormat format,
          const std::filesystem::path& path);

}  // namespace vkplate
