#include "vkplate/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "vkplate/parallel.hpp"

namespace vkplate {

ConvergenceRecord::ConvergenceRecord() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ord_u_l2 = ord_u_h1 = ord_u_h2 = ord_v_l2 = ord_v_h1 = ord_v_h2 = nan;
}

namespace {

struct CellErrors {
  double u_l2 = 0, u_h1 = 0, u_h2 = 0, v_l2 = 0, v_h1 = 0, v_h2 = 0;
};

CellErrors cell_errors(const LocalElement& elem, const DofMap& dof_map, int c,
                       const StateVector& state, const ManufacturedProblem& prob, int degree) {
  const Vector6d pu = elem.project(gather_local(dof_map, c, state.U()));
  const Vector6d pv = elem.project(gather_local(dof_map, c, state.V()));
  const LocalBasis& basis = elem.basis();
  const Mat2 hu = basis.hess(pu);
  const Mat2 hv = basis.hess(pv);
  const PolygonQuadrature local_rule =
      degree == 10 ? PolygonQuadrature{} : polygon_rule(elem.ring(), degree, c);
  const PolygonQuadrature& rule = degree == 10 ? elem.rule10() : local_rule;

  CellErrors e;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Vec2& p = rule.points[q];
    const double w = rule.weights[q];
    const double du = prob.u(p) - basis.eval(pu, p);
    const double dv = prob.v(p) - basis.eval(pv, p);
    const Vec2 gu = prob.grad_u(p) - basis.grad(pu, p);
    const Vec2 gv = prob.grad_v(p) - basis.grad(pv, p);
    const Mat2 dhu = prob.hess_u(p) - hu;
    const Mat2 dhv = prob.hess_v(p) - hv;
    e.u_l2 += w * du * du;
    e.v_l2 += w * dv * dv;
    e.u_h1 += w * gu.squaredNorm();
    e.v_h1 += w * gv.squaredNorm();
    e.u_h2 += w * dhu.squaredNorm();
    e.v_h2 += w * dhv.squaredNorm();
  }
  return e;
}

}  // namespace

ConvergenceRecord compute_errors(const PolygonalMesh& mesh, const ElementTable& elems,
                                 const DofMap& dof_map, const StateVector& state,
                                 const ManufacturedProblem& problem, int degree, int threads) {
  state.check();
  const int nc = mesh.n_cells();
  std::vector<CellErrors> parts(nc);
  parallel_for(nc, threads, [&](int c) {
    parts[c] = cell_errors(elems[c], dof_map, c, state, problem, degree);
  });
  CellErrors sum;
  for (const auto& p : parts) {
    sum.u_l2 += p.u_l2;
    sum.u_h1 += p.u_h1;
    sum.u_h2 += p.u_h2;
    sum.v_l2 += p.v_l2;
    sum.v_h1 += p.v_h1;
    sum.v_h2 += p.v_h2;
  }
  ConvergenceRecord rec;
  rec.h = mesh.h_max;
  rec.n_dof = dof_map.n_dof;
  rec.err_u_l2 = std::sqrt(sum.u_l2);
  rec.err_u_h1 = std::sqrt(sum.u_h1);
  rec.err_u_h2 = std::sqrt(sum.u_h2);
  rec.err_v_l2 = std::sqrt(sum.v_l2);
  rec.err_v_h1 = std::sqrt(sum.v_h1);
  rec.err_v_h2 = std::sqrt(sum.v_h2);
  return rec;
}

namespace {

double order_of(double e_prev, double e_cur, double h_prev, double h_cur) {
  if (!(e_prev > 0.0) || !(e_cur > 0.0) || !std::isfinite(e_prev) || !std::isfinite(e_cur))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

}  // namespace

void convergence_orders(std::vector<ConvergenceRecord>& records) {
  if (records.size() < 2) throw ReportError("need at least two levels to compute orders");
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (!(records[k].h < records[k - 1].h))
      throw ReportError("mesh sizes must decrease strictly across levels");
    auto& r = records[k];
    const auto& p = records[k - 1];
    r.ord_u_l2 = order_of(p.err_u_l2, r.err_u_l2, p.h, r.h);
    r.ord_u_h1 = order_of(p.err_u_h1, r.err_u_h1, p.h, r.h);
    r.ord_u_h2 = order_of(p.err_u_h2, r.err_u_h2, p.h, r.h);
    r.ord_v_l2 = order_of(p.err_v_l2, r.err_v_l2, p.h, r.h);
    r.ord_v_h1 = order_of(p.err_v_h1, r.err_v_h1, p.h, r.h);
    r.ord_v_h2 = order_of(p.err_v_h2, r.err_v_h2, p.h, r.h);
  }
}

namespace {

// Shortest round-trip decimal form.
std::string num(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string ord_csv(double x) { return std::isnan(x) ? std::string() : num(x); }

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string ord_md(double x) { return std::isnan(x) ? std::string("-") : fixed(x, 4); }

}  // namespace

std::string render_table(const std::vector<ConvergenceRecord>& records, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "level,h,ndof,err_u_l2,ord_u_l2,err_u_h1,ord_u_h1,err_u_h2,ord_u_h2,"
           "err_v_l2,ord_v_l2,err_v_h1,ord_v_h1,err_v_h2,ord_v_h2,newton_iters\n";
    for (const auto& r : records) {
      out << r.level << ',' << num(r.h) << ',' << r.n_dof << ',' << num(r.err_u_l2) << ','
          << ord_csv(r.ord_u_l2) << ',' << num(r.err_u_h1) << ',' << ord_csv(r.ord_u_h1) << ','
          << num(r.err_u_h2) << ',' << ord_csv(r.ord_u_h2) << ',' << num(r.err_v_l2) << ','
          << ord_csv(r.ord_v_l2) << ',' << num(r.err_v_h1) << ',' << ord_csv(r.ord_v_h1) << ','
          << num(r.err_v_h2) << ',' << ord_csv(r.ord_v_h2) << ',' << r.newton_iters << '\n';
    }
    return out.str();
  }
  out << "| h | err(u) | order | err(grad u) | order | err(Hu) | order |\n";
  out << "|---|--------|-------|-------------|-------|---------|-------|\n";
  for (const auto& r : records)
    out << "| " << fixed(r.h, 6) << " | " << fixed(r.err_u_l2, 6) << " | " << ord_md(r.ord_u_l2)
        << " | " << fixed(r.err_u_h1, 6) << " | " << ord_md(r.ord_u_h1) << " | "
        << fixed(r.err_u_h2, 6) << " | " << ord_md(r.ord_u_h2) << " |\n";
  out << "\n";
  out << "| h | err(v) | order | err(grad v) | order | err(Hv) | order |\n";
  out << "|---|--------|-------|-------------|-------|---------|-------|\n";
  for (const auto& r : records)
    out << "| " << fixed(r.h, 6) << " | " << fixed(r.err_v_l2, 6) << " | " << ord_md(r.ord_v_l2)
        << " | " << fixed(r.err_v_h1, 6) << " | " << ord_md(r.ord_v_h1) << " | "
        << fixed(r.err_v_h2, 6) << " | " << ord_md(r.ord_v_h2) << " |\n";
  out << "\n";
  out << "| level | ndof | newton iters |\n|-------|------|--------------|\n";
  for (const auto& r : records)
    out << "| " << r.level << " | " << r.n_dof << " | " << r.newton_iters << " |\n";
  return out.str();
}

TableFormat table_format_from_string(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "markdown" || s == "md") return TableFormat::markdown;
  throw ReportError("unknown table format '" + s + "'");
}

void emit(const std::vector<ConvergenceRecord>& records, TableFormat format,
          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ReportError("cannot open '" + path.string() + "' for writing");
  out << render_table(records, format);
  if (!out) throw ReportError("failed writing '" + path.string() + "'");
}

}  // namespace vkplate
