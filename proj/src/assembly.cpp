#include "vkplate/assembly.hpp"

#include <cmath>
#include <mutex>
#include <optional>

#include "vkplate/parallel.hpp"

namespace vkplate {

void StateVector::check() const {
  if (coeffs.size() != 2 * n_dof) throw AssemblyError("state vector has wrong length");
  if (!coeffs.allFinite()) throw AssemblyError("state vector has non-finite entries");
}

DofMap build_dof_map(const PolygonalMesh& mesh) {
  DofMap dm;
  dm.vertex_dof.assign(mesh.n_vertices(), -1);
  dm.edge_dof.assign(mesh.n_edges(), -1);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (!mesh.boundary_vertex[v]) dm.vertex_dof[v] = dm.n_vertex_dofs++;
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (!mesh.boundary_edge[e]) dm.edge_dof[e] = dm.n_vertex_dofs + dm.n_edge_dofs++;
  dm.n_dof = dm.n_vertex_dofs + dm.n_edge_dofs;
  if (dm.n_dof == 0) throw AssemblyError("mesh has no interior degrees of freedom");

  dm.cell_global.resize(mesh.n_cells());
  dm.cell_sigma.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& ring = mesh.cells[c];
    const int nv = static_cast<int>(ring.size());
    auto& glob = dm.cell_global[c];
    auto& sig = dm.cell_sigma[c];
    glob.resize(2 * nv);
    sig.assign(2 * nv, 1.0);
    for (int k = 0; k < nv; ++k) glob[k] = dm.vertex_dof[ring[k]];
    for (int k = 0; k < nv; ++k) {
      const int e = mesh.cell_edges[c][k];
      glob[nv + k] = dm.edge_dof[e];
      const Vec2 a = mesh.vertices[ring[k]];
      const Vec2 b = mesh.vertices[ring[(k + 1) % nv]];
      const Vec2 t = (b - a).normalized();
      const Vec2 outward(t.y(), -t.x());
      sig[nv + k] = outward.dot(mesh.edges[e].normal) > 0 ? 1.0 : -1.0;
    }
  }
  return dm;
}

ElementTable build_elements(const PolygonalMesh& mesh, int threads) {
  ElementTable elems;
  elems.reserve(mesh.n_cells());
  std::vector<std::optional<LocalElement>> slots(mesh.n_cells());
  std::exception_ptr error;
  std::mutex error_mutex;
  parallel_for(mesh.n_cells(), threads, [&](int c) {
    try {
      slots[c].emplace(mesh, c);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);
  for (auto& s : slots) elems.push_back(std::move(*s));
  return elems;
}

Eigen::VectorXd gather_local(const DofMap& dof_map, int cell,
                             const Eigen::Ref<const Eigen::VectorXd>& field) {
  const auto& glob = dof_map.cell_global[cell];
  const auto& sig = dof_map.cell_sigma[cell];
  Eigen::VectorXd local = Eigen::VectorXd::Zero(glob.size());
  for (std::size_t i = 0; i < glob.size(); ++i)
    if (glob[i] >= 0) local[i] = sig[i] * field[glob[i]];
  return local;
}

SparseOperator assemble_stiffness(const PolygonalMesh& mesh, const ElementTable& elems,
                                  const DofMap& dof_map, int threads) {
  const int nc = mesh.n_cells();
  (void)threads;  // local matrices are precomputed in the element table
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < nc; ++c) {
    const auto& A = elems[c].stiffness().A;
    const auto& glob = dof_map.cell_global[c];
    const auto& sig = dof_map.cell_sigma[c];
    const int n = static_cast<int>(glob.size());
    for (int i = 0; i < n; ++i) {
      if (glob[i] < 0) continue;
      for (int j = 0; j < n; ++j) {
        if (glob[j] < 0) continue;
        triplets.emplace_back(glob[i], glob[j], sig[i] * sig[j] * A(i, j));
      }
    }
  }
  SparseOperator op;
  op.symmetric = true;
  op.mat.resize(dof_map.n_dof, dof_map.n_dof);
  op.mat.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

Eigen::VectorXd assemble_load(const PolygonalMesh& mesh, const ElementTable& elems,
                              const DofMap& dof_map, const std::function<double(const Vec2&)>& f,
                              const std::function<double(const Vec2&)>& g, int threads) {
  const int nc = mesh.n_cells();
  const int n = dof_map.n_dof;
  std::vector<Eigen::VectorXd> fl(nc), gl(nc);
  parallel_for(nc, threads, [&](int c) {
    fl[c] = elems[c].load(f);
    gl[c] = elems[c].load(g);
  });
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
  for (int c = 0; c < nc; ++c) {
    const auto& glob = dof_map.cell_global[c];
    const auto& sig = dof_map.cell_sigma[c];
    for (std::size_t i = 0; i < glob.size(); ++i) {
      if (glob[i] < 0) continue;
      rhs[glob[i]] += sig[i] * fl[c][i];
      rhs[n + glob[i]] += sig[i] * gl[c][i];
    }
  }
  return rhs;
}

namespace {

struct CellTrilinear {
  Eigen::VectorXd res_u, res_v;            // dof-space residual contributions
  Eigen::MatrixXd j_uu, j_uv;              // dof-space Jacobian blocks; j_vu = -j_uv
};

CellTrilinear cell_trilinear(const LocalElement& elem, const DofMap& dof_map, int c,
                             const StateVector& state, bool with_jacobian) {
  const Eigen::VectorXd u_loc = gather_local(dof_map, c, state.U());
  const Eigen::VectorXd v_loc = gather_local(dof_map, c, state.V());
  const auto& pi = elem.projector().Pi_star;
  const Vector6d pu = pi * u_loc;
  const Vector6d pv = pi * v_loc;
  const Matrix6d n1u = elem.trilinear_second_slot(pu);
  const Matrix6d n1v = elem.trilinear_second_slot(pv);

  CellTrilinear out;
  out.res_u = pi.transpose() * (n1u * pv + n1v * pu);
  out.res_v = pi.transpose() * (-(n1u * pu).eval());
  if (with_jacobian) {
    const Matrix6d n2u = elem.trilinear_first_slot(pu);
    const Matrix6d n2v = elem.trilinear_first_slot(pv);
    out.j_uu = pi.transpose() * (n1v + n2v) * pi;
    out.j_uv = pi.transpose() * (n1u + n2u) * pi;
  }
  return out;
}

}  // namespace

TrilinearSystem trilinear_scatter(const PolygonalMesh& mesh, const ElementTable& elems,
                                  const DofMap& dof_map, const StateVector& state, int threads) {
  state.check();
  const int nc = mesh.n_cells();
  const int n = dof_map.n_dof;
  std::vector<CellTrilinear> parts(nc);
  parallel_for(nc, threads, [&](int c) {
    parts[c] = cell_trilinear(elems[c], dof_map, c, state, true);
  });

  TrilinearSystem sys;
  sys.residual = Eigen::VectorXd::Zero(2 * n);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < nc; ++c) {
    const auto& glob = dof_map.cell_global[c];
    const auto& sig = dof_map.cell_sigma[c];
    const auto& p = parts[c];
    const int m = static_cast<int>(glob.size());
    for (int i = 0; i < m; ++i) {
      if (glob[i] < 0) continue;
      sys.residual[glob[i]] += sig[i] * p.res_u[i];
      sys.residual[n + glob[i]] += sig[i] * p.res_v[i];
      for (int j = 0; j < m; ++j) {
        if (glob[j] < 0) continue;
        const double s = sig[i] * sig[j];
        triplets.emplace_back(glob[i], glob[j], s * p.j_uu(i, j));
        triplets.emplace_back(glob[i], n + glob[j], s * p.j_uv(i, j));
        triplets.emplace_back(n + glob[i], glob[j], -s * p.j_uv(i, j));
      }
    }
  }
  sys.jacobian.symmetric = false;
  sys.jacobian.mat.resize(2 * n, 2 * n);
  sys.jacobian.mat.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd trilinear_residual(const PolygonalMesh& mesh, const ElementTable& elems,
                                   const DofMap& dof_map, const StateVector& state, int threads) {
  state.check();
  const int nc = mesh.n_cells();
  const int n = dof_map.n_dof;
  std::vector<CellTrilinear> parts(nc);
  parallel_for(nc, threads, [&](int c) {
    parts[c] = cell_trilinear(elems[c], dof_map, c, state, false);
  });
  Eigen::VectorXd res = Eigen::VectorXd::Zero(2 * n);
  for (int c = 0; c < nc; ++c) {
    const auto& glob = dof_map.cell_global[c];
    const auto& sig = dof_map.cell_sigma[c];
    for (std::size_t i = 0; i < glob.size(); ++i) {
      if (glob[i] < 0) continue;
      res[glob[i]] += sig[i] * parts[c].res_u[i];
      res[n + glob[i]] += sig[i] * parts[c].res_v[i];
    }
  }
  return res;
}

}  // namespace vkplate
