#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vkplate/report.hpp"
#include "vkplate/solver.hpp"

namespace {

using namespace vkplate;

struct RunConfig {
  std::string problem = "square";
  std::string family = "triangular";
  std::string domain = "unit-square";
  std::string mesh_file;
  int n = 4;
  int levels = 5;
  std::uint64_t seed = 0;
  int lloyd_iters = 3;
  double tol = 1e-8;
  int max_iter = 20;
  int threads = 0;  // 0 = unset; falls back to VKPLATE_THREADS, then 1
  std::string output;
  std::string format = "csv";

  int resolved_threads() const {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("VKPLATE_THREADS")) {
      const int t = std::atoi(env);
      if (t > 0) return t;
    }
    return 1;
  }
};

ManufacturedProblem make_problem(const std::string& tag) {
  if (tag == "square") return square_problem();
  if (tag == "lshape") return lshape_problem();
  throw ProblemError("unknown problem '" + tag + "' (expected square or lshape)");
}

nlohmann::json log_to_json(const NewtonLog& log) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& it : log.iterations)
    entries.push_back({{"update_norm", it.update_norm},
                       {"residual_norm", it.residual_norm},
                       {"wall_time_s", it.wall_time_s}});
  return entries;
}

int cmd_mesh_generate(const RunConfig& cfg) {
  const PolygonalMesh mesh = generate_mesh(mesh_family_from_string(cfg.family),
                                           domain_from_string(cfg.domain), cfg.n, cfg.seed,
                                           cfg.lloyd_iters);
  save_mesh(mesh, cfg.output);
  std::cout << "wrote " << cfg.output << ": " << mesh.n_cells() << " cells, " << mesh.n_vertices()
            << " vertices, " << mesh.n_edges() << " edges, h_max = " << mesh.h_max << "\n";
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  const ManufacturedProblem prob = make_problem(cfg.problem);
  PolygonalMesh mesh;
  if (!cfg.mesh_file.empty()) {
    mesh = load_mesh(cfg.mesh_file);
    double area = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) area += polygon_signed_area(mesh.cell_ring(c));
    if (std::abs(area - domain_area(prob.domain)) > 1e-8)
      throw MeshError("mesh area does not match the problem domain");
  } else {
    mesh = generate_mesh(mesh_family_from_string(cfg.family), prob.domain, cfg.n, cfg.seed,
                         cfg.lloyd_iters);
  }
  const int threads = cfg.resolved_threads();
  const ElementTable elems = build_elements(mesh, threads);
  const DofMap dof_map = build_dof_map(mesh);
  const Eigen::VectorXd loads = assemble_load(mesh, elems, dof_map, prob.f, prob.g, threads);
  const NewtonResult result =
      newton_solve(mesh, elems, dof_map, loads, cfg.tol, cfg.max_iter, threads);

  nlohmann::json j;
  j["n_dof"] = dof_map.n_dof;
  j["tol"] = cfg.tol;
  j["converged"] = result.log.converged;
  j["iterations"] = result.log.n_iterations();
  j["U"] = std::vector<double>(result.state.U().begin(), result.state.U().end());
  j["V"] = std::vector<double>(result.state.V().begin(), result.state.V().end());
  j["newton_log"] = log_to_json(result.log);
  std::ofstream out(cfg.output);
  if (!out) throw SolverError("cannot open '" + cfg.output + "' for writing");
  out << j.dump(2) << "\n";

  const auto& its = result.log.iterations;
  const double final_res = its.empty() ? 0.0 : its.back().residual_norm;
  std::cout << "newton: " << result.log.n_iterations() << " iterations, final residual "
            << final_res << (result.log.converged ? ", converged" : ", NOT converged") << "\n";
  if (!result.log.converged) {
    std::cerr << "error: Newton did not converge within " << cfg.max_iter << " iterations\n";
    return 3;
  }
  return 0;
}

int cmd_convergence(const RunConfig& cfg) {
  const ManufacturedProblem prob = make_problem(cfg.problem);
  const MeshFamily family = mesh_family_from_string(cfg.family);
  const int threads = cfg.resolved_threads();
  std::vector<ConvergenceRecord> records;
  int n = cfg.n;
  for (int level = 0; level < cfg.levels; ++level, n *= 2) {
    try {
      const PolygonalMesh mesh =
          generate_mesh(family, prob.domain, n, cfg.seed + static_cast<std::uint64_t>(level),
                        cfg.lloyd_iters);
      const ElementTable elems = build_elements(mesh, threads);
      const DofMap dof_map = build_dof_map(mesh);
      const Eigen::VectorXd loads = assemble_load(mesh, elems, dof_map, prob.f, prob.g, threads);
      const NewtonResult result =
          newton_solve(mesh, elems, dof_map, loads, cfg.tol, cfg.max_iter, threads);
      if (!result.log.converged)
        throw SolverError("Newton did not converge within " + std::to_string(cfg.max_iter) +
                          " iterations");
      ConvergenceRecord rec =
          compute_errors(mesh, elems, dof_map, result.state, prob, 10, threads);
      rec.level = level;
      rec.newton_iters = result.log.n_iterations();
      records.push_back(rec);
      std::cout << "level " << level << ": n = " << n << ", h = " << rec.h
                << ", ndof = " << rec.n_dof << ", newton = " << rec.newton_iters << "\n";
    } catch (const std::exception& e) {
      throw std::runtime_error("level " + std::to_string(level) + " (n = " + std::to_string(n) +
                               "): " + e.what());
    }
  }
  convergence_orders(records);
  emit(records, table_format_from_string(cfg.format), cfg.output);
  std::cout << "wrote " << cfg.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morley-type virtual element solver for the clamped von Karman plate equations"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* mesh_cmd = app.add_subcommand("mesh", "mesh utilities");
  mesh_cmd->require_subcommand(1);
  auto* gen = mesh_cmd->add_subcommand("generate", "generate a mesh file");
  gen->add_option("--family", cfg.family, "triangular|square|concave|voronoi-structured|voronoi-random");
  gen->add_option("--domain", cfg.domain, "unit-square|l-shape");
  gen->add_option("--n", cfg.n, "subdivisions per unit square")->check(CLI::PositiveNumber);
  gen->add_option("--seed", cfg.seed, "PRNG seed for random Voronoi");
  gen->add_option("--lloyd-iters", cfg.lloyd_iters, "Lloyd relaxation passes")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("-o,--output", cfg.output, "output mesh file")->required();

  auto* solve = app.add_subcommand("solve", "solve one problem instance");
  solve->add_option("--problem", cfg.problem, "square|lshape");
  solve->add_option("--mesh", cfg.mesh_file, "mesh file (overrides --family/--n)");
  solve->add_option("--family", cfg.family, "mesh family");
  solve->add_option("--n", cfg.n, "subdivisions")->check(CLI::PositiveNumber);
  solve->add_option("--seed", cfg.seed, "PRNG seed");
  solve->add_option("--lloyd-iters", cfg.lloyd_iters, "Lloyd passes")->check(CLI::NonNegativeNumber);
  solve->add_option("--tol", cfg.tol, "Newton update tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iter", cfg.max_iter, "Newton iteration cap")->check(CLI::PositiveNumber);
  solve->add_option("--threads", cfg.threads, "worker threads (env VKPLATE_THREADS)");
  solve->add_option("-o,--output", cfg.output, "solution JSON file (default solution.json)");

  auto* conv = app.add_subcommand("convergence", "run a refinement study and emit the table");
  conv->add_option("--problem", cfg.problem, "square|lshape");
  conv->add_option("--family", cfg.family, "mesh family");
  conv->add_option("--levels", cfg.levels, "number of levels (n doubles per level)")
      ->check(CLI::Range(2, 16));
  conv->add_option("--n", cfg.n, "base subdivisions")->check(CLI::PositiveNumber);
  conv->add_option("--seed", cfg.seed, "PRNG seed");
  conv->add_option("--lloyd-iters", cfg.lloyd_iters, "Lloyd passes")->check(CLI::NonNegativeNumber);
  conv->add_option("--tol", cfg.tol, "Newton update tolerance")->check(CLI::PositiveNumber);
  conv->add_option("--max-iter", cfg.max_iter, "Newton iteration cap")->check(CLI::PositiveNumber);
  conv->add_option("--threads", cfg.threads, "worker threads (env VKPLATE_THREADS)");
  conv->add_option("--format", cfg.format, "csv|markdown");
  conv->add_option("-o,--output", cfg.output, "output table file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_mesh_generate(cfg);
    if (solve->parsed()) {
      if (cfg.output.empty()) cfg.output = "solution.json";
      return cmd_solve(cfg);
    }
    if (conv->parsed()) {
      if (cfg.output.empty()) cfg.output = "convergence." + cfg.format;
      return cmd_convergence(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
