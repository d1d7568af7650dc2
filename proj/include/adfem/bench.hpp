#ifndef ADFEM_BENCH_HPP
#define ADFEM_BENCH_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "adfem/newton.hpp"
#include "adfem/verify.hpp"

#include "json.hpp"

namespace adfem::bench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Benchmark configuration; the JSON config file mirrors these fields (see
/// README for the key schema).
struct BenchConfig {
  // mesh series
  RefineBase mesh{16, 16, 1.0, 1.0, {0.5, 0.5}, 0.25};
  int levels = 3;
  // per-phase materials: phase 0 = matrix, phase 1 = inclusion
  std::vector<Material> materials{Material{MaterialModel::StVenantKirchhoff, 1.0, 0.3},
                                  Material{MaterialModel::LinearElasticPlaneStrain, 10.0, 0.3}};
  double strain = 0.01;
  // iterative-solver grid
  std::vector<SolverMethod> methods{SolverMethod::CG, SolverMethod::GMRES,
                                    SolverMethod::BICGSTAB};
  std::vector<PreconKind> preconditioners{PreconKind::NONE, PreconKind::JACOBI, PreconKind::ILU0};
  double rtol = 1e-13;
  int max_iter = 5000;
  int gmres_restart = 30;
  // nonlinear driver
  std::vector<OperatorKind> newton_operators{OperatorKind::EXPLICIT, OperatorKind::MATRIX_FREE};
  double newton_rtol = 1e-10;
  double newton_atol = 1e-14;
  int newton_max_iter = 25;
  SolverMethod newton_linear = SolverMethod::CG;
  PreconKind newton_pc = PreconKind::JACOBI;
  int newton_linear_max_iter = 20000;
  // run control
  int reps = 3;
  std::uint64_t seed = 12345;

  void validate() const {
    if (reps < 1) throw ConfigError("config: reps must be >= 1");
    if (levels < 1) throw ConfigError("config: levels must be >= 1");
    if (methods.empty() || preconditioners.empty())
      throw ConfigError("config: solver grid must be non-empty");
    if (!(rtol > 0.0) || max_iter < 1 || gmres_restart < 1)
      throw ConfigError("config: invalid solver settings");
    for (const Material& m : materials) m.validate();
    for (OperatorKind k : newton_operators) {
      if (k != OperatorKind::MATRIX_FREE) continue;
      if (newton_pc == PreconKind::ILU0)
        throw ConfigError("config: ILU0 preconditioning cannot pair with MATRIX_FREE");
      if (newton_linear == SolverMethod::DIRECT_CHOL || newton_linear == SolverMethod::DIRECT_LU)
        throw ConfigError("config: direct solvers cannot pair with MATRIX_FREE");
    }
  }
};

namespace detail_cfg {

inline SolverMethod parse_method(const std::string& s) {
  if (s == "cg" || s == "CG") return SolverMethod::CG;
  if (s == "gmres" || s == "GMRES") return SolverMethod::GMRES;
  if (s == "bicgstab" || s == "BICGSTAB" || s == "bcgs") return SolverMethod::BICGSTAB;
  if (s == "direct_chol" || s == "DIRECT_CHOL") return SolverMethod::DIRECT_CHOL;
  if (s == "direct_lu" || s == "DIRECT_LU") return SolverMethod::DIRECT_LU;
  throw ConfigError("config: unknown solver method '" + s + "'");
}

inline PreconKind parse_pc(const std::string& s) {
  if (s == "none" || s == "NONE") return PreconKind::NONE;
  if (s == "jacobi" || s == "JACOBI") return PreconKind::JACOBI;
  if (s == "ilu0" || s == "ILU0" || s == "ilu") return PreconKind::ILU0;
  throw ConfigError("config: unknown preconditioner '" + s + "'");
}

inline OperatorKind parse_operator(const std::string& s) {
  if (s == "explicit" || s == "EXPLICIT") return OperatorKind::EXPLICIT;
  if (s == "matrix_free" || s == "MATRIX_FREE") return OperatorKind::MATRIX_FREE;
  throw ConfigError("config: unknown operator kind '" + s + "'");
}

inline Material parse_material(const nlohmann::json& j) {
  Material m;
  const std::string model = j.value("model", "linear");
  if (model == "linear") {
    m.model = MaterialModel::LinearElasticPlaneStrain;
  } else if (model == "svk") {
    m.model = MaterialModel::StVenantKirchhoff;
  } else {
    throw ConfigError("config: unknown material model '" + model + "'");
  }
  m.E = j.value("E", 1.0);
  m.nu = j.value("nu", 0.3);
  return m;
}

}  // namespace detail_cfg

inline BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: parse error in '" + path + "': " + e.what());
  }

  BenchConfig cfg;
  try {
    if (j.contains("mesh")) {
      const auto& m = j["mesh"];
      cfg.mesh.nx = m.value("nx", cfg.mesh.nx);
      cfg.mesh.ny = m.value("ny", cfg.mesh.ny);
      cfg.mesh.lx = m.value("lx", cfg.mesh.lx);
      cfg.mesh.ly = m.value("ly", cfg.mesh.ly);
      if (m.contains("inclusion_center")) {
        cfg.mesh.inclusion_center = {m["inclusion_center"].at(0).get<double>(),
                                     m["inclusion_center"].at(1).get<double>()};
      }
      cfg.mesh.inclusion_radius = m.value("inclusion_radius", cfg.mesh.inclusion_radius);
      cfg.levels = m.value("levels", cfg.levels);
    }
    if (j.contains("materials")) {
      const auto& mats = j["materials"];
      if (mats.contains("matrix")) cfg.materials[0] = detail_cfg::parse_material(mats["matrix"]);
      if (mats.contains("inclusion"))
        cfg.materials[1] = detail_cfg::parse_material(mats["inclusion"]);
    }
    cfg.strain = j.value("strain", cfg.strain);
    if (j.contains("solvers")) {
      const auto& s = j["solvers"];
      if (s.contains("methods")) {
        cfg.methods.clear();
        for (const auto& v : s["methods"]) cfg.methods.push_back(detail_cfg::parse_method(v));
      }
      if (s.contains("preconditioners")) {
        cfg.preconditioners.clear();
        for (const auto& v : s["preconditioners"])
          cfg.preconditioners.push_back(detail_cfg::parse_pc(v));
      }
      cfg.rtol = s.value("rtol", cfg.rtol);
      cfg.max_iter = s.value("max_iter", cfg.max_iter);
      cfg.gmres_restart = s.value("gmres_restart", cfg.gmres_restart);
    }
    if (j.contains("newton")) {
      const auto& nw = j["newton"];
      cfg.newton_rtol = nw.value("rtol", cfg.newton_rtol);
      cfg.newton_atol = nw.value("atol", cfg.newton_atol);
      cfg.newton_max_iter = nw.value("max_iter", cfg.newton_max_iter);
      if (nw.contains("linear_method"))
        cfg.newton_linear = detail_cfg::parse_method(nw["linear_method"]);
      if (nw.contains("preconditioner")) cfg.newton_pc = detail_cfg::parse_pc(nw["preconditioner"]);
      cfg.newton_linear_max_iter = nw.value("linear_max_iter", cfg.newton_linear_max_iter);
      if (nw.contains("operators")) {
        cfg.newton_operators.clear();
        for (const auto& v : nw["operators"])
          cfg.newton_operators.push_back(detail_cfg::parse_operator(v));
      }
    }
    cfg.reps = j.value("reps", cfg.reps);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

/// One row of the results CSV.
struct BenchRecord {
  std::string experiment;
  int dof = 0;
  std::string method;
  std::string pc;
  std::string op;
  bool converged = false;
  long iterations = 0;
  double time_s = 0.0;
  double final_rres = 0.0;
};

inline constexpr const char* kCsvHeader =
    "experiment,dof,method,pc,operator,converged,iters,time_s,final_rres";

inline void write_csv(std::ostream& os, std::span<const BenchRecord> records,
                      const BenchConfig& cfg, const std::string& experiment) {
  char line[256];
  std::snprintf(line, sizeof line,
                "# adfem bench: experiment=%s seed=%llu reps=%d timing=steady_clock "
                "summary=min_over_reps\n",
                experiment.c_str(), static_cast<unsigned long long>(cfg.seed), cfg.reps);
  os << line << kCsvHeader << "\n";
  for (const BenchRecord& r : records) {
    std::snprintf(line, sizeof line, "%s,%d,%s,%s,%s,%d,%ld,%.6e,%.17g\n", r.experiment.c_str(),
                  r.dof, r.method.c_str(), r.pc.c_str(), r.op.c_str(), r.converged ? 1 : 0,
                  r.iterations, r.time_s, r.final_rres);
    os << line;
  }
}

namespace detail_run {

struct AssembledSystem {
  Mesh mesh;
  std::vector<ElementBatch> batches;
  std::shared_ptr<const SparsityPattern> pattern;
  DirichletSpec bcs;
  std::vector<double> u0;
  CooTriplets coo;           // eliminated
  std::vector<double> rhs;   // -R(u0), eliminated
};

/// Benchmark linearization at the Dirichlet-consistent initial state.
inline AssembledSystem assemble_benchmark_system(const Mesh& mesh,
                                                 std::span<const Material> materials,
                                                 double strain) {
  AssembledSystem sys;
  sys.mesh = mesh;
  sys.batches = build_batches(sys.mesh, materials);
  sys.pattern = precompute_sparsity(sys.batches, sys.mesh.n_dof());
  sys.bcs = benchmark_bcs(sys.mesh, strain);
  const auto table = detail::constraint_table(sys.bcs, static_cast<std::size_t>(sys.mesh.n_dof()));
  sys.u0.assign(static_cast<std::size_t>(sys.mesh.n_dof()), 0.0);
  for (std::size_t d = 0; d < sys.u0.size(); ++d)
    if (table.constrained[d]) sys.u0[d] = table.prescribed[d];
  sys.coo = assemble_jacobian(sys.batches, sys.u0, *sys.pattern);
  std::vector<double> residual = assemble_residual(sys.batches, sys.u0);
  apply_dirichlet(*sys.pattern, sys.coo.values, residual, sys.bcs, sys.u0);
  for (double& v : residual) v = -v;
  sys.rhs = std::move(residual);
  return sys;
}

}  // namespace detail_run

/// 100 sparse matrix-vector products on the assembled benchmark Jacobian of
/// each mesh in the series, on a fixed random vector; one record per rep.
inline std::vector<BenchRecord> cmd_spmv(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<BenchRecord> records;
  for (const Mesh& mesh : refine_series(cfg.mesh, cfg.levels)) {
    auto sys = detail_run::assemble_benchmark_system(mesh, cfg.materials, cfg.strain);
    HandoffBuffer buffer(sys.pattern);
    buffer.handoff(std::move(sys.coo));
    LeaseGuard guard(buffer);
    const LinearOperator op = explicit_operator(buffer);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(mesh.n_dof()));
    for (double& v : x) v = dist(rng);
    std::vector<double> y(x.size());

    for (int rep = 0; rep < cfg.reps; ++rep) {
      detail::WallTimer timer;
      for (int k = 0; k < 100; ++k) op.apply(x, y);
      records.push_back({"spmv", mesh.n_dof(), "SPMV", "NONE", "EXPLICIT", true, 100,
                         timer.seconds(), 0.0});
    }
  }
  return records;
}

/// Solver x preconditioner grid on the linearized benchmark system of each
/// mesh. Non-convergent runs are recorded, never dropped. Direct methods in
/// the grid run once per mesh (preconditioners do not apply to them).
inline std::vector<BenchRecord> cmd_solvers(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<BenchRecord> records;
  for (const Mesh& mesh : refine_series(cfg.mesh, cfg.levels)) {
    auto sys = detail_run::assemble_benchmark_system(mesh, cfg.materials, cfg.strain);
    HandoffBuffer buffer(sys.pattern);
    buffer.handoff(std::move(sys.coo));
    LeaseGuard guard(buffer);
    const LinearOperator op = explicit_operator(buffer);

    for (const SolverMethod method : cfg.methods) {
      const bool direct =
          method == SolverMethod::DIRECT_CHOL || method == SolverMethod::DIRECT_LU;
      const std::vector<PreconKind> pcs =
          direct ? std::vector<PreconKind>{PreconKind::NONE} : cfg.preconditioners;
      for (const PreconKind pc : pcs) {
        for (int rep = 0; rep < cfg.reps; ++rep) {
          SolverConfig scfg;
          scfg.method = method;
          scfg.preconditioner = pc;
          scfg.rtol = cfg.rtol;
          scfg.max_iter = cfg.max_iter;
          scfg.gmres_restart = cfg.gmres_restart;
          const auto [x, rep_s] = run_solver(op, sys.rhs, scfg);
          records.push_back({"solvers", mesh.n_dof(), to_string(method), to_string(pc),
                             "EXPLICIT", rep_s.converged, rep_s.iterations, rep_s.wall_time,
                             rep_s.residual_history.back()});
        }
      }
    }
  }
  return records;
}

/// Banded Cholesky and LU as direct solvers across the mesh series.
inline std::vector<BenchRecord> cmd_direct(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<BenchRecord> records;
  for (const Mesh& mesh : refine_series(cfg.mesh, cfg.levels)) {
    auto sys = detail_run::assemble_benchmark_system(mesh, cfg.materials, cfg.strain);
    HandoffBuffer buffer(sys.pattern);
    buffer.handoff(std::move(sys.coo));
    LeaseGuard guard(buffer);
    const LinearOperator op = explicit_operator(buffer);

    for (const SolverMethod method : {SolverMethod::DIRECT_CHOL, SolverMethod::DIRECT_LU}) {
      for (int rep = 0; rep < cfg.reps; ++rep) {
        SolverConfig scfg;
        scfg.method = method;
        const auto [x, rep_s] = run_solver(op, sys.rhs, scfg);
        records.push_back({"direct", mesh.n_dof(), to_string(method), "NONE", "EXPLICIT",
                           rep_s.converged, rep_s.iterations, rep_s.wall_time,
                           rep_s.failure.empty() ? rep_s.residual_history.back()
                                                 : std::numeric_limits<double>::quiet_NaN()});
      }
    }
  }
  return records;
}

struct NewtonRunResult {
  std::vector<BenchRecord> records;
  // final states per (mesh level, operator kind), for cross-checks
  std::vector<std::vector<double>> states;
  std::string log_text;
};

/// Full nonlinear benchmark under every configured operator kind with
/// identical linear settings; per-iteration logs are captured for persisting.
inline NewtonRunResult cmd_newton(const BenchConfig& cfg) {
  cfg.validate();
  NewtonRunResult out;
  std::ostringstream log;
  for (const Mesh& mesh : refine_series(cfg.mesh, cfg.levels)) {
    for (const OperatorKind kind : cfg.newton_operators) {
      NewtonConfig ncfg;
      ncfg.rtol = cfg.newton_rtol;
      ncfg.atol = cfg.newton_atol;
      ncfg.max_iter = cfg.newton_max_iter;
      ncfg.operator_kind = kind;
      ncfg.linear.method = cfg.newton_linear;
      ncfg.linear.preconditioner = cfg.newton_pc;
      ncfg.linear.rtol = cfg.rtol;
      ncfg.linear.max_iter = cfg.newton_linear_max_iter;
      ncfg.linear.gmres_restart = cfg.gmres_restart;
      ncfg.log = &log;

      log << "# newton dof=" << mesh.n_dof() << " operator=" << to_string(kind) << "\n";
      const DirichletSpec bcs = benchmark_bcs(mesh, cfg.strain);
      const auto [u, rep] = solve_bvp(mesh, cfg.materials, bcs, ncfg);
      const double r0 = rep.residual_norms.front();
      const double rel = r0 > 0.0 ? rep.residual_norms.back() / r0 : 0.0;
      long lin_iters = 0;
      for (const auto& lr : rep.linear_reports) lin_iters += lr.iterations;
      out.records.push_back({"newton", mesh.n_dof(), to_string(cfg.newton_linear),
                             to_string(cfg.newton_pc), to_string(kind), rep.converged,
                             rep.iterations, rep.total_time, rel});
      out.states.push_back(u);
      log << "# done converged=" << (rep.converged ? 1 : 0) << " newton_iters=" << rep.iterations
          << " linear_iters_total=" << lin_iters << "\n";
    }
  }
  out.log_text = log.str();
  return out;
}

/// Oracle suite; prints one table row per check. Returns 0 when everything
/// passes, 1 otherwise.
inline int cmd_verify(std::ostream& os, const VerifyOptions& opts = {}) {
  const std::vector<CheckResult> results = run_verification(opts);
  bool all = true;
  os << "check                          status  detail\n";
  for (const CheckResult& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%-30s %-7s %s\n", r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.detail.c_str());
    os << line;
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace adfem::bench

#endif  // ADFEM_BENCH_HPP
