#ifndef ADFEM_NEWTON_HPP
#define ADFEM_NEWTON_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adfem/assembly.hpp"
#include "adfem/backend.hpp"
#include "adfem/mesh.hpp"

namespace adfem {

struct NewtonConfig {
  double rtol = 1e-10;  // relative residual target against the initial residual
  double atol = 1e-14;  // absolute floor
  int max_iter = 25;
  SolverConfig linear{};
  OperatorKind operator_kind = OperatorKind::EXPLICIT;
  std::ostream* log = nullptr;  // optional per-iteration log channel

  void validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0))
      throw std::invalid_argument("newton config: tolerances must be > 0");
    if (max_iter < 1) throw std::invalid_argument("newton config: max_iter must be >= 1");
    linear.validate();
  }
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms;  // length iterations + 1
  std::vector<SolveReport> linear_reports;
  double total_time = 0.0;
  std::string failure;
};

namespace detail {

inline double free_norm(std::span<const double> r, const ConstraintTable& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!t.constrained[i]) s += r[i] * r[i];
  return std::sqrt(s);
}

}  // namespace detail

/// Newton's method on R(u) = 0. The initial guess satisfies the Dirichlet
/// values exactly (zeros elsewhere unless a warm start is given); each step
/// solves K(u) du = -R(u) with constrained increments forced to zero, through
/// either the assembled-CSR handoff pipeline or the matrix-free operator.
inline std::pair<std::vector<double>, NewtonReport> solve_bvp(
    const Mesh& mesh, std::span<const Material> materials, const DirichletSpec& bcs,
    const NewtonConfig& cfg, std::span<const double> initial_guess = {}) {
  cfg.validate();
  validate_dirichlet(bcs, mesh);
  detail::WallTimer timer;

  const std::size_t n = static_cast<std::size_t>(mesh.n_dof());
  const std::vector<ElementBatch> batches = build_batches(mesh, materials);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const auto table = detail::constraint_table(bcs, n);

  std::vector<double> u(n, 0.0);
  if (!initial_guess.empty()) {
    if (initial_guess.size() != n)
      throw std::invalid_argument("solve_bvp: initial guess dimension mismatch");
    u.assign(initial_guess.begin(), initial_guess.end());
  }
  for (std::size_t d = 0; d < n; ++d)
    if (table.constrained[d]) u[d] = table.prescribed[d];

  HandoffBuffer buffer(pattern);
  NewtonReport rep;

  std::vector<double> residual = assemble_residual(batches, u);
  double rnorm = detail::free_norm(residual, table);
  const double r0 = rnorm;
  rep.residual_norms.push_back(rnorm);
  const double target = std::max(cfg.rtol * r0, cfg.atol);

  while (true) {
    if (!std::isfinite(rnorm)) {
      rep.failure = "newton: non-finite residual norm at iteration " +
                    std::to_string(rep.iterations);
      break;
    }
    if (rnorm <= target) {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= cfg.max_iter) {
      rep.failure = "newton: no convergence within " + std::to_string(cfg.max_iter) +
                    " iterations (residual " + std::to_string(rnorm) + ")";
      break;
    }

    std::vector<double> rhs = residual;  // eliminated in place below
    std::vector<double> du;
    SolveReport lin;
    if (cfg.operator_kind == OperatorKind::EXPLICIT) {
      CooTriplets coo = assemble_jacobian(batches, u, *pattern);
      apply_dirichlet(*pattern, coo.values, rhs, bcs, u);
      for (double& v : rhs) v = -v;
      buffer.handoff(std::move(coo));
      LeaseGuard guard(buffer);
      const LinearOperator op = explicit_operator(buffer);
      std::tie(du, lin) = run_solver(op, rhs, cfg.linear);
    } else {
      constrain_residual(rhs, bcs, u);
      for (double& v : rhs) v = -v;
      const LinearOperator op = matrix_free_operator(batches, u, bcs);
      std::tie(du, lin) = run_solver(op, rhs, cfg.linear);
    }
    rep.linear_reports.push_back(lin);

    if (!lin.converged) {
      rep.failure = "newton: linear solve failed at iteration " +
                    std::to_string(rep.iterations + 1) +
                    (lin.failure.empty() ? " (tolerance not reached)" : " (" + lin.failure + ")");
      break;
    }

    for (std::size_t d = 0; d < n; ++d) u[d] += du[d];
    for (std::size_t d = 0; d < n; ++d)
      if (table.constrained[d]) u[d] = table.prescribed[d];

    residual = assemble_residual(batches, u);
    rnorm = detail::free_norm(residual, table);
    ++rep.iterations;
    rep.residual_norms.push_back(rnorm);

    if (cfg.log) {
      char line[160];
      std::snprintf(line, sizeof line,
                    "newton iter=%d rnorm=%.6e rel=%.6e lin_iters=%d lin_time=%.3e\n",
                    rep.iterations, rnorm, r0 > 0.0 ? rnorm / r0 : 0.0, lin.iterations,
                    lin.wall_time);
      (*cfg.log) << line;
    }
  }

  rep.total_time = timer.seconds();
  return {std::move(u), std::move(rep)};
}

struct LoadSteppingReport {
  std::vector<NewtonReport> steps;
  bool converged = false;
  int failed_step = -1;  // 1-based index of the first failing step, -1 if none
  double total_time = 0.0;
};

/// Ramps the applied strain of the uniaxial benchmark linearly over n_steps,
/// warm-starting each solve from the previous converged state.
inline std::pair<std::vector<double>, LoadSteppingReport> load_stepping(
    const Mesh& mesh, std::span<const Material> materials, double total_strain,
    const NewtonConfig& cfg, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("load_stepping: n_steps must be >= 1");
  detail::WallTimer timer;
  LoadSteppingReport rep;
  std::vector<double> u;
  for (int s = 1; s <= n_steps; ++s) {
    const double strain = total_strain * s / n_steps;
    const DirichletSpec bcs = benchmark_bcs(mesh, strain);
    auto [u_s, nrep] = solve_bvp(mesh, materials, bcs, cfg, u);
    rep.steps.push_back(nrep);
    u = std::move(u_s);
    if (!nrep.converged) {
      rep.failed_step = s;
      rep.converged = false;
      rep.total_time = timer.seconds();
      return {std::move(u), std::move(rep)};
    }
  }
  rep.converged = true;
  rep.total_time = timer.seconds();
  return {std::move(u), std::move(rep)};
}

}  // namespace adfem

#endif  // ADFEM_NEWTON_HPP
