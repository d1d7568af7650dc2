#ifndef ADFEM_VERIFY_HPP
#define ADFEM_VERIFY_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adfem/newton.hpp"

namespace adfem {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0x5eed5eedULL;
  // Fault-injection hook for the dense-equivalence check: adds delta to one
  // assembled value so a perturbed pipeline is guaranteed to be caught.
  int perturb_index = -1;
  double perturb_delta = 0.0;
  bool parallel = false;
};

namespace verify_detail {

inline std::vector<Material> two_phase_materials() {
  return {Material{MaterialModel::StVenantKirchhoff, 1.0, 0.3},
          Material{MaterialModel::LinearElasticPlaneStrain, 10.0, 0.3}};
}

inline std::vector<double> random_state(std::size_t n, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> u(n);
  for (double& v : u) v = dist(rng);
  return u;
}

inline std::vector<double> expand_dense(const CooTriplets& coo) {
  std::vector<double> dense(static_cast<std::size_t>(coo.n) * coo.n, 0.0);
  for (std::size_t k = 0; k < coo.size(); ++k)
    dense[static_cast<std::size_t>(coo.rows[k]) * coo.n + coo.cols[k]] += coo.values[k];
  return dense;
}

inline char* fmt(char* buf, std::size_t cap, const char* f, double a, double b) {
  std::snprintf(buf, cap, f, a, b);
  return buf;
}

}  // namespace verify_detail

/// Assembled K(u) against central finite differences of the residual on a
/// random two-phase 2x2 state.
inline CheckResult check_fd_vs_ad(std::uint64_t seed) {
  using namespace verify_detail;
  const Mesh mesh = generate_two_phase_mesh(2, 2, 1.0, 1.0, {0.25, 0.25}, 0.3);
  const auto mats = two_phase_materials();
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  std::mt19937_64 rng(seed);
  std::vector<double> u = random_state(static_cast<std::size_t>(mesh.n_dof()), 0.01, rng);

  const CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  const std::vector<double> k_ad = expand_dense(coo);

  const int n = mesh.n_dof();
  const double h = 1e-6;
  std::vector<double> k_fd(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    std::vector<double> up(u), um(u);
    up[static_cast<std::size_t>(j)] += h;
    um[static_cast<std::size_t>(j)] -= h;
    const auto rp = assemble_residual(batches, up);
    const auto rm = assemble_residual(batches, um);
    for (int i = 0; i < n; ++i)
      k_fd[static_cast<std::size_t>(i) * n + j] = (rp[static_cast<std::size_t>(i)] -
                                                   rm[static_cast<std::size_t>(i)]) / (2.0 * h);
  }

  double max_diff = 0.0, max_ref = 0.0;
  for (std::size_t k = 0; k < k_ad.size(); ++k) {
    max_diff = std::max(max_diff, std::abs(k_ad[k] - k_fd[k]));
    max_ref = std::max(max_ref, std::abs(k_ad[k]));
  }
  const double rel = max_diff / max_ref;
  char buf[96];
  return {"fd-vs-ad-jacobian", rel <= 1e-5,
          fmt(buf, sizeof buf, "rel inf err %.3e (tol %.0e)", rel, 1e-5)};
}

/// Deduplicated-COO assembly against a dense brute-force scatter of the same
/// element blocks, on a family of meshes up to 3x3.
inline CheckResult check_dense_equivalence(std::uint64_t seed, int perturb_index = -1,
                                           double perturb_delta = 0.0) {
  using namespace verify_detail;
  std::mt19937_64 rng(seed);
  const auto mats = two_phase_materials();
  double worst = 0.0;
  for (const auto& [nx, ny] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 3}}) {
    const Mesh mesh = generate_two_phase_mesh(nx, ny, 1.0, 1.0, {0.5, 0.5}, 0.35);
    const auto batches = build_batches(mesh, mats);
    const auto pattern = precompute_sparsity(batches, mesh.n_dof());
    std::vector<double> u = random_state(static_cast<std::size_t>(mesh.n_dof()), 0.01, rng);

    CooTriplets coo = assemble_jacobian(batches, u, *pattern);
    if (perturb_index >= 0 && perturb_index < static_cast<int>(coo.size()))
      coo.values[static_cast<std::size_t>(perturb_index)] += perturb_delta;
    const std::vector<double> from_coo = expand_dense(coo);

    // Brute force: dense scatter of per-element blocks, no sparse machinery.
    const int n = mesh.n_dof();
    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& b : batches) {
      const auto xs = detail::gather_states(b, u);
      const auto blocks = batched_jacobian(detail::BatchKernel{&b},
                                           std::span<const std::vector<double>>(xs));
      for (std::size_t e = 0; e < b.size(); ++e)
        for (int i = 0; i < 8; ++i)
          for (int j = 0; j < 8; ++j)
            dense[static_cast<std::size_t>(b.dof_map[e][i]) * n + b.dof_map[e][j]] +=
                blocks[e](i, j);
    }
    for (std::size_t k = 0; k < dense.size(); ++k)
      worst = std::max(worst, std::abs(dense[k] - from_coo[k]));
  }
  char buf[96];
  return {"dense-assembly-equivalence", worst <= 1e-13,
          fmt(buf, sizeof buf, "inf err %.3e (tol %.0e)", worst, 1e-13)};
}

/// Matrix-free apply against explicit spmv through the full handoff pipeline
/// on the 16x16 two-phase benchmark, 20 random vectors.
inline CheckResult check_operator_equivalence(std::uint64_t seed) {
  using namespace verify_detail;
  const Mesh mesh = generate_two_phase_mesh(16, 16, 1.0, 1.0, {0.5, 0.5}, 0.25);
  const auto mats = two_phase_materials();
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const DirichletSpec bcs = benchmark_bcs(mesh, 0.01);
  const auto table = detail::constraint_table(bcs, static_cast<std::size_t>(mesh.n_dof()));

  std::vector<double> u(static_cast<std::size_t>(mesh.n_dof()), 0.0);
  for (std::size_t d = 0; d < u.size(); ++d)
    if (table.constrained[d]) u[d] = table.prescribed[d];

  CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  std::vector<double> dummy_res(u.size(), 0.0);
  apply_dirichlet(*pattern, coo.values, dummy_res, bcs, u);
  HandoffBuffer buffer(pattern);
  buffer.handoff(std::move(coo));
  LeaseGuard guard(buffer);
  const LinearOperator a_explicit = explicit_operator(buffer);
  const LinearOperator a_free = matrix_free_operator(batches, u, bcs);

  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::vector<double> ye(u.size()), yf(u.size());
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> v = random_state(u.size(), 1.0, rng);
    a_explicit.apply(v, ye);
    a_free.apply(v, yf);
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(ye[i] - yf[i]));
    const double scale = norm_inf(ye);
    worst = std::max(worst, diff / (scale > 0.0 ? scale : 1.0));
  }
  char buf[96];
  return {"operator-equivalence", worst <= 1e-12,
          fmt(buf, sizeof buf, "rel inf err %.3e (tol %.0e)", worst, 1e-12)};
}

/// Uniform-strain patch test on a 2x2 mesh with a displaced interior node: a
/// linear boundary displacement field must be reproduced exactly.
inline CheckResult check_patch_test() {
  Mesh mesh = generate_two_phase_mesh(2, 2, 1.0, 1.0, {0.5, 0.5}, 0.0);
  mesh.nodes[static_cast<std::size_t>(mesh.node_index(1, 1))][0] += 0.06;
  mesh.nodes[static_cast<std::size_t>(mesh.node_index(1, 1))][1] -= 0.045;

  const auto field = [](double x, double y) {
    return std::array<double, 2>{3e-3 * x + 2e-3 * y, -1e-3 * x + 4e-3 * y};
  };
  DirichletSpec bcs;
  for (int j = 0; j <= mesh.ny; ++j)
    for (int i = 0; i <= mesh.nx; ++i) {
      if (i != 0 && i != mesh.nx && j != 0 && j != mesh.ny) continue;
      const int node = mesh.node_index(i, j);
      const auto uv = field(mesh.nodes[static_cast<std::size_t>(node)][0],
                            mesh.nodes[static_cast<std::size_t>(node)][1]);
      bcs.constraints.push_back({node, 0, uv[0]});
      bcs.constraints.push_back({node, 1, uv[1]});
    }

  const std::vector<Material> mats{Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  NewtonConfig cfg;
  cfg.linear.method = SolverMethod::DIRECT_LU;
  const auto [u, rep] = solve_bvp(mesh, mats, bcs, cfg);

  double worst = 0.0;
  for (int nidx = 0; nidx < mesh.n_nodes(); ++nidx) {
    const auto uv = field(mesh.nodes[static_cast<std::size_t>(nidx)][0],
                          mesh.nodes[static_cast<std::size_t>(nidx)][1]);
    worst = std::max(worst, std::abs(u[static_cast<std::size_t>(2 * nidx)] - uv[0]));
    worst = std::max(worst, std::abs(u[static_cast<std::size_t>(2 * nidx + 1)] - uv[1]));
  }
  char buf[96];
  return {"patch-test", rep.converged && worst <= 1e-12,
          verify_detail::fmt(buf, sizeof buf, "inf err %.3e (tol %.0e)", worst, 1e-12)};
}

namespace verify_detail {

/// Divergence-free quadratic displacement field: an equilibrium state of the
/// homogeneous isotropic problem for any Lame pair, so no body force enters.
inline std::array<double, 2> mms_field(double x, double y) {
  constexpr double a = 0.01;
  return {a * (x * x - y * y), -2.0 * a * x * y};
}

inline double mms_l2_error(const Mesh& mesh, std::span<const double> u) {
  double err2 = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    ElementCoords xc;
    std::array<double, 8> ue;
    for (int k = 0; k < 4; ++k) {
      const int nidx = mesh.elements[static_cast<std::size_t>(e)][k];
      xc[k] = mesh.nodes[static_cast<std::size_t>(nidx)];
      ue[2 * k] = u[static_cast<std::size_t>(2 * nidx)];
      ue[2 * k + 1] = u[static_cast<std::size_t>(2 * nidx + 1)];
    }
    for (const GaussPoint& gp : gauss_rule(3)) {
      const Quad4Shape s = shape_quad4(gp.xi, gp.eta);
      double xg = 0.0, yg = 0.0, uhx = 0.0, uhy = 0.0;
      double jac[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
      for (int i = 0; i < 4; ++i) {
        xg += s.n[i] * xc[i][0];
        yg += s.n[i] * xc[i][1];
        uhx += s.n[i] * ue[2 * i];
        uhy += s.n[i] * ue[2 * i + 1];
        for (int a2 = 0; a2 < 2; ++a2)
          for (int b = 0; b < 2; ++b) jac[a2][b] += s.dn[i][a2] * xc[i][b];
      }
      const double detj = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
      const auto ex = mms_field(xg, yg);
      err2 += gp.w * detj * ((uhx - ex[0]) * (uhx - ex[0]) + (uhy - ex[1]) * (uhy - ex[1]));
    }
  }
  return std::sqrt(err2);
}

}  // namespace verify_detail

/// L2 convergence of the manufactured quadratic solution over a 3-mesh
/// refinement series; the observed slope must sit at 2.0 +- 0.1.
inline CheckResult check_mms_convergence() {
  using namespace verify_detail;
  const std::vector<Material> mats{Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  std::vector<double> errors;
  for (const int ncells : {8, 16, 32}) {
    const Mesh mesh = generate_two_phase_mesh(ncells, ncells, 1.0, 1.0, {0.5, 0.5}, 0.0);
    DirichletSpec bcs;
    for (int j = 0; j <= mesh.ny; ++j)
      for (int i = 0; i <= mesh.nx; ++i) {
        if (i != 0 && i != mesh.nx && j != 0 && j != mesh.ny) continue;
        const int node = mesh.node_index(i, j);
        const auto uv = mms_field(mesh.nodes[static_cast<std::size_t>(node)][0],
                                  mesh.nodes[static_cast<std::size_t>(node)][1]);
        bcs.constraints.push_back({node, 0, uv[0]});
        bcs.constraints.push_back({node, 1, uv[1]});
      }
    NewtonConfig cfg;
    cfg.linear.method = SolverMethod::DIRECT_CHOL;
    const auto [u, rep] = solve_bvp(mesh, mats, bcs, cfg);
    if (!rep.converged) return {"mms-convergence", false, "solve failed on level"};
    errors.push_back(mms_l2_error(mesh, u));
  }
  double slope_sum = 0.0;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    slope_sum += std::log2(errors[k] / errors[k + 1]);
  const double slope = slope_sum / static_cast<double>(errors.size() - 1);
  char buf[96];
  return {"mms-convergence", std::abs(slope - 2.0) <= 0.1,
          fmt(buf, sizeof buf, "L2 slope %.3f (target 2.0 +- %.1f)", slope, 0.1)};
}

/// The cross-module oracle suite behind `bench verify`.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opts = {}) {
  if (!opts.parallel) {
    return {check_fd_vs_ad(opts.seed),
            check_dense_equivalence(opts.seed, opts.perturb_index, opts.perturb_delta),
            check_operator_equivalence(opts.seed), check_patch_test(), check_mms_convergence()};
  }
  auto f1 = std::async(std::launch::async, [&] { return check_fd_vs_ad(opts.seed); });
  auto f2 = std::async(std::launch::async, [&] {
    return check_dense_equivalence(opts.seed, opts.perturb_index, opts.perturb_delta);
  });
  auto f3 = std::async(std::launch::async, [&] { return check_operator_equivalence(opts.seed); });
  auto f4 = std::async(std::launch::async, [] { return check_patch_test(); });
  auto f5 = std::async(std::launch::async, [] { return check_mms_convergence(); });
  return {f1.get(), f2.get(), f3.get(), f4.get(), f5.get()};
}

}  // namespace adfem

#endif  // ADFEM_VERIFY_HPP
