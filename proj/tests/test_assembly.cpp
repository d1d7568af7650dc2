#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cstring>
#include <sstream>

#include "test_support.hpp"

namespace adfem::test {
namespace {

TEST(BuildBatches, SinglePhaseMakesOneBatch) {
  const Mesh mesh = generate_two_phase_mesh(3, 2, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].size(), 6u);
}

TEST(BuildBatches, TwoPhasePartitionsAllElements) {
  const Mesh mesh = benchmark_mesh(10);
  const auto batches = build_batches(mesh, benchmark_materials());
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[0].size() + batches[1].size(), 100u);

  // Element multiset over all batches equals the mesh elements.
  std::vector<int> ids;
  for (const auto& b : batches) ids.insert(ids.end(), b.element_ids.begin(), b.element_ids.end());
  std::sort(ids.begin(), ids.end());
  for (int e = 0; e < 100; ++e) EXPECT_EQ(ids[static_cast<std::size_t>(e)], e);
}

TEST(BuildBatches, DofMapInterleavesNodeComponents) {
  const Mesh mesh = generate_two_phase_mesh(2, 1, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  for (std::size_t e = 0; e < batches[0].size(); ++e)
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(batches[0].dof_map[e][2 * k], 2 * batches[0].connectivity[e][k]);
      EXPECT_EQ(batches[0].dof_map[e][2 * k + 1], 2 * batches[0].connectivity[e][k] + 1);
    }
}

TEST(BuildBatches, MissingPhaseMaterialThrows) {
  const Mesh mesh = benchmark_mesh(10);  // has phase 1 elements
  const std::vector<Material> only_one = {
      Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  EXPECT_THROW(build_batches(mesh, only_one), std::invalid_argument);
}

TEST(Sparsity, SingleElementIsDense8x8) {
  const Mesh mesh = generate_two_phase_mesh(1, 1, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  EXPECT_EQ(pattern->nnz(), 64u);
}

TEST(Sparsity, SharedEdgeOverlapCountsOnce) {
  // Two elements sharing one edge share 2 nodes = 4 dofs: 2*64 - 16 = 112.
  const Mesh mesh = generate_two_phase_mesh(2, 1, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  EXPECT_EQ(pattern->nnz(), 112u);
}

TEST(Sparsity, PatternIsSymmetric) {
  const Mesh mesh = benchmark_mesh(4);
  const auto batches = build_batches(mesh, benchmark_materials());
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  std::vector<std::pair<int, int>> entries, transposed;
  for (std::size_t k = 0; k < pattern->nnz(); ++k) {
    entries.emplace_back(pattern->rows[k], pattern->cols[k]);
    transposed.emplace_back(pattern->cols[k], pattern->rows[k]);
  }
  std::sort(transposed.begin(), transposed.end());
  EXPECT_EQ(entries, transposed);
}

TEST(SortAndDeduplicate, MismatchedLengthsRejected) {
  std::vector<int> rows = {0, 1};
  std::vector<int> cols = {0};
  std::vector<double> vals = {1.0, 2.0};
  EXPECT_THROW(sort_and_deduplicate(vals, rows, cols), std::invalid_argument);
}

TEST(CsrMatrix, ShapeValidation) {
  EXPECT_THROW(CsrMatrix(2, {0, 1}, {0}, {1.0}), std::invalid_argument);      // row_ptr too short
  EXPECT_THROW(CsrMatrix(1, {0, 1}, {0}, {1.0, 2.0}), std::invalid_argument); // col/value mismatch
}

TEST(SortAndDeduplicate, SortedUniqueInputIsIdentity) {
  std::vector<int> rows = {0, 0, 1};
  std::vector<int> cols = {0, 1, 1};
  std::vector<double> vals = {1.0, 2.0, 3.0};
  sort_and_deduplicate(vals, rows, cols);
  EXPECT_EQ(rows, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(cols, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(vals, (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(SortAndDeduplicate, MergesDuplicatesBySummation) {
  std::vector<int> rows = {0, 0};
  std::vector<int> cols = {0, 0};
  std::vector<double> vals = {1.0, 2.0};
  sort_and_deduplicate(vals, rows, cols);
  ASSERT_EQ(vals.size(), 1u);
  EXPECT_EQ(rows[0], 0);
  EXPECT_EQ(cols[0], 0);
  EXPECT_DOUBLE_EQ(vals[0], 3.0);
}

TEST(SortAndDeduplicate, RandomTripletsMatchDenseAccumulation) {
  const int n = 20;
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> idx(0, n - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<int> rows, cols;
  std::vector<double> vals;
  std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < 1000; ++k) {
    const int i = idx(rng), j = idx(rng);
    const double v = val(rng);
    rows.push_back(i);
    cols.push_back(j);
    vals.push_back(v);
    dense[static_cast<std::size_t>(i) * n + j] += v;
  }
  sort_and_deduplicate(vals, rows, cols);
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    const bool increasing = rows[k] < rows[k + 1] || (rows[k] == rows[k + 1] && cols[k] < cols[k + 1]);
    EXPECT_TRUE(increasing);
  }
  for (std::size_t k = 0; k < vals.size(); ++k)
    EXPECT_DOUBLE_EQ(vals[k], dense[static_cast<std::size_t>(rows[k]) * n + cols[k]]);
}

TEST(AssembleResidual, ZeroStateAndRigidTranslation) {
  const Mesh mesh = benchmark_mesh(4);
  const auto batches = build_batches(mesh, benchmark_materials());
  const std::vector<double> zeros(static_cast<std::size_t>(mesh.n_dof()), 0.0);
  for (double r : assemble_residual(batches, zeros)) EXPECT_EQ(r, 0.0);

  std::vector<double> translation(static_cast<std::size_t>(mesh.n_dof()));
  for (int nidx = 0; nidx < mesh.n_nodes(); ++nidx) {
    translation[static_cast<std::size_t>(2 * nidx)] = 0.21;
    translation[static_cast<std::size_t>(2 * nidx + 1)] = -0.07;
  }
  for (double r : assemble_residual(batches, translation)) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(AssembleResidual, MatchesNaiveScatterOracle) {
  const Mesh mesh = generate_two_phase_mesh(2, 2, 1.0, 1.0, {0.25, 0.25}, 0.3);
  const auto mats = benchmark_materials();
  const auto batches = build_batches(mesh, mats);
  const auto u = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01, 2024);

  const auto r = assemble_residual(batches, u);

  // Oracle: direct loop over mesh elements, no batching.
  std::vector<double> expect(u.size(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    ElementState st;
    st.material = mats[static_cast<std::size_t>(mesh.material_of[e])];
    for (int k = 0; k < 4; ++k) {
      const int nidx = mesh.elements[static_cast<std::size_t>(e)][k];
      st.coords[k] = mesh.nodes[static_cast<std::size_t>(nidx)];
      st.u[2 * k] = u[static_cast<std::size_t>(2 * nidx)];
      st.u[2 * k + 1] = u[static_cast<std::size_t>(2 * nidx + 1)];
    }
    const auto re = element_residual(st);
    for (int k = 0; k < 4; ++k) {
      const int nidx = mesh.elements[static_cast<std::size_t>(e)][k];
      expect[static_cast<std::size_t>(2 * nidx)] += re[2 * k];
      expect[static_cast<std::size_t>(2 * nidx + 1)] += re[2 * k + 1];
    }
  }
  EXPECT_LE(max_abs_diff(r, expect), 1e-14);
}

TEST(AssembleJacobian, SingleElementEqualsKernelJacobian) {
  const Mesh mesh = generate_two_phase_mesh(1, 1, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::StVenantKirchhoff, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const auto u = random_vector(8, 0.02, 9);
  const CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  ASSERT_EQ(coo.size(), 64u);

  std::vector<double> ue(8);
  for (int k = 0; k < 8; ++k)
    ue[static_cast<std::size_t>(k)] = u[static_cast<std::size_t>(batches[0].dof_map[0][k])];
  const auto jac = batched_jacobian(
      adfem::detail::BatchKernel{&batches[0]},
      std::span<const std::vector<double>>(std::vector<std::vector<double>>{ue}));
  // The dedup COO is the element block rearranged by the global dof map.
  std::array<int, 8> local_of{};
  for (int p = 0; p < 8; ++p) local_of[static_cast<std::size_t>(batches[0].dof_map[0][p])] = p;
  for (std::size_t k = 0; k < coo.size(); ++k)
    EXPECT_DOUBLE_EQ(coo.values[k],
                     jac[0](local_of[static_cast<std::size_t>(coo.rows[k])],
                            local_of[static_cast<std::size_t>(coo.cols[k])]));
}

TEST(AssembleJacobian, DenseOracleOnSmallMeshes) {
  for (const auto& [nx, ny] : {std::pair{2, 1}, {2, 2}, {3, 3}}) {
    const Mesh mesh = generate_two_phase_mesh(nx, ny, 1.0, 1.0, {0.5, 0.5}, 0.35);
    const auto mats = benchmark_materials();
    const auto batches = build_batches(mesh, mats);
    const auto pattern = precompute_sparsity(batches, mesh.n_dof());
    const auto u = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01,
                                 static_cast<std::uint64_t>(nx * 100 + ny));
    const CooTriplets coo = assemble_jacobian(batches, u, *pattern);
    const auto dense = coo_to_dense(coo);

    std::vector<double> expect(dense.size(), 0.0);
    for (const auto& b : batches)
      for (std::size_t e = 0; e < b.size(); ++e) {
        std::vector<double> ue(8);
        for (int k = 0; k < 8; ++k) ue[static_cast<std::size_t>(k)] = u[b.dof_map[e][k]];
        const DenseMatrix j = jacobian_forward(element_kernel(b, e), ue);
        // flatten into the global dense matrix
        for (int i = 0; i < 8; ++i)
          for (int jj = 0; jj < 8; ++jj)
            expect[static_cast<std::size_t>(b.dof_map[e][i]) * mesh.n_dof() + b.dof_map[e][jj]] +=
                j(i, jj);
      }
    EXPECT_LE(max_abs_diff(dense, expect), 1e-13);
  }
}

TEST(AssembleJacobian, LinearMatrixIsSymmetric) {
  const Mesh mesh = benchmark_mesh(4);
  const auto batches = build_batches(mesh, linear_materials());
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const std::vector<double> u(static_cast<std::size_t>(mesh.n_dof()), 0.0);
  const CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  const auto dense = coo_to_dense(coo);
  const int n = mesh.n_dof();
  double scale = 0.0, asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(dense[static_cast<std::size_t>(i) * n + j]));
      asym = std::max(asym, std::abs(dense[static_cast<std::size_t>(i) * n + j] -
                                     dense[static_cast<std::size_t>(j) * n + i]));
    }
  EXPECT_LE(asym, 1e-12 * scale);
}

TEST(AssembleJacobian, WrongPatternIsFatal) {
  const Mesh mesh = benchmark_mesh(2);
  const Mesh other = benchmark_mesh(3);
  const auto batches = build_batches(mesh, benchmark_materials());
  const auto wrong = precompute_sparsity(build_batches(other, benchmark_materials()),
                                         other.n_dof());
  const std::vector<double> u(static_cast<std::size_t>(mesh.n_dof()), 0.0);
  EXPECT_THROW(assemble_jacobian(batches, u, *wrong), std::logic_error);
}

TEST(AssembleJacobian, PatternStableAcrossStatesAndBitwiseDeterministic) {
  const Mesh mesh = benchmark_mesh(3);
  const auto batches = build_batches(mesh, benchmark_materials());
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const auto u1 = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01, 1);
  const auto u2 = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01, 2);
  const CooTriplets a = assemble_jacobian(batches, u1, *pattern);
  const CooTriplets b = assemble_jacobian(batches, u2, *pattern);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.cols, b.cols);

  const CooTriplets a2 = assemble_jacobian(batches, u1, *pattern);
  ASSERT_EQ(a.values.size(), a2.values.size());
  EXPECT_EQ(0, std::memcmp(a.values.data(), a2.values.data(), a.values.size() * sizeof(double)));
}

TEST(CooToCsr, RowPointersAndEmptyRows) {
  CooTriplets id2;
  id2.n = 2;
  id2.rows = {0, 1};
  id2.cols = {0, 1};
  id2.values = {1.0, 1.0};
  const CsrMatrix a = coo_to_csr(std::move(id2));
  EXPECT_EQ(a.row_ptr()[0], 0);
  EXPECT_EQ(a.row_ptr()[1], 1);
  EXPECT_EQ(a.row_ptr()[2], 2);

  CooTriplets gap;
  gap.n = 3;
  gap.rows = {0, 2};
  gap.cols = {0, 2};
  gap.values = {1.0, 1.0};
  const CsrMatrix b = coo_to_csr(std::move(gap));
  EXPECT_EQ(b.row_ptr()[1], 1);
  EXPECT_EQ(b.row_ptr()[2], 1);  // empty middle row repeats the pointer
  EXPECT_EQ(b.row_ptr()[3], 2);
}

TEST(CooToCsr, RejectsUnsortedInput) {
  CooTriplets bad;
  bad.n = 2;
  bad.rows = {1, 0};
  bad.cols = {0, 0};
  bad.values = {1.0, 2.0};
  EXPECT_THROW(coo_to_csr(std::move(bad)), std::invalid_argument);
}

TEST(CooToCsr, ValuesAreMovedNotCopied) {
  CooTriplets coo;
  coo.n = 2;
  coo.rows = {0, 1};
  coo.cols = {0, 1};
  coo.values = {2.0, 3.0};
  const double* before = coo.values.data();
  const CsrMatrix a = coo_to_csr(std::move(coo));
  EXPECT_EQ(a.values().data(), before);
}

TEST(CooToCsr, RandomPatternSpmvMatchesDenseProduct) {
  const int n = 50;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> idx(0, n - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  CooTriplets coo;
  coo.n = n;
  std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < 400; ++k) {
    const int i = idx(rng), j = idx(rng);
    const double v = val(rng);
    coo.rows.push_back(i);
    coo.cols.push_back(j);
    coo.values.push_back(v);
    dense[static_cast<std::size_t>(i) * n + j] += v;
  }
  sort_and_deduplicate(coo);
  const CsrMatrix a = coo_to_csr(std::move(coo));
  const auto x = random_vector(static_cast<std::size_t>(n), 1.0, 4343);
  const auto y = spmv(a, x);
  std::vector<double> expect(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      expect[static_cast<std::size_t>(i)] +=
          dense[static_cast<std::size_t>(i) * n + j] * x[static_cast<std::size_t>(j)];
  EXPECT_LE(max_abs_diff(y, expect), 1e-13 * std::max(1.0, norm_inf(expect)));
}

TEST(ApplyDirichlet, NoConstraintsIsIdentity) {
  const Mesh mesh = benchmark_mesh(2);
  const auto batches = build_batches(mesh, benchmark_materials());
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const auto u = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01, 3);
  CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  const std::vector<double> vals_before = coo.values;
  std::vector<double> residual = assemble_residual(batches, u);
  const std::vector<double> res_before = residual;
  apply_dirichlet(*pattern, coo.values, residual, DirichletSpec{}, u);
  EXPECT_EQ(coo.values, vals_before);
  EXPECT_EQ(residual, res_before);
}

TEST(ApplyDirichlet, FullyConstrainedSystemBecomesIdentity) {
  const Mesh mesh = generate_two_phase_mesh(1, 1, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  DirichletSpec spec;
  for (int nidx = 0; nidx < 4; ++nidx) {
    spec.constraints.push_back({nidx, 0, 0.01 * nidx});
    spec.constraints.push_back({nidx, 1, -0.02 * nidx});
  }
  const auto u = random_vector(8, 0.05, 8);
  CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  std::vector<double> residual = assemble_residual(batches, u);
  apply_dirichlet(*pattern, coo.values, residual, spec, u);
  const auto dense = coo_to_dense(coo);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      EXPECT_EQ(dense[static_cast<std::size_t>(i) * 8 + j], i == j ? 1.0 : 0.0);
  for (int d = 0; d < 8; ++d) {
    const double prescribed = (d % 2 == 0) ? 0.01 * (d / 2) : -0.02 * (d / 2);
    EXPECT_DOUBLE_EQ(residual[static_cast<std::size_t>(d)], u[static_cast<std::size_t>(d)] - prescribed);
  }
}

TEST(ApplyDirichlet, EliminatedBenchmarkMatrixIsSpd) {
  // Single-phase and two-phase linear benchmarks on an 8x8 mesh: 162 dofs.
  for (const double radius : {0.0, 0.25}) {
    BenchmarkSystem sys =
        radius == 0.0
            ? make_benchmark_system(
                  8, {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}}, 0.01, 0.0)
            : make_benchmark_system(8, linear_materials());
    const auto dense = csr_to_dense(sys.matrix);
    const int n = sys.matrix.dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = dense[static_cast<std::size_t>(i) * n + j];
    EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12 * m.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(ApplyDirichlet, CsrOverloadAgreesWithPatternOverload) {
  const Mesh mesh = benchmark_mesh(3);
  const auto mats = benchmark_materials();
  const DirichletSpec bcs = benchmark_bcs(mesh, 0.01);
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const auto u = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01, 606);

  CooTriplets coo_a = assemble_jacobian(batches, u, *pattern);
  std::vector<double> res_a = assemble_residual(batches, u);
  apply_dirichlet(*pattern, coo_a.values, res_a, bcs, u);

  CooTriplets coo_b = assemble_jacobian(batches, u, *pattern);
  std::vector<double> res_b = assemble_residual(batches, u);
  CsrMatrix csr = coo_to_csr(std::move(coo_b));
  apply_dirichlet(csr, res_b, bcs, u);

  EXPECT_EQ(res_a, res_b);
  const auto va = coo_a.values;
  const auto vb = csr.values();
  ASSERT_EQ(va.size(), vb.size());
  for (std::size_t k = 0; k < va.size(); ++k) EXPECT_EQ(va[k], vb[k]);
}

TEST(AssembleJacobian, MatchesFiniteDifferencesOfResidual) {
  const Mesh mesh = generate_two_phase_mesh(2, 2, 1.0, 1.0, {0.25, 0.25}, 0.3);
  const auto batches = build_batches(mesh, benchmark_materials());
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const auto u = random_vector(static_cast<std::size_t>(mesh.n_dof()), 0.01, 404);
  const CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  const auto k_ad = coo_to_dense(coo);
  const auto k_fd = fd_jacobian_dense(
      [&](std::span<const double> x) { return assemble_residual(batches, x); }, u, 1e-6);
  double scale = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < k_ad.size(); ++k) {
    scale = std::max(scale, std::abs(k_ad[k]));
    diff = std::max(diff, std::abs(k_ad[k] - k_fd[k]));
  }
  EXPECT_LE(diff, 1e-5 * scale);
}

TEST(ApplyDirichlet, OutOfRangeConstraintThrows) {
  const Mesh mesh = generate_two_phase_mesh(1, 1, 1.0, 1.0, {0.5, 0.5}, 0.0);
  const std::vector<Material> mats = {Material{MaterialModel::LinearElasticPlaneStrain, 1.0, 0.3}};
  const auto batches = build_batches(mesh, mats);
  const auto pattern = precompute_sparsity(batches, mesh.n_dof());
  const std::vector<double> u(8, 0.0);
  CooTriplets coo = assemble_jacobian(batches, u, *pattern);
  std::vector<double> residual(8, 0.0);
  DirichletSpec bad;
  bad.constraints = {{17, 0, 0.0}};
  EXPECT_THROW(apply_dirichlet(*pattern, coo.values, residual, bad, u), std::out_of_range);
}

TEST(WriteTriplets, SortedTextDump) {
  CooTriplets coo;
  coo.n = 2;
  coo.rows = {0, 1};
  coo.cols = {1, 0};
  coo.values = {0.5, -1.25};
  std::ostringstream os;
  write_triplets(os, coo);
  EXPECT_EQ(os.str(), "0 1 0.5\n1 0 -1.25\n");
}

}  // namespace
}  // namespace adfem::test
