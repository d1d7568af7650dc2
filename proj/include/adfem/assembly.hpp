#ifndef ADFEM_ASSEMBLY_HPP
#define ADFEM_ASSEMBLY_HPP

#include <algorithm>
#include <array>
#include <cstdio>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "adfem/autodiff.hpp"
#include "adfem/element.hpp"
#include "adfem/mesh.hpp"
#include "adfem/sparse.hpp"

namespace adfem {

/// Homogeneous group of elements: same constitutive model, node count, basis
/// order and quadrature, so batch evaluation sees arrays of one shape.
struct ElementBatch {
  std::vector<int> element_ids;
  std::vector<std::array<int, 4>> connectivity;
  std::vector<std::array<int, 8>> dof_map;
  std::vector<ElementCoords> coords;
  Material material;
  int quadrature = 2;

  std::size_t size() const { return element_ids.size(); }
};

/// One batch per material phase present in the mesh, in phase order; element
/// order within a batch preserves mesh order. dof_map interleaves (x, y) per
/// node: node k maps to dofs (2k, 2k+1).
inline std::vector<ElementBatch> build_batches(const Mesh& mesh,
                                               std::span<const Material> phase_materials) {
  int max_phase = -1;
  for (int p : mesh.material_of) max_phase = std::max(max_phase, p);
  if (max_phase >= static_cast<int>(phase_materials.size()))
    throw std::invalid_argument("build_batches: no material supplied for a mesh phase");
  for (const Material& m : phase_materials) m.validate();

  std::vector<ElementBatch> batches(static_cast<std::size_t>(max_phase) + 1);
  for (std::size_t p = 0; p < batches.size(); ++p) {
    batches[p].material = phase_materials[p];
    batches[p].quadrature = 2;
  }
  for (int e = 0; e < mesh.n_elements(); ++e) {
    ElementBatch& b = batches[static_cast<std::size_t>(mesh.material_of[e])];
    const auto& conn = mesh.elements[e];
    b.element_ids.push_back(e);
    b.connectivity.push_back(conn);
    std::array<int, 8> dofs;
    ElementCoords xc;
    for (int k = 0; k < 4; ++k) {
      dofs[2 * k] = 2 * conn[k];
      dofs[2 * k + 1] = 2 * conn[k] + 1;
      xc[k] = mesh.nodes[static_cast<std::size_t>(conn[k])];
    }
    b.dof_map.push_back(dofs);
    b.coords.push_back(xc);
  }
  // Drop phases with no elements (e.g. zero-radius inclusion).
  std::erase_if(batches, [](const ElementBatch& b) { return b.element_ids.empty(); });
  return batches;
}

/// Union of the per-element dense blocks, sorted and duplicate-free. The
/// pattern depends only on connectivity, never on the displacement state.
inline std::shared_ptr<const SparsityPattern> precompute_sparsity(
    std::span<const ElementBatch> batches, int n_dof) {
  std::vector<int> rows, cols;
  std::size_t guess = 0;
  for (const auto& b : batches) guess += 64 * b.size();
  rows.reserve(guess);
  cols.reserve(guess);
  for (const auto& b : batches)
    for (const auto& dofs : b.dof_map)
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          if (dofs[i] >= n_dof || dofs[j] >= n_dof)
            throw std::out_of_range("precompute_sparsity: dof index outside system");
          rows.push_back(dofs[i]);
          cols.push_back(dofs[j]);
        }

  std::vector<double> dummy(rows.size(), 0.0);
  sort_and_deduplicate(dummy, rows, cols);

  auto pattern = std::make_shared<SparsityPattern>();
  pattern->n_dof = n_dof;
  pattern->row_ptr.assign(static_cast<std::size_t>(n_dof) + 1, 0);
  for (int r : rows) ++pattern->row_ptr[static_cast<std::size_t>(r) + 1];
  for (int i = 0; i < n_dof; ++i) pattern->row_ptr[i + 1] += pattern->row_ptr[i];
  pattern->rows = std::move(rows);
  pattern->cols = std::move(cols);
  return pattern;
}

namespace detail {

/// Residual kernel family over one batch; index selects the element geometry.
struct BatchKernel {
  const ElementBatch* batch;

  template <class T>
  std::vector<T> operator()(std::size_t e, std::span<const T> u) const {
    std::array<T, 8> r;
    element_internal_force<T>(batch->coords[e], batch->material, batch->quadrature, u, r);
    return std::vector<T>(r.begin(), r.end());
  }
};

inline std::vector<std::vector<double>> gather_states(const ElementBatch& b,
                                                      std::span<const double> u) {
  std::vector<std::vector<double>> xs(b.size(), std::vector<double>(8));
  for (std::size_t e = 0; e < b.size(); ++e)
    for (int k = 0; k < 8; ++k) xs[e][static_cast<std::size_t>(k)] = u[b.dof_map[e][k]];
  return xs;
}

}  // namespace detail

/// R(u): scatter-add of element residuals in (batch, element) order.
inline std::vector<double> assemble_residual(std::span<const ElementBatch> batches,
                                             std::span<const double> u) {
  std::vector<double> r(u.size(), 0.0);
  std::array<double, 8> ue, re;
  for (const auto& b : batches) {
    for (std::size_t e = 0; e < b.size(); ++e) {
      const auto& dofs = b.dof_map[e];
      for (int k = 0; k < 8; ++k) ue[k] = u[dofs[k]];
      element_internal_force<double>(b.coords[e], b.material, b.quadrature, ue, re);
      for (int k = 0; k < 8; ++k) r[dofs[k]] += re[k];
    }
  }
  return r;
}

/// K(u) as deduplicated triplets: batched AD Jacobians are unrolled with
/// their global index pairs and pushed through sort_and_deduplicate. The
/// result pattern must reproduce the precomputed one exactly.
inline CooTriplets assemble_jacobian(std::span<const ElementBatch> batches,
                                     std::span<const double> u, const SparsityPattern& pattern) {
  CooTriplets coo;
  coo.n = pattern.n_dof;
  std::size_t guess = 0;
  for (const auto& b : batches) guess += 64 * b.size();
  coo.rows.reserve(guess);
  coo.cols.reserve(guess);
  coo.values.reserve(guess);

  for (const auto& b : batches) {
    const auto xs = detail::gather_states(b, u);
    const std::vector<DenseMatrix> blocks =
        batched_jacobian(detail::BatchKernel{&b}, std::span<const std::vector<double>>(xs));
    for (std::size_t e = 0; e < b.size(); ++e) {
      const auto& dofs = b.dof_map[e];
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          coo.rows.push_back(dofs[i]);
          coo.cols.push_back(dofs[j]);
          coo.values.push_back(blocks[e](i, j));
        }
    }
  }

  sort_and_deduplicate(coo);
  if (coo.rows != pattern.rows || coo.cols != pattern.cols)
    throw std::logic_error("assemble_jacobian: produced indices leave the precomputed pattern");
  return coo;
}

/// Diagonal of K(u) in one batched pass; feeds Jacobi preconditioning for
/// operators that never assemble the full matrix.
inline std::vector<double> assemble_diagonal(std::span<const ElementBatch> batches,
                                             std::span<const double> u) {
  std::vector<double> diag(u.size(), 0.0);
  for (const auto& b : batches) {
    const auto xs = detail::gather_states(b, u);
    const std::vector<DenseMatrix> blocks =
        batched_jacobian(detail::BatchKernel{&b}, std::span<const std::vector<double>>(xs));
    for (std::size_t e = 0; e < b.size(); ++e)
      for (int k = 0; k < 8; ++k) diag[b.dof_map[e][k]] += blocks[e](k, k);
  }
  return diag;
}

namespace detail {

struct ConstraintTable {
  std::vector<char> constrained;    // per dof
  std::vector<double> prescribed;   // per dof, valid where constrained
};

inline ConstraintTable constraint_table(const DirichletSpec& spec, std::size_t n_dof) {
  ConstraintTable t;
  t.constrained.assign(n_dof, 0);
  t.prescribed.assign(n_dof, 0.0);
  for (const auto& c : spec.constraints) {
    const long dof = 2L * c.node + c.component;
    if (dof < 0 || dof >= static_cast<long>(n_dof))
      throw std::out_of_range("dirichlet: constrained dof outside system");
    if (t.constrained[static_cast<std::size_t>(dof)])
      throw std::invalid_argument("dirichlet: duplicate (node, component) pair");
    t.constrained[static_cast<std::size_t>(dof)] = 1;
    t.prescribed[static_cast<std::size_t>(dof)] = c.value;
  }
  return t;
}

/// Symmetric elimination on CSR-ordered storage: constrained rows and columns
/// are zeroed with a unit diagonal; column contributions move to the residual
/// using the increment convention (increment at a constrained dof is
/// prescribed - u, which is 0 once u satisfies the constraints), and the
/// constrained residual entries become u - prescribed.
inline void eliminate_dirichlet(std::span<const int> row_ptr, std::span<const int> col_idx,
                                std::span<double> values, std::span<double> residual,
                                const ConstraintTable& t, std::span<const double> u) {
  const int n = static_cast<int>(row_ptr.size()) - 1;
  for (int i = 0; i < n; ++i) {
    const bool ci = t.constrained[static_cast<std::size_t>(i)] != 0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const int j = col_idx[k];
      const bool cj = t.constrained[static_cast<std::size_t>(j)] != 0;
      if (!ci && cj) {
        residual[i] += values[k] * (t.prescribed[static_cast<std::size_t>(j)] - u[j]);
        values[k] = 0.0;
      } else if (ci) {
        values[k] = (i == j) ? 1.0 : 0.0;
      }
    }
  }
  for (int d = 0; d < n; ++d)
    if (t.constrained[static_cast<std::size_t>(d)])
      residual[d] = u[d] - t.prescribed[static_cast<std::size_t>(d)];
}

}  // namespace detail

inline void apply_dirichlet(const SparsityPattern& pattern, std::span<double> values,
                            std::span<double> residual, const DirichletSpec& spec,
                            std::span<const double> u) {
  if (values.size() != pattern.nnz())
    throw std::invalid_argument("apply_dirichlet: value array does not match pattern");
  const auto t = detail::constraint_table(spec, u.size());
  detail::eliminate_dirichlet(pattern.row_ptr, pattern.cols, values, residual, t, u);
}

inline void apply_dirichlet(CsrMatrix& a, std::span<double> residual, const DirichletSpec& spec,
                            std::span<const double> u) {
  const auto t = detail::constraint_table(spec, u.size());
  detail::eliminate_dirichlet(a.row_ptr(), a.col_idx(), a.values(), residual, t, u);
}

/// Residual-only form of the elimination for matrix-free pipelines; assumes
/// the state already satisfies the constraints.
inline void constrain_residual(std::span<double> residual, const DirichletSpec& spec,
                               std::span<const double> u) {
  const auto t = detail::constraint_table(spec, u.size());
  for (std::size_t d = 0; d < residual.size(); ++d)
    if (t.constrained[d]) residual[d] = u[d] - t.prescribed[d];
}

/// Sorted-triplet text dump (`row col value`, 17 significant digits) for
/// cross-implementation diffing.
inline void write_triplets(std::ostream& os, const CooTriplets& coo) {
  char line[96];
  for (std::size_t k = 0; k < coo.size(); ++k) {
    std::snprintf(line, sizeof line, "%d %d %.17g\n", coo.rows[k], coo.cols[k], coo.values[k]);
    os << line;
  }
}

}  // namespace adfem

#endif  // ADFEM_ASSEMBLY_HPP
