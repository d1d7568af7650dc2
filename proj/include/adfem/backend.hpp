#ifndef ADFEM_BACKEND_HPP
#define ADFEM_BACKEND_HPP

#include <cassert>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adfem/assembly.hpp"
#include "adfem/errors.hpp"
#include "adfem/krylov.hpp"
#include "adfem/sparse.hpp"

namespace adfem {

enum class OperatorKind { EXPLICIT, MATRIX_FREE };

inline const char* to_string(OperatorKind k) {
  return k == OperatorKind::EXPLICIT ? "EXPLICIT" : "MATRIX_FREE";
}

enum class LeaseState { OwnedByAssembly, LeasedToSolver };

/// The assembly->solver boundary. Assembled COO values move into this buffer
/// without an element-wise copy, and the solver-side CSR view aliases the
/// same storage. A two-state lease serializes access: while leased to the
/// solver the producing side may not touch the values, and each handoff
/// bumps a monotone epoch so stale operator views are rejected.
class HandoffBuffer {
 public:
  explicit HandoffBuffer(std::shared_ptr<const SparsityPattern> pattern)
      : pattern_(std::move(pattern)), store_(std::make_shared<std::vector<double>>()) {
    if (!pattern_) throw std::invalid_argument("handoff buffer: null pattern");
  }

  LeaseState state() const { return state_; }
  std::uint64_t epoch() const { return epoch_; }
  const SparsityPattern& pattern() const { return *pattern_; }
  std::shared_ptr<const SparsityPattern> pattern_handle() const { return pattern_; }

  /// Debug channel for lease transitions; null disables tracing.
  void set_trace(std::ostream* os) { trace_ = os; }

  /// Takes ownership of the assembled values (buffer steal, no copy) and
  /// leases them to the solver.
  void handoff(CooTriplets&& coo) {
    if (state_ != LeaseState::OwnedByAssembly)
      throw LeaseError("handoff: buffer is already leased to the solver");
    if (coo.n != pattern_->n_dof || coo.size() != pattern_->nnz() ||
        coo.rows != pattern_->rows || coo.cols != pattern_->cols)
      throw std::invalid_argument("handoff: triplets do not match the precomputed pattern");
#ifndef NDEBUG
    const double* produced = coo.values.data();
#endif
    *store_ = std::move(coo.values);
#ifndef NDEBUG
    assert(store_->data() == produced && "handoff must alias, not copy");
#endif
    state_ = LeaseState::LeasedToSolver;
    ++epoch_;
    if (trace_) (*trace_) << "lease handoff epoch=" << epoch_ << "\n";
  }

  void release() {
    if (state_ != LeaseState::LeasedToSolver)
      throw LeaseError("release: buffer is not leased");
    state_ = LeaseState::OwnedByAssembly;
    if (trace_) (*trace_) << "lease release epoch=" << epoch_ << "\n";
  }

  /// Producer-side view; rejected while the solver holds the lease.
  std::span<double> assembly_values() {
    if (state_ != LeaseState::OwnedByAssembly)
      throw LeaseError("assembly-side access while the buffer is leased to the solver");
    return {store_->data(), store_->size()};
  }

  /// Solver-side view of the identical storage.
  std::span<double> solver_values() {
    if (state_ != LeaseState::LeasedToSolver)
      throw LeaseError("solver-side access without an active lease");
    return {store_->data(), store_->size()};
  }

  std::shared_ptr<std::vector<double>> value_store() const { return store_; }

 private:
  std::shared_ptr<const SparsityPattern> pattern_;
  std::shared_ptr<std::vector<double>> store_;
  LeaseState state_ = LeaseState::OwnedByAssembly;
  std::uint64_t epoch_ = 0;
  std::ostream* trace_ = nullptr;
};

/// Releases the lease on scope exit, on success and failure paths alike.
class LeaseGuard {
 public:
  explicit LeaseGuard(HandoffBuffer& b) : buffer_(&b) {}
  ~LeaseGuard() {
    if (buffer_ && buffer_->state() == LeaseState::LeasedToSolver) buffer_->release();
  }
  LeaseGuard(const LeaseGuard&) = delete;
  LeaseGuard& operator=(const LeaseGuard&) = delete;

 private:
  HandoffBuffer* buffer_;
};

/// Linear operator x -> K(u) x in one of two realizations: EXPLICIT wraps the
/// assembled CSR (and exposes it for preconditioner and factorization setup),
/// MATRIX_FREE applies batched Jacobian-vector products of the element
/// kernels with Dirichlet rows and columns masked like the eliminated matrix.
class LinearOperator {
 public:
  OperatorKind kind() const { return kind_; }
  int dim() const { return n_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
      throw std::invalid_argument("linear operator: dimension mismatch");
    if (kind_ == OperatorKind::EXPLICIT) {
      validate_lease();
      csr_.apply(x, y);
      return;
    }
    masked_.assign(x.begin(), x.end());
    for (std::size_t d = 0; d < constrained_.size(); ++d)
      if (constrained_[d]) masked_[d] = 0.0;
    std::fill(y.begin(), y.end(), 0.0);
    std::array<Dual<1>, 8> ue, re;
    for (const ElementBatch& b : batches_) {
      for (std::size_t e = 0; e < b.size(); ++e) {
        const auto& dofs = b.dof_map[e];
        for (int k = 0; k < 8; ++k) {
          ue[k] = Dual<1>(state_[static_cast<std::size_t>(dofs[k])]);
          ue[k].d[0] = masked_[static_cast<std::size_t>(dofs[k])];
        }
        element_internal_force<Dual<1>>(b.coords[e], b.material, b.quadrature, ue, re);
        for (int k = 0; k < 8; ++k) y[dofs[k]] += re[k].d[0];
      }
    }
    for (std::size_t d = 0; d < constrained_.size(); ++d)
      if (constrained_[d]) y[d] = x[d];
  }

  /// Assembled matrix access for ILU/direct setup; EXPLICIT only.
  const CsrMatrix& csr() const {
    if (kind_ != OperatorKind::EXPLICIT)
      throw CapabilityError("assembled matrix required, but the operator is matrix-free");
    validate_lease();
    return csr_;
  }

  /// Operator diagonal: read off the CSR, or assembled once for the
  /// matrix-free kind.
  std::vector<double> diagonal() const {
    if (kind_ == OperatorKind::EXPLICIT) {
      validate_lease();
      return csr_diagonal(csr_);
    }
    return diag_;
  }

  friend LinearOperator explicit_operator(const HandoffBuffer& buffer);
  friend LinearOperator matrix_free_operator(std::span<const ElementBatch> batches,
                                             std::span<const double> u,
                                             const DirichletSpec& dirichlet);

 private:
  LinearOperator() = default;

  void validate_lease() const {
    if (buffer_->state() != LeaseState::LeasedToSolver)
      throw LeaseError("explicit operator used while the buffer lease is not held");
    if (buffer_->epoch() != epoch_)
      throw StaleEpochError("explicit operator built from a stale assembly epoch");
  }

  OperatorKind kind_ = OperatorKind::EXPLICIT;
  int n_ = 0;
  // explicit realization
  CsrMatrix csr_;
  const HandoffBuffer* buffer_ = nullptr;
  std::uint64_t epoch_ = 0;
  // matrix-free realization
  std::span<const ElementBatch> batches_;
  std::vector<double> state_;
  std::vector<char> constrained_;
  std::vector<double> diag_;
  mutable std::vector<double> masked_;
};

/// CSR view over a leased buffer; row and column structure alias the
/// precomputed pattern, values alias the handoff storage.
inline LinearOperator explicit_operator(const HandoffBuffer& buffer) {
  if (buffer.state() != LeaseState::LeasedToSolver)
    throw LeaseError("explicit_operator: buffer must be leased to the solver");
  const auto pattern = buffer.pattern_handle();
  LinearOperator op;
  op.kind_ = OperatorKind::EXPLICIT;
  op.n_ = pattern->n_dof;
  op.csr_ = CsrMatrix(
      pattern->n_dof,
      std::shared_ptr<const std::vector<int>>(pattern, &pattern->row_ptr),
      std::shared_ptr<const std::vector<int>>(pattern, &pattern->cols),
      buffer.value_store());
  op.buffer_ = &buffer;
  op.epoch_ = buffer.epoch();
  return op;
}

/// Matrix-free operator at state u: apply(v) scatters per-element JVPs of the
/// residual kernels, with constrained dofs masked to match the eliminated
/// matrix (zeroed rows/columns, unit diagonal). Only NONE and JACOBI
/// preconditioning are possible on this kind; the Jacobi diagonal is
/// assembled here in a single pass. The batches are referenced, not copied,
/// and must outlive the operator.
inline LinearOperator matrix_free_operator(std::span<const ElementBatch> batches,
                                           std::span<const double> u,
                                           const DirichletSpec& dirichlet) {
  LinearOperator op;
  op.kind_ = OperatorKind::MATRIX_FREE;
  op.n_ = static_cast<int>(u.size());
  op.batches_ = batches;
  op.state_.assign(u.begin(), u.end());
  const auto table = detail::constraint_table(dirichlet, u.size());
  op.constrained_ = table.constrained;
  op.diag_ = assemble_diagonal(batches, u);
  for (std::size_t d = 0; d < op.constrained_.size(); ++d)
    if (op.constrained_[d]) op.diag_[d] = 1.0;
  return op;
}

/// One linear solve through the configured method/preconditioner pair,
/// enforcing the kind's capabilities (ILU0 and direct factorizations need the
/// assembled matrix).
inline std::pair<std::vector<double>, SolveReport> run_solver(const LinearOperator& op,
                                                              std::span<const double> b,
                                                              const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.method == SolverMethod::DIRECT_CHOL || cfg.method == SolverMethod::DIRECT_LU) {
    detail::WallTimer timer;
    const CsrMatrix& a = op.csr();
    const auto kind = cfg.method == SolverMethod::DIRECT_CHOL ? FactorKind::CHOL : FactorKind::LU;
    SolveReport rep;
    const double bnorm = norm2(b);
    const double denom = bnorm > 0.0 ? bnorm : 1.0;
    rep.residual_history.push_back(bnorm / denom);
    std::vector<double> x;
    try {
      const BandedFactorization f = direct_factor(a, kind);
      x = f.solve(b);
      rep.iterations = 1;
    } catch (const FactorizationError& err) {
      rep.failure = err.what();
      rep.wall_time = timer.seconds();
      return {std::vector<double>(b.size(), 0.0), std::move(rep)};
    }
    std::vector<double> scratch;
    const double rres = detail::true_relative_residual(op, b, x, denom, scratch);
    rep.residual_history.push_back(rres);
    rep.converged = rres <= kDirectResidualContract;
    rep.wall_time = timer.seconds();
    return {std::move(x), std::move(rep)};
  }

  auto dispatch = [&](const auto& prec) {
    switch (cfg.method) {
      case SolverMethod::CG: return cg(op, b, cfg, prec);
      case SolverMethod::GMRES: return gmres(op, b, cfg, prec);
      case SolverMethod::BICGSTAB: return bicgstab(op, b, cfg, prec);
      default: throw std::logic_error("run_solver: unreachable method");
    }
  };

  switch (cfg.preconditioner) {
    case PreconKind::NONE: return dispatch(IdentityPreconditioner{});
    case PreconKind::JACOBI: return dispatch(JacobiPreconditioner::from_diagonal(op.diagonal()));
    case PreconKind::ILU0: return dispatch(ilu0_setup(op.csr()));
  }
  throw std::logic_error("run_solver: unreachable preconditioner");
}

}  // namespace adfem

#endif  // ADFEM_BACKEND_HPP
