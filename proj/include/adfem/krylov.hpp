#ifndef ADFEM_KRYLOV_HPP
#define ADFEM_KRYLOV_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adfem/errors.hpp"
#include "adfem/linalg.hpp"
#include "adfem/sparse.hpp"

namespace adfem {

enum class SolverMethod { CG, GMRES, BICGSTAB, DIRECT_CHOL, DIRECT_LU };
enum class PreconKind { NONE, JACOBI, ILU0 };

inline const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::CG: return "CG";
    case SolverMethod::GMRES: return "GMRES";
    case SolverMethod::BICGSTAB: return "BICGSTAB";
    case SolverMethod::DIRECT_CHOL: return "DIRECT_CHOL";
    case SolverMethod::DIRECT_LU: return "DIRECT_LU";
  }
  return "?";
}

inline const char* to_string(PreconKind p) {
  switch (p) {
    case PreconKind::NONE: return "NONE";
    case PreconKind::JACOBI: return "JACOBI";
    case PreconKind::ILU0: return "ILU0";
  }
  return "?";
}

struct SolverConfig {
  SolverMethod method = SolverMethod::CG;
  PreconKind preconditioner = PreconKind::NONE;
  double rtol = 1e-13;       // relative true-residual target
  int max_iter = 10000;
  int gmres_restart = 30;

  void validate() const {
    if (!(rtol > 0.0)) throw std::invalid_argument("solver config: rtol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("solver config: max_iter must be >= 1");
    if (gmres_restart < 1) throw std::invalid_argument("solver config: gmres_restart must be >= 1");
  }
};

// Accuracy contract for direct factorizations, which ignore the iterative
// tolerance settings.
inline constexpr double kDirectResidualContract = 1e-10;

/// Outcome of one linear solve. residual_history[0] belongs to the initial
/// guess; the last entry is always a true relative residual recomputed with a
/// fresh operator application, never a recurrence estimate. For
/// preconditioned GMRES the interior entries are preconditioned-residual
/// estimates.
struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
  double wall_time = 0.0;  // seconds, monotonic clock
  std::string failure;     // non-empty on breakdown / capability aborts
};

struct IdentityPreconditioner {
  void apply(std::span<const double> r, std::span<double> z) const {
    std::copy(r.begin(), r.end(), z.begin());
  }
};

/// z = D^{-1} r with D = diag(A).
class JacobiPreconditioner {
 public:
  static JacobiPreconditioner from_diagonal(std::vector<double> diag) {
    JacobiPreconditioner p;
    p.inv_.resize(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (diag[i] == 0.0)
        throw FactorizationError("jacobi: zero diagonal at row " + std::to_string(i));
      p.inv_[i] = 1.0 / diag[i];
    }
    return p;
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_[i];
  }

 private:
  std::vector<double> inv_;
};

inline std::vector<double> csr_diagonal(const CsrMatrix& a) {
  std::vector<double> diag(static_cast<std::size_t>(a.dim()), 0.0);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (int i = 0; i < a.dim(); ++i)
    for (int k = rp[i]; k < rp[i + 1]; ++k)
      if (ci[k] == i) diag[static_cast<std::size_t>(i)] = v[k];
  return diag;
}

inline JacobiPreconditioner jacobi_setup(const CsrMatrix& a) {
  return JacobiPreconditioner::from_diagonal(csr_diagonal(a));
}

/// Zero-fill incomplete LU in IKJ order. L (unit lower) and U share A's
/// sparsity pattern: (LU)_ij = A_ij for every stored (i, j).
class Ilu0Preconditioner {
 public:
  static Ilu0Preconditioner setup(const CsrMatrix& a) {
    Ilu0Preconditioner p;
    p.n_ = a.dim();
    p.row_ptr_.assign(a.row_ptr().begin(), a.row_ptr().end());
    p.col_idx_.assign(a.col_idx().begin(), a.col_idx().end());
    p.values_.assign(a.values().begin(), a.values().end());
    p.diag_.assign(static_cast<std::size_t>(p.n_), -1);
    for (int i = 0; i < p.n_; ++i)
      for (int k = p.row_ptr_[i]; k < p.row_ptr_[i + 1]; ++k)
        if (p.col_idx_[k] == i) p.diag_[static_cast<std::size_t>(i)] = k;
    for (int i = 0; i < p.n_; ++i)
      if (p.diag_[static_cast<std::size_t>(i)] < 0)
        throw FactorizationError("ilu0: structurally missing diagonal at row " + std::to_string(i));

    for (int i = 0; i < p.n_; ++i) {
      for (int kk = p.row_ptr_[i]; kk < p.row_ptr_[i + 1]; ++kk) {
        const int k = p.col_idx_[kk];
        if (k >= i) break;  // columns are sorted; only the strict lower part eliminates
        const double ukk = p.values_[p.diag_[static_cast<std::size_t>(k)]];
        if (ukk == 0.0)
          throw FactorizationError("ilu0: zero pivot at row " + std::to_string(k));
        const double lik = p.values_[kk] / ukk;
        p.values_[kk] = lik;
        for (int uk = p.diag_[static_cast<std::size_t>(k)] + 1; uk < p.row_ptr_[k + 1]; ++uk) {
          const int j = p.col_idx_[uk];
          const int pos = p.find(i, j);
          if (pos >= 0) p.values_[pos] -= lik * p.values_[uk];
        }
      }
      if (p.values_[p.diag_[static_cast<std::size_t>(i)]] == 0.0)
        throw FactorizationError("ilu0: zero pivot at row " + std::to_string(i));
    }
    return p;
  }

  /// z = U^{-1} L^{-1} r via forward then backward substitution.
  void apply(std::span<const double> r, std::span<double> z) const {
    for (int i = 0; i < n_; ++i) {
      double s = r[i];
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1] && col_idx_[k] < i; ++k)
        s -= values_[k] * z[col_idx_[k]];
      z[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double s = z[i];
      const int dk = diag_[static_cast<std::size_t>(i)];
      for (int k = dk + 1; k < row_ptr_[i + 1]; ++k) s -= values_[k] * z[col_idx_[k]];
      z[i] = s / values_[dk];
    }
  }

  int dim() const { return n_; }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> factor_values() const { return values_; }
  std::span<const int> diag_index() const { return diag_; }

 private:
  int find(int row, int col) const {
    const int* begin = col_idx_.data() + row_ptr_[row];
    const int* end = col_idx_.data() + row_ptr_[row + 1];
    const int* it = std::lower_bound(begin, end, col);
    if (it != end && *it == col) return static_cast<int>(it - col_idx_.data());
    return -1;
  }

  int n_ = 0;
  std::vector<int> row_ptr_, col_idx_, diag_;
  std::vector<double> values_;
};

inline Ilu0Preconditioner ilu0_setup(const CsrMatrix& a) { return Ilu0Preconditioner::setup(a); }

enum class FactorKind { CHOL, LU };

/// Direct factorization on banded storage; the bandwidth is taken from the
/// CSR profile. CHOL requires SPD input and fails at the offending pivot.
class BandedFactorization {
 public:
  static BandedFactorization factor(const CsrMatrix& a, FactorKind kind) {
    BandedFactorization f;
    f.n_ = a.dim();
    f.kind_ = kind;
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();
    int bw = 0;
    for (int i = 0; i < f.n_; ++i)
      for (int k = rp[i]; k < rp[i + 1]; ++k) bw = std::max(bw, std::abs(i - ci[k]));
    f.bw_ = bw;

    if (kind == FactorKind::CHOL) {
      f.band_.assign(static_cast<std::size_t>(f.n_) * (bw + 1), 0.0);
      for (int i = 0; i < f.n_; ++i)
        for (int k = rp[i]; k < rp[i + 1]; ++k)
          if (ci[k] <= i) f.lo(i, ci[k]) = v[k];
      for (int i = 0; i < f.n_; ++i) {
        const int jmin = std::max(0, i - bw);
        for (int j = jmin; j <= i; ++j) {
          double s = f.lo(i, j);
          for (int k = jmin; k < j; ++k) s -= f.lo(i, k) * f.lo(j, k);
          if (j == i) {
            if (!(s > 0.0))
              throw FactorizationError("cholesky: matrix not positive definite at pivot row " +
                                       std::to_string(i));
            f.lo(i, i) = std::sqrt(s);
          } else {
            f.lo(i, j) = s / f.lo(j, j);
          }
        }
      }
    } else {
      f.band_.assign(static_cast<std::size_t>(f.n_) * (2 * bw + 1), 0.0);
      for (int i = 0; i < f.n_; ++i)
        for (int k = rp[i]; k < rp[i + 1]; ++k) f.full(i, ci[k]) = v[k];
      for (int k = 0; k < f.n_; ++k) {
        const double piv = f.full(k, k);
        if (piv == 0.0)
          throw FactorizationError("lu: zero pivot at row " + std::to_string(k));
        const int imax = std::min(f.n_ - 1, k + bw);
        for (int i = k + 1; i <= imax; ++i) {
          const double l = f.full(i, k) / piv;
          f.full(i, k) = l;
          const int jmax = std::min(f.n_ - 1, k + bw);
          for (int j = k + 1; j <= jmax; ++j) f.full(i, j) -= l * f.full(k, j);
        }
      }
    }
    return f;
  }

  std::vector<double> solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != n_)
      throw std::invalid_argument("banded solve: dimension mismatch");
    std::vector<double> x(b.begin(), b.end());
    if (kind_ == FactorKind::CHOL) {
      for (int i = 0; i < n_; ++i) {
        double s = x[i];
        for (int j = std::max(0, i - bw_); j < i; ++j) s -= lo(i, j) * x[j];
        x[i] = s / lo(i, i);
      }
      for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        const int jmax = std::min(n_ - 1, i + bw_);
        for (int j = i + 1; j <= jmax; ++j) s -= lo(j, i) * x[j];
        x[i] = s / lo(i, i);
      }
    } else {
      for (int i = 0; i < n_; ++i) {
        double s = x[i];
        for (int j = std::max(0, i - bw_); j < i; ++j) s -= full(i, j) * x[j];
        x[i] = s;
      }
      for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        const int jmax = std::min(n_ - 1, i + bw_);
        for (int j = i + 1; j <= jmax; ++j) s -= full(i, j) * x[j];
        x[i] = s / full(i, i);
      }
    }
    return x;
  }

  int bandwidth() const { return bw_; }
  FactorKind kind() const { return kind_; }

 private:
  double& lo(int i, int j) { return band_[static_cast<std::size_t>(i) * (bw_ + 1) + (j - i + bw_)]; }
  const double& lo(int i, int j) const {
    return band_[static_cast<std::size_t>(i) * (bw_ + 1) + (j - i + bw_)];
  }
  double& full(int i, int j) {
    return band_[static_cast<std::size_t>(i) * (2 * bw_ + 1) + (j - i + bw_)];
  }
  const double& full(int i, int j) const {
    return band_[static_cast<std::size_t>(i) * (2 * bw_ + 1) + (j - i + bw_)];
  }

  int n_ = 0;
  int bw_ = 0;
  FactorKind kind_ = FactorKind::LU;
  std::vector<double> band_;
};

inline BandedFactorization direct_factor(const CsrMatrix& a, FactorKind kind) {
  return BandedFactorization::factor(a, kind);
}

namespace detail {

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <class Op>
std::vector<double> initial_x(const Op& a, std::span<const double> b, std::span<const double> x0) {
  if (static_cast<int>(b.size()) != a.dim())
    throw std::invalid_argument("krylov: rhs dimension mismatch");
  if (x0.empty()) return std::vector<double>(b.size(), 0.0);
  if (x0.size() != b.size()) throw std::invalid_argument("krylov: initial guess dimension mismatch");
  return std::vector<double>(x0.begin(), x0.end());
}

template <class Op>
double true_relative_residual(const Op& a, std::span<const double> b, std::span<const double> x,
                              double denom, std::vector<double>& scratch) {
  scratch.resize(b.size());
  a.apply(x, scratch);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = b[i] - scratch[i];
    s += d * d;
  }
  return std::sqrt(s) / denom;
}

}  // namespace detail

/// Preconditioned conjugate gradients. Convergence is tested on the true
/// unpreconditioned residual ||b - Ax||/||b|| (absolute for b = 0); after the
/// recurrence reaches the target the residual is re-verified with a fresh
/// operator application and iteration resumes if the recurrence drifted.
template <class Op, class Prec = IdentityPreconditioner>
std::pair<std::vector<double>, SolveReport> cg(const Op& a, std::span<const double> b,
                                               const SolverConfig& cfg, const Prec& m = {},
                                               std::span<const double> x0 = {}) {
  cfg.validate();
  detail::WallTimer timer;
  const std::size_t n = b.size();
  std::vector<double> x = detail::initial_x(a, b, x0);

  const double bnorm = norm2(b);
  const double denom = bnorm > 0.0 ? bnorm : 1.0;

  SolveReport rep;
  std::vector<double> r(n), z(n), p(n), ap(n), scratch;
  a.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  rep.residual_history.push_back(norm2(r) / denom);

  while (true) {
    // Inner recurrence until the estimated residual clears the target.
    if (rep.residual_history.back() > cfg.rtol && rep.iterations < cfg.max_iter) {
      m.apply(r, z);
      std::copy(z.begin(), z.end(), p.begin());
      double rz = dot(r, z);
      while (rep.iterations < cfg.max_iter && rep.residual_history.back() > cfg.rtol) {
        a.apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
          rep.failure = "cg: operator not positive definite (p^T A p <= 0 at iteration " +
                        std::to_string(rep.iterations + 1) + ")";
          break;
        }
        const double alpha = rz / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        ++rep.iterations;
        rep.residual_history.push_back(norm2(r) / denom);
        if (rep.residual_history.back() <= cfg.rtol) break;
        m.apply(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      }
    }
    const double true_rres = detail::true_relative_residual(a, b, x, denom, scratch);
    rep.residual_history.back() = true_rres;
    if (true_rres <= cfg.rtol) {
      rep.converged = rep.failure.empty();
      break;
    }
    if (!rep.failure.empty() || rep.iterations >= cfg.max_iter) break;
    // Recurrence drifted from the true residual: restart from the fresh one.
    a.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  }
  rep.wall_time = timer.seconds();
  return {std::move(x), std::move(rep)};
}

/// Restarted GMRES(m), left-preconditioned, modified Gram-Schmidt Arnoldi and
/// Givens-rotation least squares. Interior history entries are
/// preconditioned-residual estimates; convergence is decided on the true
/// residual at restart boundaries. A vanishing Arnoldi vector (happy
/// breakdown) exits the cycle and is verified like any other candidate.
template <class Op, class Prec = IdentityPreconditioner>
std::pair<std::vector<double>, SolveReport> gmres(const Op& a, std::span<const double> b,
                                                  const SolverConfig& cfg, const Prec& m = {},
                                                  std::span<const double> x0 = {}) {
  cfg.validate();
  detail::WallTimer timer;
  const std::size_t n = b.size();
  const int restart = std::min<int>(cfg.gmres_restart, static_cast<int>(n));
  std::vector<double> x = detail::initial_x(a, b, x0);

  const double bnorm = norm2(b);
  const double denom = bnorm > 0.0 ? bnorm : 1.0;
  std::vector<double> tmp(n), scratch;
  m.apply(b, tmp);
  const double pnorm = norm2(tmp);
  const double pdenom = pnorm > 0.0 ? pnorm : 1.0;

  SolveReport rep;
  std::vector<std::vector<double>> v(static_cast<std::size_t>(restart) + 1,
                                     std::vector<double>(n));
  DenseMatrix h(restart + 1, restart);
  std::vector<double> cs(static_cast<std::size_t>(restart)), sn(static_cast<std::size_t>(restart)),
      g(static_cast<std::size_t>(restart) + 1);
  std::vector<double> r(n), w(n);

  a.apply(x, tmp);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
  m.apply(r, w);
  rep.residual_history.push_back(norm2(w) / pdenom);
  double true_rres = norm2(r) / denom;

  while (true_rres > cfg.rtol && rep.iterations < cfg.max_iter && rep.failure.empty()) {
    m.apply(r, w);
    const double beta = norm2(w);
    if (beta == 0.0) break;  // preconditioned residual vanished; verify below
    // The convergence contract is on the unpreconditioned residual, but the
    // inner estimate lives in the preconditioned norm. Ask the cycle for the
    // reduction factor the true residual still needs, with margin, so a
    // mismatch between the two norms cannot stall the restarts.
    const double target_est = beta * std::min(1.0, 0.5 * cfg.rtol / true_rres);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = w[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int j = 0;
    int cols = 0;
    for (; j < restart && rep.iterations < cfg.max_iter; ++j) {
      a.apply(v[static_cast<std::size_t>(j)], tmp);
      m.apply(tmp, w);
      for (int i = 0; i <= j; ++i) {
        const double hij = dot(v[static_cast<std::size_t>(i)], w);
        h(i, j) = hij;
        axpy(-hij, v[static_cast<std::size_t>(i)], w);
      }
      const double hnext = norm2(w);
      h(j + 1, j) = hnext;
      const bool happy = hnext <= beta * 1e-16;
      if (!happy)
        for (std::size_t i = 0; i < n; ++i) v[static_cast<std::size_t>(j) + 1][i] = w[i] / hnext;

      // Givens update of column j, then of the residual estimate.
      for (int i = 0; i < j; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * h(i, j) +
                         sn[static_cast<std::size_t>(i)] * h(i + 1, j);
        h(i + 1, j) = -sn[static_cast<std::size_t>(i)] * h(i, j) +
                      cs[static_cast<std::size_t>(i)] * h(i + 1, j);
        h(i, j) = t;
      }
      const double rr = std::hypot(h(j, j), h(j + 1, j));
      if (rr == 0.0) {
        cs[static_cast<std::size_t>(j)] = 1.0;
        sn[static_cast<std::size_t>(j)] = 0.0;
      } else {
        cs[static_cast<std::size_t>(j)] = h(j, j) / rr;
        sn[static_cast<std::size_t>(j)] = h(j + 1, j) / rr;
      }
      h(j, j) = rr;
      h(j + 1, j) = 0.0;
      g[static_cast<std::size_t>(j) + 1] = -sn[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] *= cs[static_cast<std::size_t>(j)];

      ++rep.iterations;
      cols = j + 1;
      const double est = std::abs(g[static_cast<std::size_t>(j) + 1]);
      rep.residual_history.push_back(est / pdenom);
      if (est <= target_est || happy) {
        ++j;
        break;
      }
    }

    // x += V y with H y = g solved by back substitution.
    std::vector<double> y(static_cast<std::size_t>(cols), 0.0);
    for (int i = cols - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (int k = i + 1; k < cols; ++k) s -= h(i, k) * y[static_cast<std::size_t>(k)];
      if (h(i, i) == 0.0) {
        rep.failure = "gmres: singular least-squares system in restart cycle";
        break;
      }
      y[static_cast<std::size_t>(i)] = s / h(i, i);
    }
    if (!rep.failure.empty()) break;
    for (int k = 0; k < cols; ++k) axpy(y[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(k)], x);

    a.apply(x, tmp);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
    true_rres = norm2(r) / denom;
  }

  true_rres = detail::true_relative_residual(a, b, x, denom, scratch);
  rep.residual_history.push_back(true_rres);
  rep.converged = rep.failure.empty() && true_rres <= cfg.rtol;
  rep.wall_time = timer.seconds();
  return {std::move(x), std::move(rep)};
}

/// Preconditioned BiCGStab. The recurrence residual is unpreconditioned, so
/// the per-iteration history is directly comparable with cg; rho and omega
/// breakdowns abort with an explanation instead of diverging silently.
template <class Op, class Prec = IdentityPreconditioner>
std::pair<std::vector<double>, SolveReport> bicgstab(const Op& a, std::span<const double> b,
                                                     const SolverConfig& cfg, const Prec& m = {},
                                                     std::span<const double> x0 = {}) {
  cfg.validate();
  detail::WallTimer timer;
  const std::size_t n = b.size();
  std::vector<double> x = detail::initial_x(a, b, x0);

  const double bnorm = norm2(b);
  const double denom = bnorm > 0.0 ? bnorm : 1.0;

  SolveReport rep;
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n), scratch;
  a.apply(x, t);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
  std::copy(r.begin(), r.end(), rhat.begin());
  rep.residual_history.push_back(norm2(r) / denom);

  while (true) {
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (rep.residual_history.back() > cfg.rtol && rep.iterations < cfg.max_iter) {
      const double rho_new = dot(rhat, r);
      if (rho_new == 0.0) {
        rep.failure = "bicgstab: rho breakdown at iteration " + std::to_string(rep.iterations + 1);
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      m.apply(p, phat);
      a.apply(phat, v);
      const double rhat_v = dot(rhat, v);
      if (rhat_v == 0.0) {
        rep.failure =
            "bicgstab: rhat^T v breakdown at iteration " + std::to_string(rep.iterations + 1);
        break;
      }
      alpha = rho / rhat_v;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      if (norm2(s) / denom <= cfg.rtol) {
        axpy(alpha, phat, x);
        std::copy(s.begin(), s.end(), r.begin());
        ++rep.iterations;
        rep.residual_history.push_back(norm2(r) / denom);
        break;
      }
      m.apply(s, shat);
      a.apply(shat, t);
      const double tt = dot(t, t);
      if (tt == 0.0) {
        rep.failure =
            "bicgstab: omega breakdown (t = 0) at iteration " + std::to_string(rep.iterations + 1);
        break;
      }
      omega = dot(t, s) / tt;
      if (omega == 0.0) {
        rep.failure = "bicgstab: omega breakdown at iteration " + std::to_string(rep.iterations + 1);
        break;
      }
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * phat[i] + omega * shat[i];
        r[i] = s[i] - omega * t[i];
      }
      ++rep.iterations;
      rep.residual_history.push_back(norm2(r) / denom);
    }

    const double true_rres = detail::true_relative_residual(a, b, x, denom, scratch);
    rep.residual_history.back() = true_rres;
    if (true_rres <= cfg.rtol) {
      rep.converged = rep.failure.empty();
      break;
    }
    if (!rep.failure.empty() || rep.iterations >= cfg.max_iter) break;
    // The recurrence residual drifted below the true one; restart from a
    // freshly computed residual.
    a.apply(x, t);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
    std::copy(r.begin(), r.end(), rhat.begin());
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
  }
  rep.wall_time = timer.seconds();
  return {std::move(x), std::move(rep)};
}

}  // namespace adfem

#endif  // ADFEM_KRYLOV_HPP
