#ifndef ADFEM_AUTODIFF_HPP
#define ADFEM_AUTODIFF_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "adfem/dual.hpp"
#include "adfem/linalg.hpp"

namespace adfem {

// Differentiable functions are callables evaluating a smooth map R^n -> R^m
// over any scalar type from the dual primitive set:
//
//   std::vector<T> f(std::span<const T> x)   for T in {double, Dual<1>, Dual<8>}
//
// Tangents are propagated multi-seed: up to kTangentBlock directions share one
// primal evaluation. Wider seed matrices are processed in blocks.
inline constexpr int kTangentBlock = 8;

/// Value vector plus a tangent matrix (one column per seeded direction).
struct DualVector {
  std::vector<double> value;
  DenseMatrix tangent;  // value.size() rows x n_seed columns
};

inline DualVector seed_identity(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  DualVector s;
  s.value.assign(x.begin(), x.end());
  s.tangent = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i) s.tangent(i, i) = 1.0;
  return s;
}

inline DualVector seed_direction(std::span<const double> x, std::span<const double> v) {
  if (x.size() != v.size())
    throw std::invalid_argument("seed_direction: direction length does not match state length");
  const int n = static_cast<int>(x.size());
  DualVector s;
  s.value.assign(x.begin(), x.end());
  s.tangent = DenseMatrix(n, 1);
  for (int i = 0; i < n; ++i) s.tangent(i, 0) = v[i];
  return s;
}

namespace detail {

template <int Lanes, class F>
void eval_seed_block(F&& f, const DualVector& in, int col0, int ncols, DualVector& out,
                     bool first_block) {
  const int n = static_cast<int>(in.value.size());
  std::vector<Dual<Lanes>> xd(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xd[i] = Dual<Lanes>(in.value[i]);
    for (int k = 0; k < ncols; ++k) xd[i].d[k] = in.tangent(i, col0 + k);
  }
  std::vector<Dual<Lanes>> yd = f(std::span<const Dual<Lanes>>(xd.data(), xd.size()));
  const int m = static_cast<int>(yd.size());
  if (first_block) {
    out.value.resize(static_cast<std::size_t>(m));
    out.tangent = DenseMatrix(m, in.tangent.cols());
    for (int i = 0; i < m; ++i) out.value[i] = yd[i].v;
  } else if (m != static_cast<int>(out.value.size())) {
    throw std::logic_error("eval_dual: output size changed between seed blocks");
  }
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < ncols; ++k) out.tangent(i, col0 + k) = yd[i].d[k];
}

}  // namespace detail

/// Evaluates f at in.value, propagating every tangent column exactly.
template <class F>
DualVector eval_dual(F&& f, const DualVector& in) {
  const int n = static_cast<int>(in.value.size());
  if (in.tangent.rows() != n)
    throw std::invalid_argument("eval_dual: tangent row count does not match value length");
  const int cols = in.tangent.cols();
  if (cols == 0) throw std::invalid_argument("eval_dual: seed has no tangent columns");
  DualVector out;
  bool first = true;
  for (int c0 = 0; c0 < cols;) {
    const int blk = std::min(cols - c0, kTangentBlock);
    if (blk == 1) {
      detail::eval_seed_block<1>(f, in, c0, blk, out, first);
    } else {
      detail::eval_seed_block<kTangentBlock>(f, in, c0, blk, out, first);
    }
    first = false;
    c0 += blk;
  }
  return out;
}

/// Full dense Jacobian of f at x, exact in the AD sense.
template <class F>
DenseMatrix jacobian_forward(F&& f, std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("jacobian_forward: empty input state");
  return eval_dual(f, seed_identity(x)).tangent;
}

/// Jacobian-vector product J_f(x) * v from a single tangent column.
template <class F>
std::vector<double> jvp(F&& f, std::span<const double> x, std::span<const double> v) {
  DualVector r = eval_dual(f, seed_direction(x, v));
  std::vector<double> y(r.value.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = r.tangent(static_cast<int>(i), 0);
  return y;
}

/// Jacobians for a homogeneous batch of states, in input order.
/// f is either uniform, f(x), or indexed, f(e, x), for kernels that close
/// over per-element data such as nodal coordinates.
template <class F>
std::vector<DenseMatrix> batched_jacobian(F&& f, std::span<const std::vector<double>> states) {
  std::vector<DenseMatrix> out;
  out.reserve(states.size());
  for (std::size_t e = 0; e < states.size(); ++e) {
    if (states[e].size() != states[0].size())
      throw std::invalid_argument("batched_jacobian: heterogeneous state sizes in batch");
    DenseMatrix jac;
    if constexpr (std::is_invocable_v<F&, std::size_t, std::span<const double>>) {
      auto kernel = [&f, e]<class T>(std::span<const T> x) { return f(e, x); };
      jac = jacobian_forward(kernel, states[e]);
    } else {
      jac = jacobian_forward(f, states[e]);
    }
    if (!out.empty() && (jac.rows() != out[0].rows() || jac.cols() != out[0].cols()))
      throw std::invalid_argument("batched_jacobian: heterogeneous output shapes in batch");
    out.push_back(std::move(jac));
  }
  return out;
}

}  // namespace adfem

#endif  // ADFEM_AUTODIFF_HPP
