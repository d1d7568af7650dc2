#ifndef ADFEM_SPARSE_HPP
#define ADFEM_SPARSE_HPP

#include <algorithm>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace adfem {

/// Global sparse matrix in coordinate (triplet) form; may carry duplicates
/// until sort_and_deduplicate is applied.
struct CooTriplets {
  int n = 0;  // square shape n x n
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Sorts triplets lexicographically by (row, col) and merges duplicate
/// coordinates by summation. The sort is stable, so duplicate entries are
/// summed in input order and the result is bitwise reproducible.
inline void sort_and_deduplicate(std::vector<double>& values, std::vector<int>& rows,
                                 std::vector<int>& cols) {
  if (rows.size() != cols.size() || rows.size() != values.size())
    throw std::invalid_argument("sort_and_deduplicate: array lengths differ");
  const std::size_t nnz = values.size();
  if (nnz == 0) return;

  std::vector<std::size_t> perm(nnz);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });

  std::vector<int> r_out, c_out;
  std::vector<double> v_out;
  r_out.reserve(nnz);
  c_out.reserve(nnz);
  v_out.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    const std::size_t p = perm[k];
    if (!r_out.empty() && r_out.back() == rows[p] && c_out.back() == cols[p]) {
      v_out.back() += values[p];
    } else {
      r_out.push_back(rows[p]);
      c_out.push_back(cols[p]);
      v_out.push_back(values[p]);
    }
  }
  rows = std::move(r_out);
  cols = std::move(c_out);
  values = std::move(v_out);
}

inline void sort_and_deduplicate(CooTriplets& coo) {
  sort_and_deduplicate(coo.values, coo.rows, coo.cols);
}

/// State-independent sparsity of the assembled Jacobian: the sorted, unique
/// (row, col) set plus CSR row pointers over it. Computed once per mesh and
/// shared across all assemblies.
struct SparsityPattern {
  int n_dof = 0;
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<int> row_ptr;  // length n_dof + 1

  std::size_t nnz() const { return cols.size(); }
};

/// Compressed sparse row matrix. Structure and values are shared storage so
/// an operator view can alias an assembly-owned value buffer without copies.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int n, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values)
      : n_(n),
        row_ptr_(std::make_shared<const std::vector<int>>(std::move(row_ptr))),
        col_idx_(std::make_shared<const std::vector<int>>(std::move(col_idx))),
        values_(std::make_shared<std::vector<double>>(std::move(values))) {
    check_shape();
  }
  CsrMatrix(int n, std::shared_ptr<const std::vector<int>> row_ptr,
            std::shared_ptr<const std::vector<int>> col_idx,
            std::shared_ptr<std::vector<double>> values)
      : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    check_shape();
  }

  int dim() const { return n_; }
  std::size_t nnz() const { return col_idx_->size(); }
  std::span<const int> row_ptr() const { return {row_ptr_->data(), row_ptr_->size()}; }
  std::span<const int> col_idx() const { return {col_idx_->data(), col_idx_->size()}; }
  std::span<const double> values() const { return {values_->data(), values_->size()}; }
  std::span<double> values() { return {values_->data(), values_->size()}; }
  std::shared_ptr<std::vector<double>> value_store() const { return values_; }

  /// y = A x, rows accumulated in column order.
  void apply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
      throw std::invalid_argument("CsrMatrix::apply: dimension mismatch");
    const int* rp = row_ptr_->data();
    const int* ci = col_idx_->data();
    const double* v = values_->data();
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
      y[i] = s;
    }
  }

 private:
  void check_shape() const {
    if (row_ptr_->size() != static_cast<std::size_t>(n_) + 1)
      throw std::invalid_argument("CsrMatrix: row_ptr length must be n+1");
    if (col_idx_->size() != values_->size())
      throw std::invalid_argument("CsrMatrix: col_idx and values lengths differ");
  }

  int n_ = 0;
  std::shared_ptr<const std::vector<int>> row_ptr_;
  std::shared_ptr<const std::vector<int>> col_idx_;
  std::shared_ptr<std::vector<double>> values_;
};

inline void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  a.apply(x, y);
}

inline std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(a.dim()));
  a.apply(x, y);
  return y;
}

/// Converts sorted, deduplicated triplets to CSR. The value array is moved,
/// not copied, so CSR values are the same storage the assembly produced.
inline CsrMatrix coo_to_csr(CooTriplets&& coo) {
  const std::size_t nnz = coo.size();
  if (coo.rows.size() != nnz || coo.cols.size() != nnz)
    throw std::invalid_argument("coo_to_csr: array lengths differ");
  for (std::size_t k = 0; k + 1 < nnz; ++k) {
    const bool ordered = coo.rows[k] < coo.rows[k + 1] ||
                         (coo.rows[k] == coo.rows[k + 1] && coo.cols[k] < coo.cols[k + 1]);
    if (!ordered)
      throw std::invalid_argument("coo_to_csr: triplets must be sorted and deduplicated");
  }
  std::vector<int> row_ptr(static_cast<std::size_t>(coo.n) + 1, 0);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (coo.rows[k] < 0 || coo.rows[k] >= coo.n || coo.cols[k] < 0 || coo.cols[k] >= coo.n)
      throw std::out_of_range("coo_to_csr: index outside matrix shape");
    ++row_ptr[static_cast<std::size_t>(coo.rows[k]) + 1];
  }
  for (int i = 0; i < coo.n; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(coo.n, std::move(row_ptr), std::move(coo.cols), std::move(coo.values));
}

}  // namespace adfem

#endif  // ADFEM_SPARSE_HPP
