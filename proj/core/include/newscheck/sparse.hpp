#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace newscheck {

using DenseVector = std::vector<double>;

/// Strictly increasing indices; zero weights are never stored.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  double norm() const;
  /// Value at `index`, 0 when absent. O(log nnz).
  double at(std::uint32_t index) const;

  static SparseVector from_dense(std::span<const double> dense);

  bool operator==(const SparseVector&) const = default;
};

struct SparseRow {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  std::size_t nnz() const { return indices.size(); }
  double at(std::uint32_t index) const;
};

double dot(const SparseRow& a, const SparseRow& b);
double squared_norm(const SparseRow& row);

/// Compressed sparse rows.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::span<const SparseVector> rows, std::size_t n_cols);

  std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  SparseRow row(std::size_t i) const {
    const auto b = row_ptr_[i];
    const auto e = row_ptr_[i + 1];
    return {std::span(col_idx_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
  }

  void append(const SparseVector& row);
  SparseMatrix select_rows(std::span<const std::size_t> indices) const;

  /// Raw CSR arrays, for serialization.
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  /// Rebuilds from raw CSR arrays; throws ValidationError when they are inconsistent.
  static SparseMatrix from_csr(std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> col_idx,
                               std::vector<double> values, std::size_t n_cols);

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
  std::size_t n_cols_ = 0;
};

/// Column-major copy of a matrix, each column's entries ordered by row.
struct ColumnIndex {
  std::vector<std::size_t> col_ptr;
  std::vector<std::uint32_t> row_idx;
  std::vector<double> values;

  explicit ColumnIndex(const SparseMatrix& m);
  std::size_t nnz(std::size_t col) const { return col_ptr[col + 1] - col_ptr[col]; }
};

}  // namespace newscheck
