#include "newscheck/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "newscheck/error.hpp"

namespace newscheck {

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::at(std::uint32_t index) const {
  return SparseRow{indices, values}.at(index);
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.indices.push_back(static_cast<std::uint32_t>(i));
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

double SparseRow::at(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

double dot(const SparseRow& a, const SparseRow& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      s += a.values[i++] * b.values[j++];
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double squared_norm(const SparseRow& row) {
  double s = 0.0;
  for (double v : row.values) s += v * v;
  return s;
}

SparseMatrix::SparseMatrix(std::span<const SparseVector> rows, std::size_t n_cols) : n_cols_(n_cols) {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.nnz();
  row_ptr_.reserve(rows.size() + 1);
  col_idx_.reserve(total);
  values_.reserve(total);
  for (const auto& r : rows) append(r);
}

void SparseMatrix::append(const SparseVector& row) {
  if (row.indices.size() != row.values.size()) {
    throw ValidationError("sparse row has mismatched index/value lengths");
  }
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    if (row.indices[k] >= n_cols_) {
      throw ValidationError("sparse row index " + std::to_string(row.indices[k]) +
                            " exceeds column count " + std::to_string(n_cols_));
    }
    if (k > 0 && row.indices[k] <= row.indices[k - 1]) {
      throw ValidationError("sparse row indices must be strictly increasing");
    }
  }
  col_idx_.insert(col_idx_.end(), row.indices.begin(), row.indices.end());
  values_.insert(values_.end(), row.values.begin(), row.values.end());
  row_ptr_.push_back(col_idx_.size());
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> indices) const {
  SparseMatrix out;
  out.n_cols_ = n_cols_;
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.col_idx_.insert(out.col_idx_.end(), r.indices.begin(), r.indices.end());
    out.values_.insert(out.values_.end(), r.values.begin(), r.values.end());
    out.row_ptr_.push_back(out.col_idx_.size());
  }
  return out;
}

SparseMatrix SparseMatrix::from_csr(std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> col_idx,
                                    std::vector<double> values, std::size_t n_cols) {
  if (row_ptr.empty() || row_ptr.front() != 0 || row_ptr.back() != col_idx.size() ||
      col_idx.size() != values.size()) {
    throw ValidationError("inconsistent CSR arrays");
  }
  SparseMatrix m;
  m.n_cols_ = n_cols;
  m.row_ptr_ = {0};
  for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r) {
    if (row_ptr[r + 1] < row_ptr[r]) throw ValidationError("inconsistent CSR arrays");
    SparseVector v;
    v.indices.assign(col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]),
                     col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]));
    v.values.assign(values.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]),
                    values.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]));
    m.append(v);
  }
  return m;
}

ColumnIndex::ColumnIndex(const SparseMatrix& m) : col_ptr(m.cols() + 1, 0) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (auto c : m.row(i).indices) ++col_ptr[c + 1];
  }
  for (std::size_t c = 0; c < m.cols(); ++c) col_ptr[c + 1] += col_ptr[c];
  row_idx.resize(m.nnz());
  values.resize(m.nnz());
  std::vector<std::size_t> next(col_ptr.begin(), col_ptr.end() - 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const auto pos = next[r.indices[k]]++;
      row_idx[pos] = static_cast<std::uint32_t>(i);
      values[pos] = r.values[k];
    }
  }
}

}  // namespace newscheck
