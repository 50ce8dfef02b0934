#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pdgp/errors.hpp"

namespace pdgp {

using Index = std::size_t;

namespace detail {

inline void require_shape(Index rows, Index cols) {
  if (rows == 0 || cols == 0) {
    fail(ErrorCode::InvalidMatrix, "matrix must have at least one row and one column (got " +
                                       std::to_string(rows) + "x" + std::to_string(cols) + ")");
  }
}

inline void require_finite(double value, Index row, Index col) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::InvalidMatrix,
         "non-finite value at (" + std::to_string(row) + ", " + std::to_string(col) + ")");
  }
}

}  // namespace detail

/// Column-major dense storage. Observations are columns.
class DenseMatrix {
 public:
  DenseMatrix(Index rows, Index cols, std::vector<double> column_major)
      : rows_(rows), cols_(cols), values_(std::move(column_major)) {
    detail::require_shape(rows_, cols_);
    if (values_.size() != rows_ * cols_) {
      fail(ErrorCode::DimensionMismatch, "dense storage holds " + std::to_string(values_.size()) +
                                             " values, expected " + std::to_string(rows_ * cols_));
    }
    for (Index j = 0; j < cols_; ++j) {
      for (Index i = 0; i < rows_; ++i) detail::require_finite(values_[j * rows_ + i], i, j);
    }
  }

  /// Builds from a row-major literal, e.g. {{1, 3}, {2, 4}} is 2x2 with columns [1,2] and [3,4].
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const Index m = rows.size();
    const Index n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> values(m * n);
    Index i = 0;
    for (const auto& row : rows) {
      if (row.size() != n) fail(ErrorCode::DimensionMismatch, "ragged row-major literal");
      Index j = 0;
      for (double x : row) values[j++ * m + i] = x;
      ++i;
    }
    return DenseMatrix(m, n, std::move(values));
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  std::span<const double> column(Index j) const noexcept {
    return {values_.data() + j * rows_, rows_};
  }

  double operator()(Index i, Index j) const noexcept { return values_[j * rows_ + i]; }

  std::span<const double> values() const noexcept { return values_; }

 private:
  Index rows_;
  Index cols_;
  std::vector<double> values_;
};

struct SparseColumn {
  std::span<const Index> rows;
  std::span<const double> values;
};

struct MatrixEntry {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse column storage holding explicit nonzeros only, row indices sorted per column.
class SparseMatrix {
 public:
  SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr, std::vector<Index> row_idx,
               std::vector<double> values)
      : rows_(rows),
        cols_(cols),
        col_ptr_(std::move(col_ptr)),
        row_idx_(std::move(row_idx)),
        values_(std::move(values)) {
    detail::require_shape(rows_, cols_);
    if (col_ptr_.size() != cols_ + 1 || col_ptr_.front() != 0 ||
        col_ptr_.back() != row_idx_.size() || row_idx_.size() != values_.size()) {
      fail(ErrorCode::InvalidMatrix, "inconsistent compressed column structure");
    }
    for (Index j = 0; j < cols_; ++j) {
      if (col_ptr_[j] > col_ptr_[j + 1]) fail(ErrorCode::InvalidMatrix, "column pointers decrease");
      for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
        if (row_idx_[p] >= rows_) {
          fail(ErrorCode::IndexOutOfRange, "row index " + std::to_string(row_idx_[p]) +
                                               " out of range in column " + std::to_string(j));
        }
        if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1]) {
          fail(ErrorCode::InvalidMatrix, "row indices not strictly increasing in column " +
                                             std::to_string(j));
        }
        detail::require_finite(values_[p], row_idx_[p], j);
        if (values_[p] == 0.0) {
          fail(ErrorCode::InvalidMatrix, "explicit zero stored at (" + std::to_string(row_idx_[p]) +
                                             ", " + std::to_string(j) + ")");
        }
      }
    }
  }

  /// Duplicate coordinates are summed; entries that sum to zero are dropped.
  static SparseMatrix from_entries(Index rows, Index cols, std::vector<MatrixEntry> entries) {
    detail::require_shape(rows, cols);
    for (const auto& e : entries) {
      if (e.row >= rows || e.col >= cols) {
        fail(ErrorCode::IndexOutOfRange, "entry (" + std::to_string(e.row) + ", " +
                                             std::to_string(e.col) + ") outside " +
                                             std::to_string(rows) + "x" + std::to_string(cols));
      }
      detail::require_finite(e.value, e.row, e.col);
    }
    // stable so duplicates are summed in input order
    std::stable_sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    std::vector<Index> col_ptr(cols + 1, 0);
    std::vector<Index> row_idx;
    std::vector<double> values;
    row_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (Index p = 0; p < entries.size();) {
      const Index r = entries[p].row;
      const Index c = entries[p].col;
      double sum = 0.0;
      for (; p < entries.size() && entries[p].row == r && entries[p].col == c; ++p) {
        sum += entries[p].value;
      }
      if (sum != 0.0) {
        row_idx.push_back(r);
        values.push_back(sum);
        ++col_ptr[c + 1];
      }
    }
    std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
    return SparseMatrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return values_.size(); }

  SparseColumn column(Index j) const noexcept {
    const Index begin = col_ptr_[j];
    const Index count = col_ptr_[j + 1] - begin;
    return {{row_idx_.data() + begin, count}, {values_.data() + begin, count}};
  }

  double operator()(Index i, Index j) const noexcept {
    const auto col = column(j);
    const auto it = std::lower_bound(col.rows.begin(), col.rows.end(), i);
    if (it == col.rows.end() || *it != i) return 0.0;
    return col.values[static_cast<Index>(it - col.rows.begin())];
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

/// An m x n matrix of n observations stored as columns, dense or sparse.
class ColumnMatrix {
 public:
  ColumnMatrix(DenseMatrix dense) : storage_(std::move(dense)) {}  // NOLINT(implicit)
  ColumnMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {}  // NOLINT(implicit)

  Index rows() const noexcept {
    return std::visit([](const auto& s) { return s.rows(); }, storage_);
  }
  Index cols() const noexcept {
    return std::visit([](const auto& s) { return s.cols(); }, storage_);
  }
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(storage_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(storage_); }

  /// Element lookup; O(log nnz(col)) for sparse storage.
  double at(Index i, Index j) const {
    return std::visit([&](const auto& s) { return s(i, j); }, storage_);
  }

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), storage_);
  }

 private:
  std::variant<DenseMatrix, SparseMatrix> storage_;
};

// Column kernels. Dense and sparse overloads share one calling convention so
// the algorithms above them are written once as templates.

inline double dot(std::span<const double> col, std::span<const double> x) noexcept {
  double s = 0.0;
  for (Index i = 0; i < col.size(); ++i) s += col[i] * x[i];
  return s;
}

inline double dot(const SparseColumn& col, std::span<const double> x) noexcept {
  double s = 0.0;
  for (Index p = 0; p < col.rows.size(); ++p) s += col.values[p] * x[col.rows[p]];
  return s;
}

inline void axpy(double alpha, std::span<const double> col, std::span<double> y) noexcept {
  for (Index i = 0; i < col.size(); ++i) y[i] += alpha * col[i];
}

inline void axpy(double alpha, const SparseColumn& col, std::span<double> y) noexcept {
  for (Index p = 0; p < col.rows.size(); ++p) y[col.rows[p]] += alpha * col.values[p];
}

/// acc += col, skipping structural zeros for sparse columns.
inline void accumulate(std::span<const double> col, std::span<double> acc) noexcept {
  for (Index i = 0; i < col.size(); ++i) acc[i] += col[i];
}

inline void accumulate(const SparseColumn& col, std::span<double> acc) noexcept {
  for (Index p = 0; p < col.rows.size(); ++p) acc[col.rows[p]] += col.values[p];
}

/// ||col - center||^2 without materializing the difference.
inline double squared_distance(std::span<const double> col, std::span<const double> center) noexcept {
  double s = 0.0;
  for (Index i = 0; i < col.size(); ++i) {
    const double d = col[i] - center[i];
    s += d * d;
  }
  return s;
}

inline double squared_distance(const SparseColumn& col, std::span<const double> center,
                               double center_sq_norm) noexcept {
  // mass of the center on this column's structural zeros, plus the explicit part
  double off_support = center_sq_norm;
  double on_support = 0.0;
  for (Index p = 0; p < col.rows.size(); ++p) {
    const double c = center[col.rows[p]];
    const double d = col.values[p] - c;
    off_support -= c * c;
    on_support += d * d;
  }
  return std::max(off_support, 0.0) + on_support;
}

inline bool same_column(std::span<const double> a, std::span<const double> b) noexcept {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

inline bool same_column(const SparseColumn& a, const SparseColumn& b) noexcept {
  return std::equal(a.rows.begin(), a.rows.end(), b.rows.begin(), b.rows.end()) &&
         std::equal(a.values.begin(), a.values.end(), b.values.begin(), b.values.end());
}

}  // namespace pdgp
