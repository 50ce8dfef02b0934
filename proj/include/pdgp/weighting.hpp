#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pdgp/errors.hpp"
#include "pdgp/matrix.hpp"

namespace pdgp {

enum class WeightingScheme {
  None,
  Norm,         // unit Euclidean length per column
  Tfidf,        // literal formula, absent terms weighted too
  TfidfSparse,  // same formula restricted to present terms
};

constexpr std::string_view to_string(WeightingScheme w) {
  switch (w) {
    case WeightingScheme::None: return "none";
    case WeightingScheme::Norm: return "norm";
    case WeightingScheme::Tfidf: return "tfidf";
    case WeightingScheme::TfidfSparse: return "tfidf-sparse";
  }
  return "none";
}

namespace detail {

struct TermStats {
  std::vector<double> column_max;  // per document
  std::vector<Index> doc_freq;     // per term
};

inline TermStats term_stats(const ColumnMatrix& a) {
  TermStats st{std::vector<double>(a.cols(), 0.0), std::vector<Index>(a.rows(), 0)};
  const auto check = [](double x, Index i, Index j) {
    if (x < 0.0) {
      fail(ErrorCode::InvalidMatrix, "negative term count at (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ")");
    }
  };
  if (a.is_sparse()) {
    const auto& s = a.sparse();
    for (Index j = 0; j < s.cols(); ++j) {
      const auto col = s.column(j);
      for (Index p = 0; p < col.rows.size(); ++p) {
        check(col.values[p], col.rows[p], j);
        st.column_max[j] = std::max(st.column_max[j], col.values[p]);
        ++st.doc_freq[col.rows[p]];
      }
    }
  } else {
    const auto& d = a.dense();
    for (Index j = 0; j < d.cols(); ++j) {
      for (Index i = 0; i < d.rows(); ++i) {
        const double x = d(i, j);
        check(x, i, j);
        st.column_max[j] = std::max(st.column_max[j], x);
        if (x > 0.0) ++st.doc_freq[i];
      }
    }
  }
  for (Index j = 0; j < a.cols(); ++j) {
    if (st.column_max[j] == 0.0) {
      fail(ErrorCode::EmptyColumn, "column " + std::to_string(j) + " has no positive entry");
    }
  }
  for (Index i = 0; i < a.rows(); ++i) {
    if (st.doc_freq[i] == 0) {
      fail(ErrorCode::EmptyRow, "row " + std::to_string(i) + " occurs in no column");
    }
  }
  return st;
}

}  // namespace detail

/// Term weighting
///   w_ij = 0.5 * (1 + a_ij / max_k a_kj) * log2(n / df_i)
/// where df_i counts the columns with a_ij > 0.
///
/// The literal formula gives absent terms (a_ij = 0) the weight
/// 0.5 * log2(n / df_i), so on sparse input every row with df_i < n fills in
/// completely: storage grows to nnz = sum over such rows of n. Rows present in
/// every column weigh zero and stay empty. `present_terms_only` keeps the
/// input's sparsity pattern by weighting nonzero entries only.
///
/// Requires nonnegative counts, no all-zero column (EmptyColumn) and no
/// all-zero row (EmptyRow); see prune().
inline ColumnMatrix tfidf(const ColumnMatrix& a, bool present_terms_only = false) {
  const auto st = detail::term_stats(a);
  const Index m = a.rows();
  const Index n = a.cols();
  std::vector<double> idf(m);
  for (Index i = 0; i < m; ++i) {
    idf[i] = std::log2(static_cast<double>(n) / static_cast<double>(st.doc_freq[i]));
  }
  const auto weight = [&](double x, Index i, Index j) {
    return 0.5 * (1.0 + x / st.column_max[j]) * idf[i];
  };

  if (!a.is_sparse()) {
    const auto& d = a.dense();
    std::vector<double> out(m * n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < m; ++i) {
        const double x = d(i, j);
        out[j * m + i] = (present_terms_only && x == 0.0) ? 0.0 : weight(x, i, j);
      }
    }
    return DenseMatrix(m, n, std::move(out));
  }

  const auto& s = a.sparse();
  std::vector<MatrixEntry> entries;
  entries.reserve(s.nnz());
  for (Index j = 0; j < n; ++j) {
    const auto col = s.column(j);
    Index p = 0;
    for (Index i = 0; i < m; ++i) {
      const bool present = p < col.rows.size() && col.rows[p] == i;
      const double x = present ? col.values[p++] : 0.0;
      if (!present && present_terms_only) continue;
      const double w = weight(x, i, j);
      if (w != 0.0) entries.push_back({i, j, w});
    }
  }
  return SparseMatrix::from_entries(m, n, std::move(entries));
}

/// Scales every column to unit Euclidean length. EmptyColumn on an all-zero column.
inline ColumnMatrix norm_scale(const ColumnMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  const auto checked_norm = [](double sq, Index j) {
    if (sq == 0.0) fail(ErrorCode::EmptyColumn, "column " + std::to_string(j) + " is all zeros");
    return std::sqrt(sq);
  };
  if (!a.is_sparse()) {
    const auto& d = a.dense();
    std::vector<double> out(d.values().begin(), d.values().end());
    for (Index j = 0; j < n; ++j) {
      const auto col = d.column(j);
      double sq = 0.0;
      for (double x : col) sq += x * x;
      const double len = checked_norm(sq, j);
      for (Index i = 0; i < m; ++i) out[j * m + i] /= len;
    }
    return DenseMatrix(m, n, std::move(out));
  }
  const auto& s = a.sparse();
  std::vector<MatrixEntry> entries;
  entries.reserve(s.nnz());
  for (Index j = 0; j < n; ++j) {
    const auto col = s.column(j);
    double sq = 0.0;
    for (double x : col.values) sq += x * x;
    const double len = checked_norm(sq, j);
    for (Index p = 0; p < col.rows.size(); ++p) entries.push_back({col.rows[p], j, col.values[p] / len});
  }
  return SparseMatrix::from_entries(m, n, std::move(entries));
}

inline ColumnMatrix apply_weighting(const ColumnMatrix& a, WeightingScheme scheme) {
  switch (scheme) {
    case WeightingScheme::Norm: return norm_scale(a);
    case WeightingScheme::Tfidf: return tfidf(a, false);
    case WeightingScheme::TfidfSparse: return tfidf(a, true);
    case WeightingScheme::None: break;
  }
  return a;
}

struct PruneResult {
  ColumnMatrix matrix;
  std::vector<Index> kept_rows;  // original indices, ascending
  std::vector<Index> kept_cols;
};

/// Drops all-zero rows and all-zero columns so tfidf/norm_scale preconditions
/// hold. Column removal changes the observation set; use kept_cols to realign labels.
/// InvalidMatrix when nothing survives.
inline PruneResult prune(const ColumnMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  std::vector<MatrixEntry> nonzeros;
  if (a.is_sparse()) {
    const auto& s = a.sparse();
    for (Index j = 0; j < n; ++j) {
      const auto col = s.column(j);
      for (Index p = 0; p < col.rows.size(); ++p) nonzeros.push_back({col.rows[p], j, col.values[p]});
    }
  } else {
    const auto& d = a.dense();
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < m; ++i) {
        if (d(i, j) != 0.0) nonzeros.push_back({i, j, d(i, j)});
      }
    }
  }
  if (nonzeros.empty()) fail(ErrorCode::InvalidMatrix, "matrix has no nonzero entries to keep");

  constexpr Index kDropped = static_cast<Index>(-1);
  std::vector<Index> new_row(m, kDropped);
  std::vector<Index> new_col(n, kDropped);
  for (const auto& e : nonzeros) new_row[e.row] = new_col[e.col] = 0;
  std::vector<Index> kept_rows;
  std::vector<Index> kept_cols;
  for (Index i = 0; i < m; ++i) {
    if (new_row[i] != kDropped) {
      new_row[i] = kept_rows.size();
      kept_rows.push_back(i);
    }
  }
  for (Index j = 0; j < n; ++j) {
    if (new_col[j] != kDropped) {
      new_col[j] = kept_cols.size();
      kept_cols.push_back(j);
    }
  }
  for (auto& e : nonzeros) {
    e.row = new_row[e.row];
    e.col = new_col[e.col];
  }
  const Index rows = kept_rows.size();
  const Index cols = kept_cols.size();
  if (a.is_sparse()) {
    return {SparseMatrix::from_entries(rows, cols, std::move(nonzeros)), std::move(kept_rows),
            std::move(kept_cols)};
  }
  std::vector<double> values(rows * cols, 0.0);
  for (const auto& e : nonzeros) values[e.col * rows + e.row] = e.value;
  return {DenseMatrix(rows, cols, std::move(values)), std::move(kept_rows), std::move(kept_cols)};
}

}  // namespace pdgp
