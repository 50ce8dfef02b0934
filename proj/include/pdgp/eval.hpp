#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pdgp/errors.hpp"
#include "pdgp/matrix.hpp"

namespace pdgp {

/// Cluster x class counts.
struct ContingencyTable {
  std::vector<Index> cluster_ids;          // row labels, ascending
  std::vector<Index> class_ids;            // column labels, ascending
  std::vector<std::vector<Index>> counts;  // counts[row][col]
  std::vector<Index> cluster_sizes;        // row sums
  Index total = 0;

  Index class_count() const noexcept { return class_ids.size(); }
  Index cluster_count() const noexcept { return cluster_ids.size(); }
};

/// Builds a table directly from counts laid out cluster x class, e.g. a reported cross-tab.
inline ContingencyTable table_from_counts(std::vector<std::vector<Index>> counts) {
  if (counts.empty() || counts.front().empty()) {
    fail(ErrorCode::InvalidArgument, "contingency table needs at least one cluster and one class");
  }
  ContingencyTable t;
  const Index classes = counts.front().size();
  std::vector<Index> class_totals(classes, 0);
  for (Index r = 0; r < counts.size(); ++r) {
    if (counts[r].size() != classes) fail(ErrorCode::LengthMismatch, "ragged contingency counts");
    Index row_sum = 0;
    for (Index c = 0; c < classes; ++c) {
      row_sum += counts[r][c];
      class_totals[c] += counts[r][c];
    }
    t.cluster_ids.push_back(r);
    t.cluster_sizes.push_back(row_sum);
    t.total += row_sum;
  }
  for (Index c = 0; c < classes; ++c) {
    if (class_totals[c] == 0) {
      fail(ErrorCode::InvalidArgument, "class column " + std::to_string(c) + " has no members");
    }
    t.class_ids.push_back(c);
  }
  t.counts = std::move(counts);
  return t;
}

/// counts[j][i] = |{t : assignment[t] = cluster_ids[j] and labels[t] = class_ids[i]}|.
inline ContingencyTable contingency(std::span<const Index> assignment, std::span<const Index> labels) {
  if (assignment.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, std::to_string(assignment.size()) + " assignments vs " +
                                        std::to_string(labels.size()) + " labels");
  }
  if (assignment.empty()) fail(ErrorCode::InvalidArgument, "no observations to tabulate");

  const auto distinct = [](std::span<const Index> ids) {
    std::vector<Index> out(ids.begin(), ids.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  const auto position = [](const std::vector<Index>& ids, Index id) {
    return static_cast<Index>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  ContingencyTable t;
  t.cluster_ids = distinct(assignment);
  t.class_ids = distinct(labels);
  t.counts.assign(t.cluster_ids.size(), std::vector<Index>(t.class_ids.size(), 0));
  t.cluster_sizes.assign(t.cluster_ids.size(), 0);
  for (Index k = 0; k < assignment.size(); ++k) {
    const Index r = position(t.cluster_ids, assignment[k]);
    ++t.counts[r][position(t.class_ids, labels[k])];
    ++t.cluster_sizes[r];
  }
  t.total = assignment.size();
  return t;
}

/// Size-weighted class entropy of the clusters, in bits:
///   sum_j (n_j / n) * e_j,  e_j = -sum_i p_ij log2 p_ij,  p_ij = counts[j][i] / n_j,
/// with 0 log 0 = 0.
inline double raw_entropy(const ContingencyTable& t) {
  if (t.total == 0) fail(ErrorCode::InvalidArgument, "empty contingency table");
  double total = 0.0;
  for (Index r = 0; r < t.counts.size(); ++r) {
    const double nj = static_cast<double>(t.cluster_sizes[r]);
    if (nj == 0.0) continue;
    double e = 0.0;
    for (Index count : t.counts[r]) {
      if (count == 0) continue;
      const double p = static_cast<double>(count) / nj;
      e -= p * std::log2(p);
    }
    total += nj / static_cast<double>(t.total) * e;
  }
  return total;
}

/// raw_entropy / log2(c) for c true classes: 0 for pure clusters, 1 when every
/// cluster mirrors a uniform class mix. SingleClass when c < 2 (the raw entropy
/// is then 0).
inline double normalized_entropy(const ContingencyTable& t) {
  if (t.class_count() < 2) {
    fail(ErrorCode::SingleClass, "normalized entropy needs at least 2 classes");
  }
  const double value = raw_entropy(t) / std::log2(static_cast<double>(t.class_count()));
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace pdgp
