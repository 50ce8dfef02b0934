#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pdgp/errors.hpp"
#include "pdgp/matrix.hpp"

namespace pdgp {

/// Two-way split of positions 0..n-1. Both sides are nonempty and sorted ascending.
struct Partition {
  std::vector<Index> left;
  std::vector<Index> right;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Equality up to swapping the two sides.
inline bool same_split(const Partition& a, const Partition& b) {
  return a == b || (a.left == b.right && a.right == b.left);
}

struct GapDiagnostics {
  std::vector<double> sorted_values;  // ascending
  std::vector<Index> permutation;     // sorted_values[i] == v[permutation[i]]
  Index gap_index = 0;                // last position (in sorted order) of the low side
  double gap_width = 0.0;             // sorted_values[gap_index + 1] - sorted_values[gap_index]
  Index fringe_lo = 0;                // admissible gap_index range is [fringe_lo, fringe_hi)
  Index fringe_hi = 0;
};

struct GapSplit {
  Partition partition;
  GapDiagnostics diagnostics;
};

/// Points excluded from split candidacy at each end of the sorted projections:
/// max(1, ceil(tau * n / 2)). Each resulting side keeps at least this many points.
inline Index fringe_size(Index n, double tau) {
  const double raw = tau * static_cast<double>(n) / 2.0;
  // absorbs representation error such as 0.2 * 10 / 2 landing just above 1
  const auto f = static_cast<Index>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::max<Index>(1, f);
}

namespace detail {

inline void require_splittable_input(std::span<const double> v) {
  if (v.size() < 2) fail(ErrorCode::InvalidArgument, "need at least 2 values to split");
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite projection value");
  }
}

inline bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace detail

/// Splits at the widest gap between consecutive sorted values, considering only
/// split points that leave at least fringe_size(n, tau) values on each side.
/// Equal gaps go to the most balanced split, then the smallest one.
inline GapSplit gap_partition(std::span<const double> v, double tau) {
  detail::require_splittable_input(v);
  if (!(tau >= 0.0 && tau < 1.0)) {
    fail(ErrorCode::InvalidArgument, "fringe tolerance must lie in [0, 1), got " + std::to_string(tau));
  }
  const Index n = v.size();
  const Index f = fringe_size(n, tau);
  if (f > n - f) {
    fail(ErrorCode::WindowEmpty, "tau = " + std::to_string(tau) + " leaves no admissible split among " +
                                     std::to_string(n) + " values");
  }
  if (detail::all_equal(v)) {
    fail(ErrorCode::DegenerateVector, "all " + std::to_string(n) + " values are equal");
  }

  GapSplit out;
  auto& d = out.diagnostics;
  d.permutation.resize(n);
  std::iota(d.permutation.begin(), d.permutation.end(), Index{0});
  std::stable_sort(d.permutation.begin(), d.permutation.end(),
                   [&](Index a, Index b) { return v[a] < v[b]; });
  d.sorted_values.resize(n);
  for (Index i = 0; i < n; ++i) d.sorted_values[i] = v[d.permutation[i]];

  const auto& s = d.sorted_values;
  // k = size of the low side; gap between s[k-1] and s[k]
  const auto imbalance = [n](Index k) { return k * 2 > n ? k * 2 - n : n - k * 2; };
  Index best_k = f;
  double best_gap = s[f] - s[f - 1];
  for (Index k = f + 1; k <= n - f; ++k) {
    const double gap = s[k] - s[k - 1];
    if (gap > best_gap || (gap == best_gap && imbalance(k) < imbalance(best_k))) {
      best_gap = gap;
      best_k = k;
    }
  }

  d.gap_index = best_k - 1;
  d.gap_width = best_gap;
  d.fringe_lo = f - 1;
  d.fringe_hi = n - f;

  out.partition.left.assign(d.permutation.begin(), d.permutation.begin() + best_k);
  out.partition.right.assign(d.permutation.begin() + best_k, d.permutation.end());
  std::sort(out.partition.left.begin(), out.partition.left.end());
  std::sort(out.partition.right.begin(), out.partition.right.end());
  return out;
}

/// Sign split: nonnegative entries go left, negative entries right. When all
/// entries share a sign, falls back to the unrestricted (tau = 0) gap split so
/// both sides are always nonempty.
inline Partition principal_partition(std::span<const double> v) {
  detail::require_splittable_input(v);
  if (detail::all_equal(v)) {
    fail(ErrorCode::DegenerateVector, "all " + std::to_string(v.size()) + " values are equal");
  }
  Partition p;
  for (Index j = 0; j < v.size(); ++j) (v[j] >= 0.0 ? p.left : p.right).push_back(j);
  if (p.left.empty() || p.right.empty()) return gap_partition(v, 0.0).partition;
  return p;
}

}  // namespace pdgp
