#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdgp/errors.hpp"
#include "pdgp/linalg.hpp"
#include "pdgp/matrix.hpp"
#include "pdgp/partition.hpp"

namespace pdgp {

enum class SplitRule {
  Sign,  // PDDP: split the projections at zero
  Gap,   // PDGP: split at the widest in-window gap
};

constexpr std::string_view to_string(SplitRule rule) {
  return rule == SplitRule::Sign ? "pddp" : "pdgp";
}

struct SplitStrategy {
  SplitRule rule = SplitRule::Gap;
  double tau = 0.2;  // fringe tolerance; ignored by the sign rule

  static SplitStrategy pddp() { return {SplitRule::Sign, 0.2}; }
  static SplitStrategy pdgp(double tau = 0.2) { return {SplitRule::Gap, tau}; }
};

/// Leaf ranking used to pick the next cluster to split.
enum class Selection {
  Scatter,   // sum of squared distances to the leaf mean
  Variance,  // scatter divided by leaf size
};

constexpr std::string_view to_string(Selection s) {
  return s == Selection::Scatter ? "scatter" : "variance";
}

struct ClusterOptions {
  SplitStrategy strategy;
  Selection selection = Selection::Scatter;
  PowerIterationOptions svd;
  // Treat a non-converged singular triplet as an error instead of splitting on the best iterate.
  bool strict_convergence = false;
};

struct SplitRecord {
  SplitRule rule = SplitRule::Gap;
  Index left_child = 0;
  Index right_child = 0;
  double sigma = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> projections;    // one per member of the split node, in member order
  std::optional<GapDiagnostics> gap;  // present for gap splits
};

struct ClusterNode {
  Index id = 0;
  std::optional<Index> parent;
  std::vector<Index> members;  // ascending column indices into the clustered matrix
  double scatter = 0.0;
  bool splittable = true;
  std::string unsplittable_reason;
  std::optional<SplitRecord> split;

  bool is_leaf() const noexcept { return !split.has_value(); }
};

struct ClusterTree {
  std::vector<ClusterNode> nodes;  // indexed by id; root is 0, ids follow creation order
  std::vector<Index> leaves;       // current leaf ids, ascending (creation order)
  std::vector<Index> assignment;   // assignment[j] = position in `leaves` of the leaf holding column j
  Index requested_k = 1;
  bool complete = true;            // false when splitting stopped before requested_k leaves
  std::vector<std::string> warnings;

  const ClusterNode& root() const { return nodes.front(); }
  const ClusterNode& leaf(Index cluster) const { return nodes[leaves[cluster]]; }
  Index cluster_count() const noexcept { return leaves.size(); }
};

/// Ranking value of a node under the given selection rule.
inline double selection_score(const ClusterNode& node, Selection selection) {
  return selection == Selection::Scatter ? node.scatter
                                         : node.scatter / static_cast<double>(node.members.size());
}

/// The leaf of maximal scatter (or variance) among leaves that have at least two
/// members, positive scatter, and have not been marked unsplittable. Scores equal
/// to within a relative 1e-10 go to the earliest-created leaf.
inline Index select_splittable(const ClusterTree& tree, Selection selection = Selection::Scatter) {
  constexpr double kTieTolerance = 1e-10;
  std::optional<Index> best;
  double best_score = 0.0;
  for (Index id : tree.leaves) {
    const auto& node = tree.nodes[id];
    if (!node.splittable || node.members.size() < 2 || !(node.scatter > 0.0)) continue;
    const double score = selection_score(node, selection);
    if (!best || score > best_score * (1.0 + kTieTolerance)) {
      best = id;
      best_score = score;
    }
  }
  if (!best) {
    fail(ErrorCode::NothingSplittable, "every leaf is a singleton, has zero scatter, or is degenerate");
  }
  return *best;
}

inline ClusterNode make_node(const ColumnMatrix& a, std::vector<Index> members) {
  ClusterNode node;
  const auto mean = column_mean(a, members);
  node.scatter = scatter(a, members, mean);
  node.members = std::move(members);
  return node;
}

struct SplitOutcome {
  SplitRecord record;  // child ids are left for the tree to fill in
  ClusterNode left;
  ClusterNode right;
};

/// Splits one cluster along the leading singular direction of its centered
/// columns. Propagates ZeroMatrix, DegenerateVector and WindowEmpty; raises
/// NotConverged only under strict_convergence.
inline SplitOutcome split_leaf(const ColumnMatrix& a, const ClusterNode& node,
                               const ClusterOptions& options) {
  if (node.members.size() < 2) {
    fail(ErrorCode::InvalidArgument, "cannot split a cluster with fewer than 2 members");
  }
  const auto view = CenteredView::of(a, node.members);
  const auto triplet = leading_triplet(view, options.svd);
  if (!triplet.converged && options.strict_convergence) {
    fail(ErrorCode::NotConverged, "leading singular triplet of node " + std::to_string(node.id) +
                                      " did not converge in " + std::to_string(triplet.iterations) +
                                      " iterations");
  }

  SplitOutcome out;
  out.record.rule = options.strategy.rule;
  out.record.sigma = triplet.sigma;
  out.record.iterations = triplet.iterations;
  out.record.converged = triplet.converged;
  out.record.projections = projections(triplet);

  Partition part;
  if (options.strategy.rule == SplitRule::Sign) {
    part = principal_partition(out.record.projections);
  } else {
    auto gs = gap_partition(out.record.projections, options.strategy.tau);
    part = std::move(gs.partition);
    out.record.gap = std::move(gs.diagnostics);
  }

  const auto pick = [&](const std::vector<Index>& local) {
    std::vector<Index> global(local.size());
    for (Index i = 0; i < local.size(); ++i) global[i] = node.members[local[i]];
    return global;
  };
  out.left = make_node(a, pick(part.left));
  out.right = make_node(a, pick(part.right));
  return out;
}

namespace detail {

inline void refresh_assignment(ClusterTree& tree) {
  for (Index c = 0; c < tree.leaves.size(); ++c) {
    for (Index j : tree.nodes[tree.leaves[c]].members) tree.assignment[j] = c;
  }
}

inline bool marks_unsplittable(ErrorCode code) {
  return code == ErrorCode::DegenerateVector || code == ErrorCode::ZeroMatrix ||
         code == ErrorCode::WindowEmpty;
}

}  // namespace detail

/// Called after every successful split with the updated tree.
using SplitObserver = std::function<void(const ClusterTree&)>;

/// Divisive clustering: repeatedly split the leaf chosen by select_splittable
/// until k leaves exist. Leaves that cannot be split (identical columns, no
/// admissible gap) are marked and skipped. If no leaf remains splittable the
/// tree is returned early with complete == false and a warning.
inline ClusterTree cluster(const ColumnMatrix& a, Index k, const ClusterOptions& options = {},
                           const SplitObserver& observer = {}) {
  const Index n = a.cols();
  if (k < 1 || k > n) {
    fail(ErrorCode::InvalidK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  if (options.strategy.rule == SplitRule::Gap &&
      !(options.strategy.tau >= 0.0 && options.strategy.tau < 1.0)) {
    fail(ErrorCode::InvalidArgument, "fringe tolerance must lie in [0, 1)");
  }

  ClusterTree tree;
  tree.requested_k = k;
  tree.nodes.push_back(make_node(a, all_columns(n)));
  tree.leaves.push_back(0);
  tree.assignment.assign(n, 0);

  while (tree.leaves.size() < k) {
    Index target = 0;
    try {
      target = select_splittable(tree, options.selection);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NothingSplittable) throw;
      tree.complete = false;
      tree.warnings.push_back("stopped at " + std::to_string(tree.leaves.size()) + " of " +
                              std::to_string(k) + " clusters: nothing left to split");
      break;
    }

    SplitOutcome outcome;
    try {
      outcome = split_leaf(a, tree.nodes[target], options);
    } catch (const Error& e) {
      if (!detail::marks_unsplittable(e.code())) throw;
      tree.nodes[target].splittable = false;
      tree.nodes[target].unsplittable_reason = e.what();
      tree.warnings.push_back("node " + std::to_string(target) + " marked unsplittable: " + e.what());
      continue;
    }
    if (!outcome.record.converged) {
      tree.warnings.push_back("node " + std::to_string(target) + ": power iteration stopped after " +
                              std::to_string(outcome.record.iterations) +
                              " iterations without converging; split on the last iterate");
    }

    const Index left_id = tree.nodes.size();
    const Index right_id = left_id + 1;
    outcome.left.id = left_id;
    outcome.right.id = right_id;
    outcome.left.parent = target;
    outcome.right.parent = target;
    outcome.record.left_child = left_id;
    outcome.record.right_child = right_id;
    tree.nodes[target].split = std::move(outcome.record);
    tree.nodes.push_back(std::move(outcome.left));
    tree.nodes.push_back(std::move(outcome.right));

    std::erase(tree.leaves, target);
    tree.leaves.push_back(left_id);
    tree.leaves.push_back(right_id);
    detail::refresh_assignment(tree);
    if (observer) observer(tree);
  }
  return tree;
}

}  // namespace pdgp
