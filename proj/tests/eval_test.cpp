#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pdgp/eval.hpp"
#include "support.hpp"

using namespace pdgp;
using testing_support::Rng;

namespace {

std::vector<std::vector<Index>> random_table(Rng& rng, Index clusters, Index classes) {
  std::vector<std::vector<Index>> t(clusters, std::vector<Index>(classes, 0));
  for (auto& row : t) {
    for (auto& x : row) x = rng.coin(0.6) ? rng.index(0, 30) : 0;
  }
  for (Index c = 0; c < classes; ++c) t[rng.index(0, clusters - 1)][c] += 1;
  return t;
}

}  // namespace

TEST(Contingency, DirectCount) {
  const std::vector<Index> assignment{1, 1, 2};
  const std::vector<Index> labels{0, 0, 1};
  const auto t = contingency(assignment, labels);
  EXPECT_EQ(t.counts, (std::vector<std::vector<Index>>{{2, 0}, {0, 1}}));
  EXPECT_EQ(t.cluster_ids, (std::vector<Index>{1, 2}));
  EXPECT_EQ(t.cluster_sizes, (std::vector<Index>{2, 1}));
  EXPECT_EQ(t.total, 3u);
}

TEST(Contingency, SingleCluster) {
  std::vector<Index> labels(10, 1);
  std::fill(labels.begin(), labels.begin() + 3, 0);
  const auto t = contingency(std::vector<Index>(10, 0), labels);
  EXPECT_EQ(t.counts, (std::vector<std::vector<Index>>{{3, 7}}));
}

TEST(Contingency, Errors) {
  try {
    contingency(std::vector<Index>{0, 1}, std::vector<Index>{0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  EXPECT_THROW(table_from_counts({{1, 0}, {2, 0}}), Error);
}

TEST(NormalizedEntropy, PureClustersScoreZero) {
  EXPECT_EQ(normalized_entropy(table_from_counts({{5, 0, 0}, {0, 0, 4}, {0, 9, 0}, {0, 0, 2}})), 0.0);
}

TEST(NormalizedEntropy, UniformSingleClusterScoresOne) {
  for (Index c = 2; c <= 8; ++c) {
    EXPECT_EQ(normalized_entropy(table_from_counts({std::vector<Index>(c, 25)})), 1.0) << c;
  }
}

TEST(NormalizedEntropy, ReferenceIrisTables) {
  EXPECT_NEAR(normalized_entropy(table_from_counts({{50, 0, 0}, {0, 50, 34}, {0, 0, 16}})), 0.345, 0.005);
  EXPECT_NEAR(normalized_entropy(table_from_counts({{50, 9, 0}, {0, 38, 14}, {0, 3, 36}})), 0.401, 0.005);
}

TEST(NormalizedEntropy, SingleClassIsAnError) {
  try {
    normalized_entropy(table_from_counts({{3}, {4}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
  EXPECT_EQ(raw_entropy(table_from_counts({{3}, {4}})), 0.0);
}

TEST(NormalizedEntropy, RangeAndRawScaling) {
  Rng rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    const Index classes = rng.index(2, 6);
    const auto t = table_from_counts(random_table(rng, rng.index(1, 8), classes));
    const double e = normalized_entropy(t);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
    EXPECT_NEAR(raw_entropy(t), e * std::log2(static_cast<double>(classes)), 1e-12);
  }
}

TEST(NormalizedEntropy, RefiningAClusterNeverIncreasesEntropy) {
  Rng rng(52);
  for (int trial = 0; trial < 500; ++trial) {
    auto counts = random_table(rng, rng.index(1, 6), rng.index(2, 5));
    const double before = normalized_entropy(table_from_counts(counts));
    const Index r = rng.index(0, counts.size() - 1);
    std::vector<Index> piece(counts[r].size());
    for (Index c = 0; c < piece.size(); ++c) {
      piece[c] = rng.index(0, counts[r][c]);
      counts[r][c] -= piece[c];
    }
    counts.push_back(piece);
    EXPECT_LE(normalized_entropy(table_from_counts(counts)), before + 1e-12);
  }
}

TEST(NormalizedEntropy, InvariantUnderRelabeling) {
  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.index(5, 200);
    std::vector<Index> assignment(n);
    std::vector<Index> labels(n);
    for (Index j = 0; j < n; ++j) {
      assignment[j] = rng.index(0, 5);
      labels[j] = rng.index(0, 3);
    }
    if (std::all_of(labels.begin(), labels.end(), [&](Index x) { return x == labels[0]; })) continue;
    std::vector<Index> cluster_map(6);
    std::vector<Index> class_map(4);
    std::iota(cluster_map.begin(), cluster_map.end(), Index{10});
    std::iota(class_map.begin(), class_map.end(), Index{0});
    std::shuffle(cluster_map.begin(), cluster_map.end(), rng.engine());
    std::shuffle(class_map.begin(), class_map.end(), rng.engine());
    auto a2 = assignment;
    auto l2 = labels;
    for (auto& x : a2) x = cluster_map[x];
    for (auto& x : l2) x = class_map[x];
    EXPECT_NEAR(normalized_entropy(contingency(assignment, labels)), normalized_entropy(contingency(a2, l2)), 1e-12);
  }
}
