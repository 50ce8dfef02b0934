#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdgp/linalg.hpp"
#include "pdgp/matrix.hpp"
#include "pdgp/partition.hpp"

namespace testing_support {

using pdgp::ColumnMatrix;
using pdgp::DenseMatrix;
using pdgp::Index;
using pdgp::MatrixEntry;
using pdgp::SparseMatrix;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(engine_); }
  Index index(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  std::mt19937_64& engine() { return engine_; }

  std::vector<double> normal_vector(Index n) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal();
    return v;
  }

  std::vector<double> unit_vector(Index n) {
    auto v = normal_vector(n);
    const double len = pdgp::norm2(v);
    for (auto& x : v) x /= len;
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

inline DenseMatrix random_dense(Rng& rng, Index m, Index n) {
  std::vector<double> v(m * n);
  for (auto& x : v) x = rng.normal();
  return DenseMatrix(m, n, std::move(v));
}

inline SparseMatrix random_sparse(Rng& rng, Index m, Index n, double density) {
  std::vector<MatrixEntry> entries;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (rng.coin(density)) entries.push_back({i, j, rng.normal()});
    }
  }
  return SparseMatrix::from_entries(m, n, std::move(entries));
}

inline DenseMatrix to_dense(const ColumnMatrix& a) {
  std::vector<double> v(a.rows() * a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) v[j * a.rows() + i] = a.at(i, j);
  }
  return DenseMatrix(a.rows(), a.cols(), std::move(v));
}

inline SparseMatrix to_sparse(const ColumnMatrix& a) {
  std::vector<MatrixEntry> entries;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a.at(i, j) != 0.0) entries.push_back({i, j, a.at(i, j)});
    }
  }
  return SparseMatrix::from_entries(a.rows(), a.cols(), std::move(entries));
}

inline Eigen::MatrixXd to_eigen(const ColumnMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) m(i, j) = a.at(i, j);
  }
  return m;
}

inline Eigen::MatrixXd centered_eigen(const ColumnMatrix& a) {
  Eigen::MatrixXd m = to_eigen(a);
  const Eigen::VectorXd mu = m.rowwise().mean();
  return m.colwise() - mu;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Leading singular pair from the symmetric eigendecomposition of CᵀC.
struct OracleTriplet {
  double sigma;
  double sigma2;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

inline OracleTriplet oracle_svd(const Eigen::MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.transpose() * c);
  const auto& values = eig.eigenvalues();  // ascending
  const Eigen::Index last = values.size() - 1;
  OracleTriplet t;
  t.sigma = std::sqrt(std::max(values(last), 0.0));
  t.sigma2 = last > 0 ? std::sqrt(std::max(values(last - 1), 0.0)) : 0.0;
  t.v = eig.eigenvectors().col(last);
  t.u = c * t.v / t.sigma;
  return t;
}

// Reference gap split: every admissible split point, widest gap, ties to the
// most balanced then the smallest low side.
struct OracleGap {
  std::vector<Index> left;
  std::vector<Index> right;
  Index low_size;
};

inline OracleGap oracle_gap(const std::vector<double>& v, double tau) {
  const Index n = v.size();
  std::vector<Index> order(n);
  for (Index i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v[a] < v[b]; });
  Index f = 1;
  while (static_cast<double>(f) < tau * static_cast<double>(n) / 2.0 - 1e-9) ++f;
  Index best = 0;
  double best_gap = -1.0;
  for (Index k = f; k + f <= n; ++k) {
    const double gap = v[order[k]] - v[order[k - 1]];
    const auto balance = [&](Index s) { return std::abs(2.0 * static_cast<double>(s) - static_cast<double>(n)); };
    if (gap > best_gap || (gap == best_gap && balance(k) < balance(best))) {
      best = k;
      best_gap = gap;
    }
  }
  OracleGap g;
  g.low_size = best;
  g.left.assign(order.begin(), order.begin() + best);
  g.right.assign(order.begin() + best, order.end());
  std::sort(g.left.begin(), g.left.end());
  std::sort(g.right.begin(), g.right.end());
  return g;
}

// Three groups of 40 points along a random line at offsets -1, 0, +1, with
// isotropic noise of 0.01; columns are shuffled. group[j] tells where column j came from.
struct Blobs {
  DenseMatrix matrix;
  std::vector<int> group;
};

inline Blobs three_collinear_blobs(std::uint64_t seed, Index dims = 2, Index per_group = 40) {
  Rng rng(seed);
  const auto direction = rng.unit_vector(dims);
  std::vector<double> origin(dims);
  for (auto& x : origin) x = rng.uniform(-5.0, 5.0);
  std::vector<int> group;
  for (int g = 0; g < 3; ++g) group.insert(group.end(), per_group, g);
  std::shuffle(group.begin(), group.end(), rng.engine());

  std::vector<double> values;
  values.reserve(dims * group.size());
  for (int g : group) {
    for (Index i = 0; i < dims; ++i) values.push_back(origin[i] + (g - 1) * direction[i] + rng.normal(0.0, 0.01));
  }
  return {DenseMatrix(dims, group.size(), std::move(values)), std::move(group)};
}

inline std::vector<Index> members_of(const std::vector<int>& group, int g) {
  std::vector<Index> out;
  for (Index j = 0; j < group.size(); ++j) {
    if (group[j] == g) out.push_back(j);
  }
  return out;
}

inline bool contains_all(const std::vector<Index>& sorted_set, const std::vector<Index>& subset) {
  return std::includes(sorted_set.begin(), sorted_set.end(), subset.begin(), subset.end());
}

inline bool disjoint(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return both.empty();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pdgp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string data_file(const std::string& name) { return std::string(PDGP_DATA_DIR) + "/" + name; }

}  // namespace testing_support
