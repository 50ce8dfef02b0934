#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "pdgp/errors.hpp"
#include "pdgp/matrix.hpp"

namespace pdgp {

inline double squared_norm(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return s;
}

inline double norm2(std::span<const double> x) noexcept { return std::sqrt(squared_norm(x)); }

inline std::vector<Index> all_columns(Index n) {
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

/// Row means over the selected columns. Columns are summed strictly left to right
/// so dense and sparse storage of the same matrix give bit-identical results.
inline std::vector<double> column_mean(const ColumnMatrix& a, std::span<const Index> members) {
  if (members.empty()) fail(ErrorCode::InvalidArgument, "mean of an empty column set");
  std::vector<double> mean(a.rows(), 0.0);
  a.visit([&](const auto& storage) {
    for (Index j : members) accumulate(storage.column(j), mean);
  });
  const double n = static_cast<double>(members.size());
  for (double& x : mean) x /= n;
  return mean;
}

inline std::vector<double> column_mean(const ColumnMatrix& a) {
  return column_mean(a, all_columns(a.cols()));
}

/// Sum of squared distances of the selected columns from `mean`: ||C||_F^2.
/// Divide by the member count for the per-point variance.
inline double scatter(const ColumnMatrix& a, std::span<const Index> members,
                      std::span<const double> mean) {
  if (mean.size() != a.rows()) {
    fail(ErrorCode::DimensionMismatch, "mean has length " + std::to_string(mean.size()) +
                                           ", matrix has " + std::to_string(a.rows()) + " rows");
  }
  const double mean_sq = squared_norm(mean);
  double total = 0.0;
  a.visit([&](const auto& storage) {
    for (Index j : members) {
      if constexpr (std::is_same_v<std::decay_t<decltype(storage)>, SparseMatrix>) {
        total += squared_distance(storage.column(j), mean, mean_sq);
      } else {
        total += squared_distance(storage.column(j), mean);
      }
    }
  });
  return total;
}

inline double scatter(const ColumnMatrix& a, std::span<const double> mean) {
  return scatter(a, all_columns(a.cols()), mean);
}

/// The centered matrix C = M - mean * e^T for a column subset M of a base matrix,
/// represented implicitly: only products with C and C^T are available, so sparse
/// bases are never densified. The base matrix must outlive the view.
class CenteredView {
 public:
  CenteredView(const ColumnMatrix& base, std::vector<Index> members, std::vector<double> mean)
      : base_(&base), members_(std::move(members)), mean_(std::move(mean)) {
    if (members_.empty()) fail(ErrorCode::InvalidArgument, "centered view over no columns");
    if (mean_.size() != base.rows()) {
      fail(ErrorCode::DimensionMismatch, "mean length does not match base rows");
    }
    for (Index j : members_) {
      if (j >= base.cols()) fail(ErrorCode::IndexOutOfRange, "member column " + std::to_string(j));
    }
  }

  /// Centers the selected columns at their own mean.
  static CenteredView of(const ColumnMatrix& base, std::vector<Index> members) {
    auto mean = column_mean(base, members);
    return CenteredView(base, std::move(members), std::move(mean));
  }

  static CenteredView of(const ColumnMatrix& base) { return of(base, all_columns(base.cols())); }

  Index rows() const noexcept { return base_->rows(); }
  Index cols() const noexcept { return members_.size(); }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<Index>& members() const noexcept { return members_; }
  const ColumnMatrix& base() const noexcept { return *base_; }

  /// y = C x
  void multiply(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    double x_sum = 0.0;
    base_->visit([&](const auto& storage) {
      for (Index j = 0; j < members_.size(); ++j) {
        if (x[j] != 0.0) axpy(x[j], storage.column(members_[j]), y);
        x_sum += x[j];
      }
    });
    for (Index i = 0; i < y.size(); ++i) y[i] -= x_sum * mean_[i];
  }

  /// y = C^T u
  void multiply_transpose(std::span<const double> u, std::span<double> y) const {
    double shift = 0.0;
    for (Index i = 0; i < u.size(); ++i) shift += mean_[i] * u[i];
    base_->visit([&](const auto& storage) {
      for (Index j = 0; j < members_.size(); ++j) y[j] = dot(storage.column(members_[j]), u) - shift;
    });
  }

  double squared_frobenius() const { return scatter(*base_, members_, mean_); }

  /// True when every selected column is bitwise equal to the first, i.e. C is exactly zero.
  bool columns_identical() const {
    return base_->visit([&](const auto& storage) {
      const auto first = storage.column(members_.front());
      for (Index j = 1; j < members_.size(); ++j) {
        if (!same_column(storage.column(members_[j]), first)) return false;
      }
      return true;
    });
  }

 private:
  const ColumnMatrix* base_;
  std::vector<Index> members_;
  std::vector<double> mean_;
};

/// Dominant singular triplet (sigma, u, v) of a centered matrix.
struct SingularTriplet {
  double sigma = 0.0;
  std::vector<double> u;  // length m, unit
  std::vector<double> v;  // length n, unit; largest-magnitude entry is nonnegative
  std::size_t iterations = 0;
  bool converged = false;
};

struct PowerIterationOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1000;
};

namespace detail {

// A start vector whose image under C is this small relative to ||C||_F is
// treated as lying in the null space.
inline constexpr double kStagnationRatio = 1e-8;

inline std::vector<double> start_vector(std::size_t attempt, Index n) {
  std::vector<double> v(n);
  if (attempt == 0) {
    std::fill(v.begin(), v.end(), 1.0);
  } else if (attempt == 1) {
    std::iota(v.begin(), v.end(), 1.0);
  } else {
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL + attempt);
    std::normal_distribution<double> normal;
    for (double& x : v) x = normal(gen);
  }
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
  return v;
}

inline void apply_sign_convention(SingularTriplet& t) {
  Index argmax = 0;
  for (Index j = 1; j < t.v.size(); ++j) {
    if (std::abs(t.v[j]) > std::abs(t.v[argmax])) argmax = j;
  }
  if (t.v[argmax] < 0.0) {
    for (double& x : t.v) x = -x;
    for (double& x : t.u) x = -x;
  }
}

}  // namespace detail

/// Leading singular triplet of C by alternating power iteration
///   v <- C^T u / ||C^T u||,  u <- C v / ||C v||,
/// started from the normalized all-ones vector, then the ramp [1..n], then a
/// fixed-seed Gaussian vector, moving on whenever C maps a start to
/// (numerically) zero. Converged when sigma changes by at most tol*sigma
/// between iterations and ||C^T u - sigma v|| <= tol*sigma (||C v - sigma u||
/// is zero by construction). A run that exhausts max_iter returns the last iterate
/// with converged == false.
///
/// Throws ZeroMatrix when every column equals the mean.
inline SingularTriplet leading_triplet(const CenteredView& c, double tol = 1e-8,
                                       std::size_t max_iter = 1000) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (max_iter < 1) fail(ErrorCode::InvalidArgument, "max_iter must be at least 1");

  const Index m = c.rows();
  const Index n = c.cols();
  const double frobenius = std::sqrt(c.squared_frobenius());
  if (frobenius == 0.0 || c.columns_identical()) {
    fail(ErrorCode::ZeroMatrix, "all " + std::to_string(n) + " columns equal their mean");
  }

  std::vector<double> u(m);
  std::vector<double> v;
  std::vector<double> z(n);
  constexpr std::size_t kMaxStarts = 4;
  std::size_t attempt = 0;
  for (; attempt < kMaxStarts; ++attempt) {
    v = detail::start_vector(attempt, n);
    c.multiply(v, u);
    const double nu = norm2(u);
    if (nu > detail::kStagnationRatio * frobenius) {
      for (double& x : u) x /= nu;
      break;
    }
  }
  if (attempt == kMaxStarts) {
    fail(ErrorCode::ZeroMatrix, "no start vector reached the range of the centered matrix");
  }

  SingularTriplet t;
  double sigma = 0.0;
  double sigma_prev = 0.0;
  for (std::size_t it = 1; it <= max_iter + 1; ++it) {
    c.multiply_transpose(u, z);
    if (it > 1) {
      double residual_sq = 0.0;
      for (Index j = 0; j < n; ++j) {
        const double d = z[j] - sigma * v[j];
        residual_sq += d * d;
      }
      const bool sigma_settled = std::abs(sigma - sigma_prev) <= tol * sigma;
      if (sigma_settled && std::sqrt(residual_sq) <= tol * sigma) {
        t.converged = true;
        t.iterations = it - 1;
        break;
      }
      if (it == max_iter + 1) {
        t.iterations = max_iter;
        break;
      }
    }
    const double nz = norm2(z);
    if (nz == 0.0) {
      fail(ErrorCode::ZeroMatrix, "iterate fell into the null space of the centered matrix");
    }
    for (Index j = 0; j < n; ++j) v[j] = z[j] / nz;
    c.multiply(v, u);
    sigma_prev = sigma;
    sigma = norm2(u);
    for (double& x : u) x /= sigma;
  }

  t.sigma = sigma;
  t.u = std::move(u);
  t.v = std::move(v);
  detail::apply_sign_convention(t);
  return t;
}

inline SingularTriplet leading_triplet(const CenteredView& c, const PowerIterationOptions& options) {
  return leading_triplet(c, options.tol, options.max_iter);
}

/// Coordinates of the centered columns along the principal trend direction:
/// alpha_j = u1^T c_j = sigma1 * v1[j].
inline std::vector<double> projections(const SingularTriplet& t) {
  std::vector<double> alpha(t.v.size());
  for (Index j = 0; j < t.v.size(); ++j) alpha[j] = t.sigma * t.v[j];
  return alpha;
}

}  // namespace pdgp
