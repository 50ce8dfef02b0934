#include <gtest/gtest.h>

#include <limits>

#include "pdgp/matrix.hpp"
#include "support.hpp"

using namespace pdgp;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no pdgp::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(DenseMatrix, FromRowsIsColumnMajor) {
  const auto a = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a(1, 2), 6.0);
  EXPECT_EQ(a.column(1)[0], 2.0);
  EXPECT_EQ(a.column(1)[1], 5.0);
}

TEST(DenseMatrix, RejectsBadInput) {
  EXPECT_EQ(code_of([] { DenseMatrix(0, 3, {}); }), ErrorCode::InvalidMatrix);
  EXPECT_EQ(code_of([] { DenseMatrix(2, 2, {1, 2, 3}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { DenseMatrix(1, 2, {1, std::numeric_limits<double>::quiet_NaN()}); }),
            ErrorCode::InvalidMatrix);
  EXPECT_EQ(code_of([] { DenseMatrix(1, 1, {std::numeric_limits<double>::infinity()}); }),
            ErrorCode::InvalidMatrix);
}

TEST(SparseMatrix, FromEntriesSumsDuplicatesAndDropsZeros) {
  const auto s = SparseMatrix::from_entries(2, 2, {{1, 1, 2.0}, {0, 0, 2.0}, {0, 0, 3.0}, {1, 0, 1.0}, {1, 0, -1.0}});
  EXPECT_EQ(s.nnz(), 2u);
  EXPECT_EQ(s(0, 0), 5.0);
  EXPECT_EQ(s(1, 0), 0.0);
  EXPECT_EQ(s(1, 1), 2.0);
}

TEST(SparseMatrix, ValidatesStructure) {
  EXPECT_EQ(code_of([] { SparseMatrix(2, 1, {0, 1}, {2}, {1.0}); }), ErrorCode::IndexOutOfRange);
  EXPECT_EQ(code_of([] { SparseMatrix(2, 1, {0, 2}, {1, 0}, {1.0, 1.0}); }), ErrorCode::InvalidMatrix);
  EXPECT_EQ(code_of([] { SparseMatrix(2, 1, {0, 1}, {0}, {0.0}); }), ErrorCode::InvalidMatrix);
  EXPECT_EQ(code_of([] { SparseMatrix::from_entries(2, 2, {{0, 5, 1.0}}); }), ErrorCode::IndexOutOfRange);
}

TEST(ColumnMatrix, StoragesAgreeElementwise) {
  testing_support::Rng rng(7);
  const auto s = testing_support::random_sparse(rng, 6, 9, 0.3);
  const ColumnMatrix sparse = s;
  const ColumnMatrix dense = testing_support::to_dense(sparse);
  ASSERT_TRUE(sparse.is_sparse());
  ASSERT_FALSE(dense.is_sparse());
  for (Index j = 0; j < 9; ++j) {
    for (Index i = 0; i < 6; ++i) EXPECT_EQ(sparse.at(i, j), dense.at(i, j));
  }
}

TEST(Kernels, SparseSquaredDistanceMatchesDense) {
  testing_support::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing_support::random_sparse(rng, 8, 1, 0.4);
    const auto d = testing_support::to_dense(s);
    const auto center = rng.normal_vector(8);
    double center_sq = 0.0;
    for (double x : center) center_sq += x * x;
    EXPECT_NEAR(squared_distance(s.column(0), center, center_sq), squared_distance(d.column(0), center), 1e-10);
  }
}
