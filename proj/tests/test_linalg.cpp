// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "romdiff/linalg.hpp"
#include "romdiff/rng.hpp"

using namespace romdiff;

namespace {

SparseMatrix random_sparse(index_t rows, index_t cols, double density, Xoshiro256pp& rng) {
  SparseBuilder builder(rows, cols);
  for (index_t r = 0; r < rows; ++r)
    for (index_t c = 0; c < cols; ++c)
      if (rng.next_double() < density) builder.add(r, c, 2.0 * rng.next_double() - 1.0);
  return builder.build();
}

/// Random strictly diagonally dominant matrix with negative off-diagonals.
SparseMatrix random_diag_dominant(index_t n, double density, Xoshiro256pp& rng) {
  SparseBuilder builder(n, n);
  std::vector<double> row_sum(n, 0.0);
  for (index_t r = 0; r < n; ++r)
    for (index_t c = 0; c < n; ++c) {
      if (r == c) continue;
      if (rng.next_double() < density) {
        const double v = -rng.next_double();
        builder.add(r, c, v);
        row_sum[r] += std::abs(v);
      }
    }
  for (index_t r = 0; r < n; ++r) builder.add(r, r, row_sum[r] + 0.5 + rng.next_double());
  return builder.build();
}

DenseMatrix random_dense(index_t rows, index_t cols, Xoshiro256pp& rng) {
  DenseMatrix m(rows, cols);
  for (index_t c = 0; c < cols; ++c)
    for (index_t r = 0; r < rows; ++r) m(r, c) = 2.0 * rng.next_double() - 1.0;
  return m;
}

}  // namespace

TEST_CASE("csr validation rejects malformed layouts") {
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), DimensionError);          // offsets short
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 2}, {0}, {1.0}), DimensionError);          // nnz mismatch
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), DimensionError);  // unsorted
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {0, 0}, {1.0, 2.0}), DimensionError);  // duplicate
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 1}, {3}, {1.0}), DimensionError);          // col range
  CHECK_NOTHROW(SparseMatrix(2, 2, {0, 1, 2}, {0, 1}, {1.0, 2.0}));
}

TEST_CASE("builder sums duplicates and drops exact zeros") {
  SparseBuilder builder(2, 2);
  builder.add(0, 0, 1.5);
  builder.add(0, 0, 2.5);
  builder.add(1, 0, 3.0);
  builder.add(1, 0, -3.0);  // cancels away
  builder.add(1, 1, 1.0);
  const SparseMatrix m = builder.build();
  CHECK(m.nnz() == 2);
  CHECK(m.to_dense()(0, 0) == doctest::Approx(4.0));
  CHECK(m.to_dense()(1, 0) == 0.0);
}

TEST_CASE("transpose-apply path matches the densified transpose") {
  Xoshiro256pp rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix m = random_sparse(40, 23, 0.15, rng);
    const Vector x = random_dense(40, 1, rng);
    const Vector via_sparse = m.apply_transpose(x);
    const Vector via_dense = m.to_dense().transpose() * x;
    CHECK((via_sparse - via_dense).norm() <= 1e-13 * std::max(1.0, via_dense.norm()));
  }
}

TEST_CASE("double transpose is the identity") {
  Xoshiro256pp rng(11);
  const SparseMatrix m = random_sparse(17, 31, 0.2, rng);
  const SparseMatrix mtt = m.transposed().transposed();
  CHECK(mtt.row_offsets() == m.row_offsets());
  CHECK(mtt.col_indices() == m.col_indices());
  CHECK(mtt.values() == m.values());
}

TEST_CASE("lu solves a scalar system") {
  SparseBuilder builder(1, 1);
  builder.add(0, 0, 2.0);
  const LuFactors lu = lu_factorize(builder.build());
  Vector b(1);
  b << 4.0;
  CHECK(lu.solve(b)(0) == doctest::Approx(2.0));
}

TEST_CASE("lu on the identity returns the right-hand side") {
  SparseBuilder builder(5, 5);
  for (index_t i = 0; i < 5; ++i) builder.add(i, i, 1.0);
  const LuFactors lu = lu_factorize(builder.build());
  Xoshiro256pp rng(3);
  const Vector b = random_dense(5, 1, rng);
  CHECK((lu.solve(b) - b).norm() <= 1e-14);
}

TEST_CASE("lu recovers a planted solution on diagonally dominant systems") {
  Xoshiro256pp rng(42);
  for (int trial = 0; trial < 4; ++trial) {
    const SparseMatrix m = random_diag_dominant(50, 0.12, rng);
    const Vector x_true = random_dense(50, 1, rng);
    const Vector b = m.apply(x_true);
    const LuFactors lu = lu_factorize(m);
    const Vector x = lu.solve(b);
    CHECK((x - x_true).norm() <= 1e-10 * x_true.norm());
    CHECK((m.apply(x) - b).norm() <= 1e-10 * b.norm());
  }
}

TEST_CASE("lu reports singular input") {
  SparseBuilder builder(2, 2);
  builder.add(0, 0, 1.0);
  builder.add(0, 1, 1.0);
  builder.add(1, 0, 1.0);
  builder.add(1, 1, 1.0);  // rank 1
  CHECK_THROWS_AS(lu_factorize(builder.build()), SingularMatrixError);

  // structurally singular: empty row
  SparseBuilder empty_row(2, 2);
  empty_row.add(0, 0, 1.0);
  CHECK_THROWS_AS(lu_factorize(empty_row.build()), SingularMatrixError);
}

TEST_CASE("orthonormalize keeps an orthonormal input unchanged") {
  const DenseMatrix q = orthonormalize(DenseMatrix::Identity(3, 3));
  CHECK((q - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("orthonormalize drops duplicate directions") {
  Xoshiro256pp rng(5);
  const Vector v = random_dense(20, 1, rng);
  DenseMatrix cols(20, 2);
  cols.col(0) = v;
  cols.col(1) = 2.0 * v;
  const DenseMatrix q = orthonormalize(cols);
  REQUIRE(q.cols() == 1);
  CHECK((q.col(0) - v / v.norm()).norm() <= 1e-14);
}

TEST_CASE("orthonormalize produces an orthonormal full-rank basis") {
  Xoshiro256pp rng(9);
  const DenseMatrix input = random_dense(100, 8, rng);
  const DenseMatrix q = orthonormalize(input);
  REQUIRE(q.cols() == 8);
  const DenseMatrix gram = q.transpose() * q;
  CHECK((gram - DenseMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("orthonormalize rejects an all-zero input") {
  CHECK_THROWS_AS(orthonormalize(DenseMatrix::Zero(4, 2)), EmptyBasisError);
}

TEST_CASE("svd of a diagonal matrix") {
  DenseMatrix s = DenseMatrix::Zero(2, 2);
  s(0, 0) = 3.0;
  s(1, 1) = 1.0;
  const SvdResult dec = svd(s);
  REQUIRE(dec.singular_values.size() == 2);
  CHECK(dec.singular_values[0] == doctest::Approx(3.0));
  CHECK(dec.singular_values[1] == doctest::Approx(1.0));
}

TEST_CASE("svd of a rank-1 outer product") {
  Xoshiro256pp rng(13);
  Vector x = random_dense(12, 1, rng);
  Vector y = random_dense(7, 1, rng);
  x /= x.norm();
  y /= y.norm();
  const DenseMatrix s = x * y.transpose();
  const SvdResult dec = svd(s);
  CHECK(dec.singular_values[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < dec.singular_values.size(); ++i)
    CHECK(dec.singular_values[i] <= 1e-13);
}

TEST_CASE("svd invariants and Eckart-Young tail identity") {
  Xoshiro256pp rng(17);
  const DenseMatrix s = random_dense(40, 10, rng);
  const SvdResult dec = svd(s);

  // orthonormality of U and Z
  CHECK((dec.left.transpose() * dec.left - DenseMatrix::Identity(10, 10)).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK((dec.right.transpose() * dec.right - DenseMatrix::Identity(10, 10)).cwiseAbs().maxCoeff() <=
        1e-12);

  // non-increasing singular values
  for (std::size_t i = 1; i < dec.singular_values.size(); ++i)
    CHECK(dec.singular_values[i] <= dec.singular_values[i - 1]);

  // reconstruction
  DenseMatrix sigma = DenseMatrix::Zero(10, 10);
  for (int i = 0; i < 10; ++i) sigma(i, i) = dec.singular_values[i];
  const DenseMatrix rebuilt = dec.left * sigma * dec.right.transpose();
  CHECK((s - rebuilt).norm() <= 1e-10 * dec.singular_values[0]);

  // best rank-3 approximation error equals the direct tail sum
  const int n = 3;
  const DenseMatrix approx = dec.left.leftCols(n) *
                             sigma.topLeftCorner(n, n) *
                             dec.right.leftCols(n).transpose();
  double tail = 0.0;
  for (std::size_t i = n; i < dec.singular_values.size(); ++i)
    tail += dec.singular_values[i] * dec.singular_values[i];
  CHECK((s - approx).squaredNorm() == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("svd reconstruction holds on larger random matrices") {
  Xoshiro256pp rng(23);
  for (const auto [rows, cols] : {std::pair<int, int>{120, 30}, {500, 100}, {60, 60}}) {
    const DenseMatrix s = random_dense(rows, cols, rng);
    const SvdResult dec = svd(s);
    DenseMatrix sigma = DenseMatrix::Zero(dec.left.cols(), dec.right.cols());
    for (std::size_t i = 0; i < dec.singular_values.size(); ++i)
      sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = dec.singular_values[i];
    CHECK((s - dec.left * sigma * dec.right.transpose()).norm() <=
          1e-10 * dec.singular_values[0]);
  }
}
