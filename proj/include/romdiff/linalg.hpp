// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "romdiff/errors.hpp"

namespace romdiff {

using DenseMatrix = Eigen::MatrixXd;  // 64-bit floats, column-major
using Vector = Eigen::VectorXd;
using index_t = std::int32_t;

/// Sparse matrix in compressed sparse row layout. Column indices are strictly
/// increasing within each row; duplicate (row, col) entries are forbidden.
/// Immutable after construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(index_t rows, index_t cols, std::vector<index_t> row_offsets,
               std::vector<index_t> col_indices, std::vector<double> values);

  static SparseMatrix zero(index_t rows, index_t cols);

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t nnz() const { return static_cast<index_t>(values_.size()); }
  bool empty() const { return values_.empty(); }

  const std::vector<index_t>& row_offsets() const { return row_offsets_; }
  const std::vector<index_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// y += scale * A x. x must have cols() entries and y rows() entries.
  void apply_add(const double* x, double* y, double scale = 1.0) const;
  /// y += scale * A^T x. x must have rows() entries and y cols() entries.
  void apply_transpose_add(const double* x, double* y, double scale = 1.0) const;

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& x) const;

  SparseMatrix transposed() const;
  DenseMatrix to_dense() const;
  double max_abs() const;

 private:
  void validate() const;

  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<index_t> row_offsets_{0};
  std::vector<index_t> col_indices_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) contributions; duplicates are summed and
/// entries that cancel to exactly zero are dropped.
class SparseBuilder {
 public:
  SparseBuilder(index_t rows, index_t cols) : rows_(rows), cols_(cols) {}

  void add(index_t row, index_t col, double value) {
    entries_.push_back({row, col, value});
  }
  SparseMatrix build();

 private:
  struct Entry {
    index_t row;
    index_t col;
    double value;
  };
  index_t rows_;
  index_t cols_;
  std::vector<Entry> entries_;
};

/// Thin SVD S = U diag(sigma) Z^T with sigma sorted in decreasing order and
/// orthonormal columns in U and Z.
struct SvdResult {
  DenseMatrix left;                     // U
  std::vector<double> singular_values;  // non-negative, non-increasing
  DenseMatrix right;                    // Z
};

/// Thin SVD of a dense matrix. Deterministic for fixed input.
/// Throws ConvergenceError if the iterative kernel fails.
SvdResult svd(const DenseMatrix& s);

/// Modified Gram-Schmidt with one reorthogonalization pass. A candidate
/// column is dropped when its residual norm after projection onto the
/// previously accepted columns is <= drop_tol times its original norm.
/// Survivor order is preserved, so every column prefix of the result is
/// itself orthonormal. Throws EmptyBasisError when all columns are dropped.
DenseMatrix orthonormalize(const DenseMatrix& columns, double drop_tol = 1e-10);

/// Sparse LU factorization with partial pivoting. The factorization is
/// read-only after creation and reusable across many right-hand sides.
class LuFactors {
 public:
  explicit LuFactors(const SparseMatrix& m);
  ~LuFactors();
  LuFactors(LuFactors&&) noexcept;
  LuFactors& operator=(LuFactors&&) noexcept;
  LuFactors(const LuFactors&) = delete;
  LuFactors& operator=(const LuFactors&) = delete;

  Vector solve(const Vector& b) const;
  index_t size() const { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  index_t size_ = 0;
};

/// Factorizes a square, structurally nonsingular sparse matrix.
/// Throws SingularMatrixError when a pivot collapses.
LuFactors lu_factorize(const SparseMatrix& m);

}  // namespace romdiff
