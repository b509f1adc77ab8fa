// SPDX-License-Identifier: Apache-2.0
#include "romdiff/linalg.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

namespace romdiff {

SparseMatrix::SparseMatrix(index_t rows, index_t cols,
                           std::vector<index_t> row_offsets,
                           std::vector<index_t> col_indices,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  validate();
}

SparseMatrix SparseMatrix::zero(index_t rows, index_t cols) {
  return SparseMatrix(rows, cols, std::vector<index_t>(rows + 1, 0), {}, {});
}

void SparseMatrix::validate() const {
  if (rows_ < 0 || cols_ < 0) throw DimensionError("sparse matrix: negative extent");
  if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1)
    throw DimensionError("sparse matrix: row offset array must have rows+1 entries");
  if (row_offsets_.front() != 0)
    throw DimensionError("sparse matrix: first row offset must be 0");
  if (col_indices_.size() != values_.size())
    throw DimensionError("sparse matrix: column index / value length mismatch");
  if (row_offsets_.back() != static_cast<index_t>(values_.size()))
    throw DimensionError("sparse matrix: final row offset must equal nnz");
  for (index_t r = 0; r < rows_; ++r) {
    if (row_offsets_[r] > row_offsets_[r + 1])
      throw DimensionError("sparse matrix: row offsets must be non-decreasing");
    for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= cols_)
        throw DimensionError("sparse matrix: column index out of range");
      if (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1])
        throw DimensionError(
            "sparse matrix: column indices must be strictly increasing within a row");
    }
  }
}

void SparseMatrix::apply_add(const double* x, double* y, double scale) const {
  for (index_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      acc += values_[k] * x[col_indices_[k]];
    y[r] += scale * acc;
  }
}

void SparseMatrix::apply_transpose_add(const double* x, double* y, double scale) const {
  for (index_t r = 0; r < rows_; ++r) {
    const double xr = scale * x[r];
    if (xr == 0.0) continue;
    for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      y[col_indices_[k]] += values_[k] * xr;
  }
}

Vector SparseMatrix::apply(const Vector& x) const {
  if (x.size() != cols_) throw DimensionError("sparse apply: size mismatch");
  Vector y = Vector::Zero(rows_);
  apply_add(x.data(), y.data());
  return y;
}

Vector SparseMatrix::apply_transpose(const Vector& x) const {
  if (x.size() != rows_) throw DimensionError("sparse transpose apply: size mismatch");
  Vector y = Vector::Zero(cols_);
  apply_transpose_add(x.data(), y.data());
  return y;
}

SparseMatrix SparseMatrix::transposed() const {
  // Counting sort by column; scanning rows in order keeps the transposed
  // rows sorted.
  std::vector<index_t> offsets(cols_ + 1, 0);
  for (index_t c : col_indices_) ++offsets[c + 1];
  for (index_t c = 0; c < cols_; ++c) offsets[c + 1] += offsets[c];
  std::vector<index_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<index_t> cols(values_.size());
  std::vector<double> vals(values_.size());
  for (index_t r = 0; r < rows_; ++r) {
    for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const index_t pos = cursor[col_indices_[k]]++;
      cols[pos] = r;
      vals[pos] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
  for (index_t r = 0; r < rows_; ++r)
    for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      d(r, col_indices_[k]) = values_[k];
  return d;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix SparseBuilder::build() {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<index_t> offsets(rows_ + 1, 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  cols.reserve(entries_.size());
  vals.reserve(entries_.size());
  std::size_t i = 0;
  for (index_t r = 0; r < rows_; ++r) {
    while (i < entries_.size() && entries_[i].row == r) {
      const index_t c = entries_[i].col;
      double acc = 0.0;
      while (i < entries_.size() && entries_[i].row == r && entries_[i].col == c)
        acc += entries_[i++].value;
      if (acc != 0.0) {
        cols.push_back(c);
        vals.push_back(acc);
      }
    }
    offsets[r + 1] = static_cast<index_t>(vals.size());
  }
  if (i != entries_.size())
    throw DimensionError("sparse builder: entry row index out of range");
  return SparseMatrix(rows_, cols_, std::move(offsets), std::move(cols), std::move(vals));
}

SvdResult svd(const DenseMatrix& s) {
  if (s.rows() == 0 || s.cols() == 0)
    throw DimensionError("svd: matrix must have nonzero dimensions");
  Eigen::BDCSVD<DenseMatrix> dec(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw ConvergenceError("svd: iterative kernel exceeded its iteration cap");
  SvdResult out;
  out.left = dec.matrixU();
  out.right = dec.matrixV();
  const auto& sv = dec.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

DenseMatrix orthonormalize(const DenseMatrix& columns, double drop_tol) {
  if (drop_tol <= 0.0) throw InvalidBoundsError("orthonormalize: drop_tol must be > 0");
  std::vector<Vector> accepted;
  accepted.reserve(columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Vector v = columns.col(j);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    // one reorthogonalization pass on top of plain MGS
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : accepted) v -= q.dot(v) * q;
    const double norm1 = v.norm();
    if (norm1 <= drop_tol * norm0) continue;
    accepted.push_back(v / norm1);
  }
  if (accepted.empty())
    throw EmptyBasisError("orthonormalize: all candidate columns were dropped");
  DenseMatrix q(columns.rows(), static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t j = 0; j < accepted.size(); ++j) q.col(static_cast<Eigen::Index>(j)) = accepted[j];
  return q;
}

struct LuFactors::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

namespace {

long parse_pivot_index(const std::string& message) {
  // Eigen reports the failing column in its diagnostic text; fall back to -1.
  for (std::size_t i = 0; i < message.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(message[i]))) {
      return std::stol(message.substr(i));
    }
  }
  return -1;
}

}  // namespace

LuFactors::LuFactors(const SparseMatrix& m) : impl_(std::make_unique<Impl>()), size_(m.rows()) {
  if (m.rows() != m.cols()) throw DimensionError("lu_factorize: matrix must be square");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.nnz());
  const auto& offs = m.row_offsets();
  const auto& cols = m.col_indices();
  const auto& vals = m.values();
  for (index_t r = 0; r < m.rows(); ++r)
    for (index_t k = offs[r]; k < offs[r + 1]; ++k)
      trips.emplace_back(r, cols[k], vals[k]);
  Eigen::SparseMatrix<double> a(m.rows(), m.cols());
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  impl_->lu.isSymmetric(false);
  impl_->lu.analyzePattern(a);
  impl_->lu.factorize(a);
  if (impl_->lu.info() != Eigen::Success) {
    const std::string msg = impl_->lu.lastErrorMessage();
    throw SingularMatrixError("lu_factorize: " + (msg.empty() ? "factorization failed" : msg),
                              parse_pivot_index(msg));
  }
}

LuFactors::~LuFactors() = default;
LuFactors::LuFactors(LuFactors&&) noexcept = default;
LuFactors& LuFactors::operator=(LuFactors&&) noexcept = default;

Vector LuFactors::solve(const Vector& b) const {
  if (b.size() != size_) throw DimensionError("lu solve: right-hand side size mismatch");
  return impl_->lu.solve(b);
}

LuFactors lu_factorize(const SparseMatrix& m) { return LuFactors(m); }

}  // namespace romdiff
