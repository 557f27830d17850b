#pragma once

#include "cesc/common.hpp"

#include <span>
#include <vector>

namespace cesc {

/// Compressed sparse row matrix.
///
/// Column indices are sorted within each row and no explicit zeros are
/// stored. Instances are immutable once built; all graph algebra (A, L, the
/// normalized Laplacians, B and W) is expressed with this type.
class SparseMatrix {
 public:
  struct Triplet {
    Index row;
    Index col;
    double value;
  };

  SparseMatrix() = default;

  /// Empty (all-zero) matrix of the given shape.
  SparseMatrix(Index rows, Index cols);

  /// Builds from unordered triplets. Duplicates are summed; entries that
  /// end up exactly zero are dropped.
  static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);

  /// Builds directly from CSR arrays. Rows must be sorted, strictly
  /// increasing in column and free of zeros; this is checked.
  static SparseMatrix from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                               std::vector<Index> col_idx, std::vector<double> values);

  static SparseMatrix diagonal(const Vector& diag);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return values_.size(); }

  std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const Index> row_indices(Index r) const noexcept {
    return std::span(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
  }
  std::span<const double> row_values(Index r) const noexcept {
    return std::span(values_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
  }

  /// Entry (r, c), zero when not stored. O(log row length).
  double coeff(Index r, Index c) const;

  /// y = this * x.
  void multiply(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const;

  /// Row sums.
  Vector row_sums() const;
  Vector diagonal_values() const;

  SparseMatrix transpose() const;

  /// diag(left) * this * diag(right).
  SparseMatrix scaled(const Vector& left, const Vector& right) const;

  Eigen::MatrixXd to_dense() const;

  /// Exact structural and numeric symmetry.
  bool is_symmetric() const;

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

}  // namespace cesc
