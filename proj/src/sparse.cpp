#include "cesc/sparse.hpp"

#include <algorithm>
#include <numeric>

namespace cesc {

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                         std::span<const Triplet> triplets) {
  // Counting sort by row, then sort each row by column and fold duplicates.
  std::vector<Index> counts(rows + 1, 0);
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("SparseMatrix: triplet out of range");
    ++counts[t.row + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  std::vector<std::pair<Index, double>> staged(triplets.size());
  std::vector<Index> fill(counts.begin(), counts.end() - 1);
  for (const auto& t : triplets) staged[fill[t.row]++] = {t.col, t.value};

  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (Index r = 0; r < rows; ++r) {
    auto first = staged.begin() + static_cast<std::ptrdiff_t>(counts[r]);
    auto last = staged.begin() + static_cast<std::ptrdiff_t>(counts[r + 1]);
    std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last;) {
      const Index c = it->first;
      double v = 0.0;
      for (; it != last && it->first == c; ++it) v += it->second;
      if (v != 0.0) {
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = m.col_idx_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                                    std::vector<Index> col_idx, std::vector<double> values) {
  if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 || row_ptr.back() != col_idx.size() ||
      col_idx.size() != values.size())
    throw std::invalid_argument("SparseMatrix::from_csr: inconsistent arrays");
  for (Index r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw std::invalid_argument("SparseMatrix::from_csr: row_ptr not monotone");
    for (Index p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      if (col_idx[p] >= cols || (p > row_ptr[r] && col_idx[p] <= col_idx[p - 1]) || values[p] == 0.0)
        throw std::invalid_argument("SparseMatrix::from_csr: unsorted, out of range or zero entry");
    }
  }
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

SparseMatrix SparseMatrix::diagonal(const Vector& diag) {
  const auto n = static_cast<Index>(diag.size());
  std::vector<Triplet> t;
  t.reserve(n);
  for (Index i = 0; i < n; ++i) t.push_back({i, i, diag[static_cast<Eigen::Index>(i)]});
  return from_triplets(n, n, t);
}

double SparseMatrix::coeff(Index r, Index c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseMatrix::coeff");
  const auto cols = row_indices(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<Index>(it - cols.begin())];
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
  if (static_cast<Index>(x.size()) != cols_) throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  y.resize(static_cast<Eigen::Index>(rows_));
  for (Index r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += values_[p] * x[static_cast<Eigen::Index>(col_idx_[p])];
    y[static_cast<Eigen::Index>(r)] = acc;
  }
}

Vector SparseMatrix::operator*(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

Vector SparseMatrix::row_sums() const {
  Vector s = Vector::Zero(static_cast<Eigen::Index>(rows_));
  for (Index r = 0; r < rows_; ++r)
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s[static_cast<Eigen::Index>(r)] += values_[p];
  return s;
}

Vector SparseMatrix::diagonal_values() const {
  const Index n = std::min(rows_, cols_);
  Vector d(static_cast<Eigen::Index>(n));
  for (Index i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = coeff(i, i);
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<Index> counts(cols_ + 1, 0);
  for (const Index c : col_idx_) ++counts[c + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  t.row_ptr_ = counts;
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<Index> fill(counts.begin(), counts.end() - 1);
  // Visiting rows in order keeps the transposed rows sorted.
  for (Index r = 0; r < rows_; ++r) {
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const Index dst = fill[col_idx_[p]]++;
      t.col_idx_[dst] = r;
      t.values_[dst] = values_[p];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::scaled(const Vector& left, const Vector& right) const {
  if (static_cast<Index>(left.size()) != rows_ || static_cast<Index>(right.size()) != cols_)
    throw std::invalid_argument("SparseMatrix::scaled: size mismatch");
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (Index r = 0; r < rows_; ++r)
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      t.push_back({r, col_idx_[p],
                   left[static_cast<Eigen::Index>(r)] * values_[p] * right[static_cast<Eigen::Index>(col_idx_[p])]});
  return from_triplets(rows_, cols_, t);
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (Index r = 0; r < rows_; ++r)
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[p])) = values_[p];
  return d;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  const SparseMatrix t = transpose();
  return t.row_ptr_ == row_ptr_ && t.col_idx_ == col_idx_ && t.values_ == values_;
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("SparseMatrix product: shape mismatch");
  // Row-by-row with a dense accumulator.
  std::vector<Index> row_ptr{0}, col_idx;
  std::vector<double> values;
  std::vector<double> acc(b.cols_, 0.0);
  std::vector<bool> touched(b.cols_, false);
  std::vector<Index> pattern;
  for (Index r = 0; r < a.rows_; ++r) {
    pattern.clear();
    for (Index p = a.row_ptr_[r]; p < a.row_ptr_[r + 1]; ++p) {
      const Index k = a.col_idx_[p];
      for (Index q = b.row_ptr_[k]; q < b.row_ptr_[k + 1]; ++q) {
        const Index c = b.col_idx_[q];
        if (!touched[c]) {
          touched[c] = true;
          pattern.push_back(c);
        }
        acc[c] += a.values_[p] * b.values_[q];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (const Index c : pattern) {
      if (acc[c] != 0.0) {
        col_idx.push_back(c);
        values.push_back(acc[c]);
      }
      acc[c] = 0.0;
      touched[c] = false;
    }
    row_ptr.push_back(col_idx.size());
  }
  return SparseMatrix::from_csr(a.rows_, b.cols_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("SparseMatrix difference: shape mismatch");
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (Index r = 0; r < a.rows_; ++r) {
    for (Index p = a.row_ptr_[r]; p < a.row_ptr_[r + 1]; ++p) t.push_back({r, a.col_idx_[p], a.values_[p]});
    for (Index p = b.row_ptr_[r]; p < b.row_ptr_[r + 1]; ++p) t.push_back({r, b.col_idx_[p], -b.values_[p]});
  }
  return SparseMatrix::from_triplets(a.rows_, a.cols_, t);
}

}  // namespace cesc
