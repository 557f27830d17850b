#include "cesc/multigrid.hpp"

#include <algorithm>
#include <cmath>

namespace cesc {
namespace {

constexpr Index kCoarsestSize = 200;
// Coarsening that keeps more than this fraction of the rows has stalled.
constexpr double kMinReduction = 0.8;
// Largest coarsest level that is factored densely; beyond it (stalled
// coarsening) the coarsest level is only smoothed.
constexpr Index kDenseLimit = 1500;
constexpr double kStrength = 0.08;
// Damping of the prolongator smoother, 4 / (3 rho) with rho(D^-1 A) <= 2
// for a Laplacian.
constexpr double kOmega = 2.0 / 3.0;
constexpr int kCoarsestSweeps = 10;

bool strong(const Vector& diag, Index i, Index j, double v) {
  return j != i && -v >= kStrength * std::sqrt(diag[static_cast<Eigen::Index>(i)] * diag[static_cast<Eigen::Index>(j)]);
}

// Greedy aggregation; returns the aggregate id of every row and the count.
std::pair<std::vector<Index>, Index> aggregate(const SparseMatrix& a) {
  const Index n = a.rows();
  const Vector diag = a.diagonal_values();
  constexpr Index none = static_cast<Index>(-1);
  std::vector<Index> agg(n, none);
  Index count = 0;

  // Seeds whose whole strong neighborhood is still free.
  for (Index i = 0; i < n; ++i) {
    if (agg[i] != none) continue;
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    bool free = true;
    for (Index p = 0; p < cols.size() && free; ++p)
      if (strong(diag, i, cols[p], vals[p]) && agg[cols[p]] != none) free = false;
    if (!free) continue;
    agg[i] = count;
    for (Index p = 0; p < cols.size(); ++p)
      if (strong(diag, i, cols[p], vals[p])) agg[cols[p]] = count;
    ++count;
  }

  // Leftovers join the aggregate of their strongest seeded neighbor.
  const std::vector<Index> seeded = agg;
  for (Index i = 0; i < n; ++i) {
    if (agg[i] != none) continue;
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    double best = 0.0;
    for (Index p = 0; p < cols.size(); ++p) {
      if (seeded[cols[p]] == none || !strong(diag, i, cols[p], vals[p])) continue;
      if (-vals[p] > best) {
        best = -vals[p];
        agg[i] = seeded[cols[p]];
      }
    }
  }

  // Whatever is left forms new aggregates with its free strong neighbors.
  for (Index i = 0; i < n; ++i) {
    if (agg[i] != none) continue;
    agg[i] = count;
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    for (Index p = 0; p < cols.size(); ++p)
      if (agg[cols[p]] == none && strong(diag, i, cols[p], vals[p])) agg[cols[p]] = count;
    ++count;
  }
  return {agg, count};
}

// (A + A^T) / 2, to remove round-off asymmetry of Galerkin products.
SparseMatrix symmetrized(const SparseMatrix& a) {
  const SparseMatrix at = a.transpose();
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(2 * a.nnz());
  for (Index r = 0; r < a.rows(); ++r) {
    const auto ca = a.row_indices(r);
    const auto va = a.row_values(r);
    for (Index p = 0; p < ca.size(); ++p) t.push_back({r, ca[p], 0.5 * va[p]});
    const auto cb = at.row_indices(r);
    const auto vb = at.row_values(r);
    for (Index p = 0; p < cb.size(); ++p) t.push_back({r, cb[p], 0.5 * vb[p]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

void gauss_seidel(const SparseMatrix& a, const Vector& inv_diag, const Vector& b, Vector& x, bool forward) {
  const Index n = a.rows();
  for (Index s = 0; s < n; ++s) {
    const Index i = forward ? s : n - 1 - s;
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    double acc = b[static_cast<Eigen::Index>(i)];
    for (Index p = 0; p < cols.size(); ++p)
      if (cols[p] != i) acc -= vals[p] * x[static_cast<Eigen::Index>(cols[p])];
    x[static_cast<Eigen::Index>(i)] = acc * inv_diag[static_cast<Eigen::Index>(i)];
  }
}

}  // namespace

AggregationHierarchy::AggregationHierarchy(const SparseMatrix& laplacian) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() == 0)
    throw Error("AggregationHierarchy: need a non-empty square matrix");
  ops_.push_back(laplacian);
  while (ops_.back().rows() > kCoarsestSize) {
    const SparseMatrix& a = ops_.back();
    const Index n = a.rows();
    const auto [agg, count] = aggregate(a);
    if (count <= 1 || static_cast<double>(count) > kMinReduction * static_cast<double>(n)) break;

    // P = (I - omega D^-1 A) P0 with P0 the aggregate indicator.
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(n);
    for (Index i = 0; i < n; ++i) t.push_back({i, agg[i], 1.0});
    const SparseMatrix p0 = SparseMatrix::from_triplets(n, count, t);
    const Vector inv_d = a.diagonal_values().cwiseInverse();
    std::vector<SparseMatrix::Triplet> st;
    st.reserve(a.nnz() + n);
    for (Index i = 0; i < n; ++i) {
      st.push_back({i, i, 1.0});
      const auto cols = a.row_indices(i);
      const auto vals = a.row_values(i);
      for (Index q = 0; q < cols.size(); ++q)
        st.push_back({i, cols[q], -kOmega * inv_d[static_cast<Eigen::Index>(i)] * vals[q]});
    }
    const SparseMatrix smoother = SparseMatrix::from_triplets(n, n, st);
    SparseMatrix p = smoother * p0;
    SparseMatrix r = p.transpose();
    SparseMatrix coarse = symmetrized(r * (a * p));
    prolong_.push_back(std::move(p));
    restrict_.push_back(std::move(r));
    ops_.push_back(std::move(coarse));
  }
  for (const auto& a : ops_) {
    const Vector d = a.diagonal_values();
    if ((d.array() <= 0.0).any()) throw Error("AggregationHierarchy: non-positive diagonal entry");
    inv_diag_.push_back(d.cwiseInverse());
  }

  // Pseudoinverse of the coarsest operator; eigenvalues below a relative
  // cut (the constants, plus any round-off modes) are dropped.
  const SparseMatrix& last = ops_.back();
  if (last.rows() <= kDenseLimit) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(last.to_dense());
    if (eig.info() != Eigen::Success) throw Error("AggregationHierarchy: coarse eigensolve failed");
    const Vector& lambda = eig.eigenvalues();
    const double cut = 1e-10 * lambda.cwiseAbs().maxCoeff();
    Vector inv = Vector::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      if (lambda[i] > cut) inv[i] = 1.0 / lambda[i];
    coarse_pinv_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    dense_coarse_ = true;
  }
}

std::vector<Index> AggregationHierarchy::level_sizes() const {
  std::vector<Index> sizes;
  for (const auto& a : ops_) sizes.push_back(a.rows());
  return sizes;
}

double AggregationHierarchy::operator_complexity() const {
  double total = 0.0;
  for (const auto& a : ops_) total += static_cast<double>(a.nnz());
  return total / static_cast<double>(ops_.front().nnz());
}

void AggregationHierarchy::cycle(Index level, const Vector& b, Vector& x) const {
  const SparseMatrix& a = ops_[level];
  x = Vector::Zero(b.size());
  if (level + 1 == ops_.size()) {
    if (dense_coarse_) {
      x = coarse_pinv_ * b;
    } else {
      for (int s = 0; s < kCoarsestSweeps; ++s) {
        gauss_seidel(a, inv_diag_[level], b, x, true);
        gauss_seidel(a, inv_diag_[level], b, x, false);
      }
    }
    x.array() -= x.mean();
    return;
  }
  gauss_seidel(a, inv_diag_[level], b, x, true);
  Vector residual = b - a * x;
  const Vector coarse_b = restrict_[level] * residual;
  Vector coarse_x;
  cycle(level + 1, coarse_b, coarse_x);
  x += prolong_[level] * coarse_x;
  gauss_seidel(a, inv_diag_[level], b, x, false);
}

void AggregationHierarchy::apply(const Vector& r, Vector& z) const {
  if (static_cast<Index>(r.size()) != ops_.front().rows()) throw Error("AggregationHierarchy::apply: size mismatch");
  cycle(0, r, z);
  z.array() -= z.mean();
}

}  // namespace cesc
