#pragma once

#include "cesc/sparse.hpp"

#include <Eigen/Eigenvalues>

#include <vector>

namespace cesc {

/// Smoothed-aggregation multigrid hierarchy for a connected-graph Laplacian,
/// used as a CG preconditioner.
///
/// Aggregates are grown greedily from strong connections, the piecewise
/// constant prolongator is smoothed with one damped Jacobi step, and coarse
/// operators are Galerkin products P^T A P (again Laplacians, so constants
/// stay in the nullspace on every level). The coarsest level is applied
/// through a dense pseudoinverse.
///
/// apply() is a symmetric V(1,1) cycle with Gauss-Seidel smoothing (forward
/// before, backward after), so the preconditioner is symmetric. Setup is
/// deterministic and apply() is const and safe to call concurrently.
class AggregationHierarchy {
 public:
  explicit AggregationHierarchy(const SparseMatrix& laplacian);

  /// z ~= A^+ r for r with zero mean; z is returned with zero mean.
  void apply(const Vector& r, Vector& z) const;

  Index levels() const noexcept { return ops_.size(); }
  /// Row count per level, finest first.
  std::vector<Index> level_sizes() const;
  /// Sum of nnz over all levels divided by nnz of the finest operator.
  double operator_complexity() const;

 private:
  void cycle(Index level, const Vector& b, Vector& x) const;

  std::vector<SparseMatrix> ops_;          // A on every level; ops_[0] is the input
  std::vector<SparseMatrix> prolong_;      // prolong_[l]: level l+1 -> level l
  std::vector<SparseMatrix> restrict_;     // transposes of prolong_
  std::vector<Vector> inv_diag_;
  Eigen::MatrixXd coarse_pinv_;
  bool dense_coarse_ = false;
};

}  // namespace cesc
