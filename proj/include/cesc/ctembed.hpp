#pragma once

#include "cesc/embedding.hpp"
#include "cesc/multigrid.hpp"
#include "cesc/simgraph.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace cesc {

/// Random k_RP x m matrix with entries +-1/sqrt(k_RP).
///
/// The sign of entry (r, c) is a pure function of (seed, r, c), so the
/// matrix can be generated in any order or in pieces.
class ProjectionMatrix {
 public:
  ProjectionMatrix(Index rows, Index cols, std::uint64_t seed);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double magnitude() const noexcept { return magnitude_; }

  /// +1 or -1.
  int sign(Index r, Index c) const noexcept { return signs_[r * cols_ + c]; }
  double operator()(Index r, Index c) const noexcept { return magnitude_ * sign(r, c); }

  /// Copy with the sign of every column c where flip[c] is true negated.
  ProjectionMatrix with_flipped_columns(const std::vector<bool>& flip) const;

  static int sign_of(std::uint64_t seed, Index r, Index c) noexcept;

 private:
  Index rows_;
  Index cols_;
  std::uint64_t seed_;
  double magnitude_;
  std::vector<std::int8_t> signs_;
};

ProjectionMatrix sample_projection(Index k_rp, Index m, std::uint64_t seed);

enum class Preconditioner {
  /// diag(L).
  jacobi,
  /// Smoothed-aggregation V-cycle; iteration counts stay nearly flat as the
  /// graph grows.
  multigrid,
};

Preconditioner parse_preconditioner(std::string_view s);
std::string_view to_string(Preconditioner p);

struct SolverOptions {
  /// Relative residual target ||Lz - y|| <= tol ||y||.
  double tol = 1e-6;
  /// 0 selects 10 sqrt(m) + 1000 with m = nnz(L) / 2 off-diagonal pairs.
  Index max_iter = 0;
  /// Largest accepted |1^T y| / (sqrt(n) ||y||) before the mean is deflated.
  double consistency_tol = 1e-8;
  Preconditioner preconditioner = Preconditioner::multigrid;
};

struct LaplacianSolution {
  Vector z;
  double residual = 0.0;  // ||Lz - y|| / ||y||, 0 for y = 0
  Index iterations = 0;
};

/// The solve did not reach the residual target.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
  double achieved_residual() const noexcept { return achieved_; }

 private:
  double achieved_;
};

Index default_max_iter(const SparseMatrix& laplacian);

/// Preconditioned conjugate gradient for a fixed connected-graph Laplacian.
/// Preconditioner setup happens once in the constructor; solve() is const
/// and may be called from several threads at once.
///
/// solve() returns the minimum-norm solution of L z = y: the nullspace is
/// handled by deflating the mean of y and of the returned z, so 1^T z = 0.
/// Throws SolverError when the target is missed within max_iter, and
/// cesc::Error when y has a component along 1 larger than
/// `consistency_tol` allows.
class LaplacianSolver {
 public:
  LaplacianSolver(const SparseMatrix& laplacian, const SolverOptions& opts = {});

  LaplacianSolution solve(const Vector& y) const;

  const SolverOptions& options() const noexcept { return opts_; }
  /// Null for the Jacobi preconditioner.
  const AggregationHierarchy* hierarchy() const noexcept { return hierarchy_.get(); }

 private:
  void precondition(const Vector& r, Vector& s) const;

  const SparseMatrix& lap_;
  SolverOptions opts_;
  Index max_iter_;
  Vector inv_diag_;
  std::unique_ptr<AggregationHierarchy> hierarchy_;
};

/// One-shot LaplacianSolver(laplacian, opts).solve(y).
LaplacianSolution laplacian_solve(const SparseMatrix& laplacian, const Vector& y, const SolverOptions& opts = {});

struct SolverReport {
  std::vector<double> residuals;
  std::vector<Index> iterations;
  double tolerance = 0.0;

  double max_residual() const;
  Index total_iterations() const;
};

struct EmbeddingOptions {
  Index k_rp = 50;
  std::uint64_t seed = 0;
  SolverOptions solver{};
  unsigned threads = 0;
};

/// Y = sqrt(V_G) Q W^{1/2} B, one row per projection row (k_RP x n).
DenseMatrix project_incidence(double volume, const IncidenceFactor& factor, const ProjectionMatrix& q);

struct EmbeddingResult {
  Embedding embedding;
  SolverReport report;
};

/// Approximate commute-time embedding: solves z_r L = y_r for every row of
/// Y and returns the n x k_RP matrix Z^T. Throws DisconnectedGraphError on a
/// disconnected graph and SolverError when a solve fails.
EmbeddingResult build_embedding(const SimilarityGraph& g, const EmbeddingOptions& opts = {});

/// Same with an explicit factor and projection (orientation experiments).
EmbeddingResult build_embedding(const SimilarityGraph& g, const IncidenceFactor& factor, const ProjectionMatrix& q,
                                const EmbeddingOptions& opts);

}  // namespace cesc
