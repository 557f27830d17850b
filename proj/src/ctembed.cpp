#include "cesc/ctembed.hpp"

#include "cesc/parallel.hpp"
#include "cesc/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cesc {

int ProjectionMatrix::sign_of(std::uint64_t seed, Index r, Index c) noexcept {
  const std::uint64_t h = mix64(derive_seed(seed, r) ^ mix64(static_cast<std::uint64_t>(c)));
  return (h >> 63) ? 1 : -1;
}

ProjectionMatrix::ProjectionMatrix(Index rows, Index cols, std::uint64_t seed)
    : rows_(rows), cols_(cols), seed_(seed), magnitude_(rows ? 1.0 / std::sqrt(static_cast<double>(rows)) : 0.0) {
  if (rows == 0 || cols == 0) throw Error("projection matrix needs k_RP >= 1 and m >= 1");
  signs_.resize(rows * cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) signs_[r * cols + c] = static_cast<std::int8_t>(sign_of(seed, r, c));
}

ProjectionMatrix ProjectionMatrix::with_flipped_columns(const std::vector<bool>& flip) const {
  if (flip.size() != cols_) throw std::invalid_argument("with_flipped_columns: mask size mismatch");
  ProjectionMatrix out = *this;
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c)
      if (flip[c]) out.signs_[r * cols_ + c] = static_cast<std::int8_t>(-out.signs_[r * cols_ + c]);
  return out;
}

ProjectionMatrix sample_projection(Index k_rp, Index m, std::uint64_t seed) { return ProjectionMatrix(k_rp, m, seed); }

Index default_max_iter(const SparseMatrix& laplacian) {
  const Index off_diagonal = laplacian.nnz() > laplacian.rows() ? (laplacian.nnz() - laplacian.rows()) / 2 : 0;
  return static_cast<Index>(10.0 * std::sqrt(static_cast<double>(off_diagonal))) + 1000;
}

Preconditioner parse_preconditioner(std::string_view s) {
  if (s == "jacobi") return Preconditioner::jacobi;
  if (s == "multigrid") return Preconditioner::multigrid;
  throw Error("unknown preconditioner '" + std::string(s) + "'");
}

std::string_view to_string(Preconditioner p) {
  return p == Preconditioner::jacobi ? "jacobi" : "multigrid";
}

LaplacianSolver::LaplacianSolver(const SparseMatrix& lap, const SolverOptions& opts)
    : lap_(lap), opts_(opts), max_iter_(opts.max_iter ? opts.max_iter : default_max_iter(lap)) {
  if (lap.cols() != lap.rows()) throw Error("laplacian_solve: matrix is not square");
  if (!(opts.tol > 0.0)) throw Error("laplacian_solve: tol must be > 0");
  const Vector diag = lap.diagonal_values();
  if ((diag.array() <= 0.0).any()) throw Error("laplacian_solve: Laplacian has a non-positive diagonal entry");
  inv_diag_ = diag.cwiseInverse();
  if (opts.preconditioner == Preconditioner::multigrid) hierarchy_ = std::make_unique<AggregationHierarchy>(lap);
}

void LaplacianSolver::precondition(const Vector& r, Vector& s) const {
  if (hierarchy_)
    hierarchy_->apply(r, s);
  else
    s = inv_diag_.cwiseProduct(r);
}

LaplacianSolution LaplacianSolver::solve(const Vector& y) const {
  const Index n = lap_.rows();
  if (static_cast<Index>(y.size()) != n) throw Error("laplacian_solve: dimension mismatch");

  LaplacianSolution out;
  out.z = Vector::Zero(static_cast<Eigen::Index>(n));
  const double y_norm = y.norm();
  if (y_norm == 0.0) return out;
  if (!std::isfinite(y_norm)) throw Error("laplacian_solve: right-hand side is not finite");

  const double mean = y.sum() / static_cast<double>(n);
  if (std::abs(mean) * std::sqrt(static_cast<double>(n)) > opts_.consistency_tol * y_norm)
    throw Error("laplacian_solve: right-hand side is not orthogonal to the all-ones vector");
  const Vector b = y.array() - mean;
  const double b_norm = b.norm();
  if (b_norm == 0.0) return out;

  const double target = opts_.tol * b_norm;

  Vector& z = out.z;
  Vector r = b;
  Vector s;
  precondition(r, s);
  Vector p = s;
  Vector lp(static_cast<Eigen::Index>(n));
  double rs = r.dot(s);

  Index it = 0;
  for (; it < max_iter_; ++it) {
    lap_.multiply(p, lp);
    const double curvature = p.dot(lp);
    if (!(curvature > 0.0)) break;
    const double alpha = rs / curvature;
    z += alpha * p;
    r -= alpha * lp;
    if (r.norm() <= target) {
      // Guard against drift of the recursive residual before accepting.
      r = b - lap_ * z;
      if (r.norm() <= target) {
        ++it;
        break;
      }
      precondition(r, s);
      p = s;
      rs = r.dot(s);
      continue;
    }
    precondition(r, s);
    const double rs_next = r.dot(s);
    p = s + (rs_next / rs) * p;
    rs = rs_next;
  }

  z.array() -= z.mean();
  out.iterations = it;
  out.residual = (b - lap_ * z).norm() / b_norm;
  if (!(out.residual <= opts_.tol))
    throw SolverError("laplacian_solve: no convergence after " + std::to_string(it) +
                          " iterations (relative residual " + std::to_string(out.residual) + ")",
                      out.residual);
  return out;
}

LaplacianSolution laplacian_solve(const SparseMatrix& lap, const Vector& y, const SolverOptions& opts) {
  if (static_cast<Index>(y.size()) != lap.rows()) throw Error("laplacian_solve: dimension mismatch");
  return LaplacianSolver(lap, opts).solve(y);
}

double SolverReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

Index SolverReport::total_iterations() const { return std::accumulate(iterations.begin(), iterations.end(), Index{0}); }

DenseMatrix project_incidence(double volume, const IncidenceFactor& factor, const ProjectionMatrix& q) {
  const SparseMatrix& b = factor.incidence;
  if (q.cols() != b.rows()) throw Error("project_incidence: projection width differs from edge count");
  const double scale = std::sqrt(volume);
  DenseMatrix y = DenseMatrix::Zero(static_cast<Eigen::Index>(q.rows()), static_cast<Eigen::Index>(b.cols()));
  for (Index r = 0; r < q.rows(); ++r) {
    auto row = y.row(static_cast<Eigen::Index>(r));
    for (Index e = 0; e < b.rows(); ++e) {
      const double coef = scale * q(r, e) * std::sqrt(factor.weights[static_cast<Eigen::Index>(e)]);
      const auto cols = b.row_indices(e);
      const auto vals = b.row_values(e);
      for (Index p = 0; p < cols.size(); ++p) row[static_cast<Eigen::Index>(cols[p])] += coef * vals[p];
    }
  }
  return y;
}

EmbeddingResult build_embedding(const SimilarityGraph& g, const IncidenceFactor& factor, const ProjectionMatrix& q,
                                const EmbeddingOptions& opts) {
  if (opts.k_rp == 0) throw Error("build_embedding: k_RP must be >= 1");
  if (g.node_count() < 2 || !is_connected(g)) throw DisconnectedGraphError("build_embedding: graph is not connected");

  const SparseMatrix lap = laplacian(g);
  const DenseMatrix y = project_incidence(g.volume(), factor, q);
  const Index k = q.rows();

  const LaplacianSolver solver(lap, opts.solver);

  EmbeddingResult out;
  out.embedding.kind = Embedding::Kind::approximate;
  out.embedding.source_volume = g.volume();
  out.embedding.coords.resize(static_cast<Eigen::Index>(g.node_count()), static_cast<Eigen::Index>(k));
  out.report.tolerance = opts.solver.tol;
  out.report.residuals.assign(k, 0.0);
  out.report.iterations.assign(k, 0);

  parallel_for(k, opts.threads, [&](std::size_t r) {
    const Vector rhs = y.row(static_cast<Eigen::Index>(r)).transpose();
    // Every row of B sums to zero, so each right-hand side is consistent.
    if (std::abs(rhs.sum()) > 1e-10 * rhs.norm())
      throw Error("build_embedding: projected right-hand side is not orthogonal to the all-ones vector");
    LaplacianSolution sol = solver.solve(rhs);
    out.embedding.coords.col(static_cast<Eigen::Index>(r)) = sol.z;
    out.report.residuals[r] = sol.residual;
    out.report.iterations[r] = sol.iterations;
  });
  return out;
}

EmbeddingResult build_embedding(const SimilarityGraph& g, const EmbeddingOptions& opts) {
  if (opts.k_rp == 0) throw Error("build_embedding: k_RP must be >= 1");
  if (g.node_count() < 2 || !is_connected(g)) throw DisconnectedGraphError("build_embedding: graph is not connected");
  const IncidenceFactor factor = incidence_factorization(g);
  const ProjectionMatrix q = sample_projection(opts.k_rp, factor.edge_count(), opts.seed);
  return build_embedding(g, factor, q, opts);
}

}  // namespace cesc
