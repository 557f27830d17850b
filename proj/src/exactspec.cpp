#include "cesc/exactspec.hpp"

#include "cesc/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cesc {
namespace {

void require_connected(const SimilarityGraph& g, const char* where) {
  if (g.node_count() == 0 || !is_connected(g)) throw DisconnectedGraphError(std::string(where) + ": graph is not connected");
}

void require_dense_size(Index n, const char* where) {
  if (n > kDenseOracleLimit)
    throw Error(std::string(where) + ": n = " + std::to_string(n) + " exceeds the dense limit of " +
                std::to_string(kDenseOracleLimit));
}

double gershgorin_bound(const SparseMatrix& m) {
  double bound = 0.0;
  for (Index r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (const double v : m.row_values(r)) s += std::abs(v);
    bound = std::max(bound, s);
  }
  return bound;
}

EigenPair dense_smallest(const SparseMatrix& m, Index count) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.to_dense());
  if (solver.info() != Eigen::Success) throw EigenSolverError("dense eigensolver did not converge");
  EigenPair out;
  out.values = solver.eigenvalues().head(static_cast<Eigen::Index>(count));
  out.vectors = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace

EigenPair symmetric_eigen_full(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw Error("symmetric_eigen_full: matrix must be square");
  require_dense_size(m.rows(), "symmetric_eigen_full");
  return dense_smallest(m, m.rows());
}

EigenPair lanczos_smallest(const SparseMatrix& m, Index count, double tol, std::uint64_t seed) {
  const Index n = m.rows();
  if (m.cols() != n) throw Error("lanczos: matrix must be square");
  if (count == 0 || count > n) throw Error("lanczos: need 1 <= count <= n");

  // Lanczos finds the top of the spectrum fastest, so run it on shift*I - M.
  const double shift = gershgorin_bound(m);
  const double threshold = tol * std::max(shift, 1e-300);
  const Index max_dim = std::min<Index>(n, std::max<Index>(40 * count + 200, 600));
  const auto ne = static_cast<Eigen::Index>(n);

  Eigen::MatrixXd basis(ne, static_cast<Eigen::Index>(max_dim));
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples basis j and j+1
  Rng rng(seed);

  auto random_unit_orthogonal = [&](Eigen::Index cols) {
    Vector v(ne);
    for (Eigen::Index i = 0; i < ne; ++i) v[i] = rng.normal();
    for (int pass = 0; pass < 2; ++pass)
      if (cols > 0) v -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * v);
    return Vector(v / v.norm());
  };

  basis.col(0) = random_unit_orthogonal(0);
  Vector w(ne);
  for (Index j = 0; j < max_dim; ++j) {
    const auto je = static_cast<Eigen::Index>(j);
    m.multiply(basis.col(je), w);
    w = shift * basis.col(je) - w;
    alpha.push_back(basis.col(je).dot(w));
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(je + 1) * (basis.leftCols(je + 1).transpose() * w);
    const double b = w.norm();

    const Index dim = j + 1;
    const bool check = dim >= count && (dim % 10 == 0 || dim == max_dim || b <= threshold);
    if (check) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      for (Index i = 0; i < dim; ++i) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
        if (i + 1 < dim) {
          t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
          t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
      if (ritz.info() != Eigen::Success) throw EigenSolverError("lanczos: tridiagonal eigensolver failed");
      // Largest Ritz values of the flipped operator are the smallest of M.
      bool converged = true;
      for (Index i = 0; i < count; ++i) {
        const auto col = static_cast<Eigen::Index>(dim - 1 - i);
        if (std::abs(b * ritz.eigenvectors()(static_cast<Eigen::Index>(dim - 1), col)) > threshold) converged = false;
      }
      if (converged || dim == n) {
        EigenPair out;
        out.values.resize(static_cast<Eigen::Index>(count));
        out.vectors.resize(ne, static_cast<Eigen::Index>(count));
        for (Index i = 0; i < count; ++i) {
          const auto col = static_cast<Eigen::Index>(dim - 1 - i);
          out.values[static_cast<Eigen::Index>(i)] = shift - ritz.eigenvalues()[col];
          Vector v = basis.leftCols(static_cast<Eigen::Index>(dim)) * ritz.eigenvectors().col(col);
          out.vectors.col(static_cast<Eigen::Index>(i)) = v / v.norm();
        }
        return out;
      }
    }
    if (j + 1 == max_dim) break;
    if (b <= threshold) {
      // Invariant subspace found; continue from a fresh direction.
      beta.push_back(0.0);
      basis.col(je + 1) = random_unit_orthogonal(je + 1);
    } else {
      beta.push_back(b);
      basis.col(je + 1) = w / b;
    }
  }
  throw EigenSolverError("lanczos: no convergence within " + std::to_string(max_dim) + " basis vectors");
}

EigenPair smallest_eigenpairs(const SparseMatrix& m, Index count, double tol, std::uint64_t seed) {
  if (m.rows() != m.cols()) throw Error("smallest_eigenpairs: matrix must be square");
  if (count == 0 || count > m.rows()) throw Error("smallest_eigenpairs: need 1 <= count <= n");
  if (m.rows() <= kDenseEigenLimit) return dense_smallest(m, count);
  return lanczos_smallest(m, count, tol, seed);
}

SpectralVariant parse_spectral_variant(std::string_view name) {
  if (name == "unnorm") return SpectralVariant::unnorm;
  if (name == "shi_malik") return SpectralVariant::shi_malik;
  if (name == "njw") return SpectralVariant::njw;
  throw Error("unknown spectral variant '" + std::string(name) + "'");
}

std::string_view to_string(SpectralVariant v) {
  switch (v) {
    case SpectralVariant::unnorm: return "unnorm";
    case SpectralVariant::shi_malik: return "shi_malik";
    case SpectralVariant::njw: return "njw";
  }
  return "?";
}

DenseMatrix spectral_coordinates(const SimilarityGraph& g, Index k, SpectralVariant variant) {
  require_connected(g, "spectral_cluster_exact");
  const Index n = g.node_count();
  if (k == 0 || k > n) throw Error("spectral_cluster_exact: need 1 <= k <= n");

  DenseMatrix u;
  switch (variant) {
    case SpectralVariant::unnorm:
      u = smallest_eigenpairs(laplacian(g), k).vectors;
      break;
    case SpectralVariant::shi_malik: {
      // D^{-1}L v = lambda v  <=>  L_sym (D^{1/2} v) = lambda (D^{1/2} v).
      u = smallest_eigenpairs(normalized_laplacian(g, NormalizedKind::sym), k).vectors;
      const Vector inv_root = g.degrees().cwiseSqrt().cwiseInverse();
      for (Eigen::Index c = 0; c < u.cols(); ++c) {
        u.col(c) = u.col(c).cwiseProduct(inv_root);
        u.col(c).normalize();
      }
      break;
    }
    case SpectralVariant::njw: {
      u = smallest_eigenpairs(normalized_laplacian(g, NormalizedKind::sym), k).vectors;
      for (Eigen::Index r = 0; r < u.rows(); ++r) {
        const double norm = u.row(r).norm();
        if (norm > 0.0) u.row(r) /= norm;
      }
      break;
    }
  }
  return u;
}

ClusterAssignment spectral_cluster_exact(const SimilarityGraph& g, Index k, SpectralVariant variant,
                                         const KMeansConfig& kmeans_cfg) {
  KMeansConfig cfg = kmeans_cfg;
  cfg.k = k;
  return kmeans_cluster(spectral_coordinates(g, k, variant), cfg);
}

Embedding exact_commute_embedding(const SimilarityGraph& g) {
  require_connected(g, "exact_commute_embedding");
  require_dense_size(g.node_count(), "exact_commute_embedding");
  const EigenPair eig = symmetric_eigen_full(laplacian(g));
  const double cut = 1e-10 * std::max(eig.values.maxCoeff(), 0.0);

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] > cut) kept.push_back(i);

  Embedding e;
  e.kind = Embedding::Kind::exact;
  e.source_volume = g.volume();
  e.coords.resize(eig.vectors.rows(), static_cast<Eigen::Index>(kept.size()));
  const double scale = std::sqrt(g.volume());
  for (std::size_t c = 0; c < kept.size(); ++c)
    e.coords.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(kept[c]) * (scale / std::sqrt(eig.values[kept[c]]));
  return e;
}

CommuteOracle::CommuteOracle(const SimilarityGraph& g) : volume_(g.volume()) {
  require_connected(g, "commute_pinv");
  require_dense_size(g.node_count(), "commute_pinv");
  // For a connected graph L + J/n is positive definite and
  // L+ = (L + J/n)^{-1} - J/n.
  const auto n = static_cast<Eigen::Index>(g.node_count());
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd shifted = laplacian(g).to_dense();
  shifted.array() += inv_n;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) throw Error("commute_pinv: shifted Laplacian is not positive definite");
  pinv_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  pinv_.array() -= inv_n;
  pinv_ = 0.5 * (pinv_ + pinv_.transpose()).eval();
}

double CommuteOracle::commute(Index i, Index j) const {
  if (i >= size() || j >= size()) throw std::out_of_range("commute_pinv: node index out of range");
  if (i == j) return 0.0;
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  return std::max(0.0, volume_ * (pinv_(a, a) + pinv_(b, b) - 2.0 * pinv_(a, b)));
}

double commute_pinv(const SimilarityGraph& g, Index i, Index j) { return CommuteOracle(g).commute(i, j); }

Vector hitting_times(const SimilarityGraph& g, Index target) {
  const Index n = g.node_count();
  if (target >= n) throw std::out_of_range("hitting_times: target out of range");
  require_connected(g, "hitting_times");
  require_dense_size(n, "hitting_times");

  Vector h = Vector::Zero(static_cast<Eigen::Index>(n));
  if (n == 1) return h;
  // Grounded system: d_i h_i - sum_l w_il h_l = d_i for i != target, h_target = 0.
  const auto m = static_cast<Eigen::Index>(n - 1);
  auto reduced = [target](Index v) { return static_cast<Eigen::Index>(v < target ? v : v - 1); };
  Eigen::MatrixXd grounded = Eigen::MatrixXd::Zero(m, m);
  Vector rhs(m);
  const auto& a = g.adjacency();
  for (Index i = 0; i < n; ++i) {
    if (i == target) continue;
    const auto r = reduced(i);
    grounded(r, r) = g.degrees()[static_cast<Eigen::Index>(i)];
    rhs[r] = g.degrees()[static_cast<Eigen::Index>(i)];
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    for (Index p = 0; p < cols.size(); ++p)
      if (cols[p] != target) grounded(r, reduced(cols[p])) -= vals[p];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(grounded);
  if (llt.info() != Eigen::Success) throw Error("hitting_times: grounded Laplacian is not positive definite");
  const Vector sol = llt.solve(rhs);
  for (Index i = 0; i < n; ++i)
    if (i != target) h[static_cast<Eigen::Index>(i)] = sol[reduced(i)];
  return h;
}

}  // namespace cesc
