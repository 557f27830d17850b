#pragma once

#include "cesc/embedding.hpp"
#include "cesc/kmeans.hpp"
#include "cesc/simgraph.hpp"

#include <string_view>

namespace cesc {

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
struct EigenPair {
  Vector values;
  Eigen::MatrixXd vectors;  // n x count
};

/// Dense eigendecomposition is used up to this size, Lanczos above.
inline constexpr Index kDenseEigenLimit = 2000;
/// Hard limit for routines that need the full spectrum or a dense inverse.
inline constexpr Index kDenseOracleLimit = 5000;

class EigenSolverError : public Error {
 public:
  using Error::Error;
};

/// Full spectrum of a symmetric matrix (dense; n <= kDenseOracleLimit).
EigenPair symmetric_eigen_full(const SparseMatrix& m);

/// The `count` smallest eigenpairs of a symmetric positive semidefinite
/// matrix. Dense for n <= kDenseEigenLimit; otherwise Lanczos with full
/// reorthogonalization on the spectrally flipped operator, converged to a
/// residual of `tol` times the Gershgorin bound.
EigenPair smallest_eigenpairs(const SparseMatrix& m, Index count, double tol = 1e-8, std::uint64_t seed = 0);

/// Lanczos path only (exposed for testing against the dense path).
EigenPair lanczos_smallest(const SparseMatrix& m, Index count, double tol = 1e-8, std::uint64_t seed = 0);

enum class SpectralVariant { unnorm, shi_malik, njw };

SpectralVariant parse_spectral_variant(std::string_view name);
std::string_view to_string(SpectralVariant v);

/// Rows of the k-eigenvector matrix used by the chosen variant: L (unnorm),
/// D^{-1} L (shi_malik), or D^{-1/2} L D^{-1/2} with unit-norm rows (njw).
DenseMatrix spectral_coordinates(const SimilarityGraph& g, Index k, SpectralVariant variant);

/// Exact spectral clustering: k-means on spectral_coordinates.
ClusterAssignment spectral_cluster_exact(const SimilarityGraph& g, Index k, SpectralVariant variant,
                                         const KMeansConfig& kmeans_cfg);

/// theta = sqrt(V_G) V S^{-1/2} over the nonzero eigenpairs of L.
Embedding exact_commute_embedding(const SimilarityGraph& g);

/// Dense pseudoinverse of L for a connected graph, with commute-time lookup.
class CommuteOracle {
 public:
  explicit CommuteOracle(const SimilarityGraph& g);

  /// c_ij = V_G (l+_ii + l+_jj - 2 l+_ij).
  double commute(Index i, Index j) const;
  const Eigen::MatrixXd& pseudoinverse() const noexcept { return pinv_; }
  double volume() const noexcept { return volume_; }
  Index size() const noexcept { return static_cast<Index>(pinv_.rows()); }

 private:
  Eigen::MatrixXd pinv_;
  double volume_;
};

/// Convenience single-pair commute time (builds a CommuteOracle).
double commute_pinv(const SimilarityGraph& g, Index i, Index j);

/// h[i] = expected steps from i to `target`; h[target] = 0.
Vector hitting_times(const SimilarityGraph& g, Index target);

}  // namespace cesc
