#pragma once

#include "cesc/common.hpp"

#include <cstdint>
#include <vector>

namespace cesc {

enum class KMeansInit { plusplus, sample };

struct KMeansConfig {
  Index k = 2;
  Index replications = 5;
  Index max_iter = 100;
  std::uint64_t seed = 0;
  KMeansInit init = KMeansInit::plusplus;
  /// Workers for running replications side by side (0 = all cores).
  unsigned threads = 1;

  void validate() const;
};

struct ClusterAssignment {
  std::vector<int> labels;  // values in [0, k)
  double cost = 0.0;        // sum of squared distances to assigned centroids
  Index iterations = 0;     // Lloyd iterations of the winning replication
  Index replication_index = 0;
  /// Cost after every Lloyd iteration of the winning replication.
  std::vector<double> cost_history;
};

/// Lloyd's algorithm; the lowest-cost of cfg.replications restarts wins.
/// Replication r draws from a stream derived from (seed, r) only, so the
/// result does not depend on cfg.threads.
ClusterAssignment kmeans_cluster(const DenseMatrix& points, const KMeansConfig& cfg);

/// k-means++ seeding: returns the row indices of the chosen centroids.
std::vector<Index> plusplus_init(const DenseMatrix& points, Index k, std::uint64_t seed);

/// k distinct rows chosen uniformly at random.
std::vector<Index> sample_init(const DenseMatrix& points, Index k, std::uint64_t seed);

}  // namespace cesc
