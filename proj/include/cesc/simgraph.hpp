#pragma once

#include "cesc/dataset.hpp"
#include "cesc/kdtree.hpp"
#include "cesc/sparse.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cesc {

enum class GraphKind { knn, epsilon, full, edge_list };

std::string_view to_string(GraphKind kind);

/// How to connect points: union-rule kNN, epsilon ball, or fully connected.
struct GraphMode {
  GraphKind kind = GraphKind::knn;
  Index k1 = 10;
  double epsilon = 0.0;

  static GraphMode knn(Index k1) { return {GraphKind::knn, k1, 0.0}; }
  static GraphMode epsilon_ball(double eps) { return {GraphKind::epsilon, 10, eps}; }
  static GraphMode full() { return {GraphKind::full, 10, 0.0}; }
};

/// Gaussian kernel bandwidth: a fixed value, or the median over all points
/// of the distance to their k1-th nearest neighbor.
struct Bandwidth {
  bool median_heuristic = true;
  double value = 0.0;

  static Bandwidth fixed(double sigma) { return {false, sigma}; }
  static Bandwidth median() { return {true, 0.0}; }
};

struct GraphMeta {
  GraphKind kind = GraphKind::edge_list;
  Index k1 = 0;
  double epsilon = 0.0;
  /// Resolved bandwidth (0 for edge-list graphs).
  double sigma = 0.0;
  bool sigma_from_heuristic = false;
};

/// Raised when the median heuristic resolves to sigma = 0 (all neighbor
/// distances vanish, e.g. every point identical).
class DegenerateBandwidthError : public Error {
 public:
  using Error::Error;
};

/// Weighted undirected graph. Adjacency is symmetric with non-negative
/// weights and no self-loops; degrees and volume are derived on construction.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  SimilarityGraph(SparseMatrix adjacency, GraphMeta meta);

  Index node_count() const noexcept { return adjacency_.rows(); }
  Index edge_count() const noexcept { return adjacency_.nnz() / 2; }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const Vector& degrees() const noexcept { return degrees_; }
  double volume() const noexcept { return volume_; }
  const GraphMeta& meta() const noexcept { return meta_; }

  /// Undirected edges (i < j) in row-major order of the adjacency.
  std::vector<WeightedEdge> edges() const;

 private:
  SparseMatrix adjacency_;
  Vector degrees_;
  double volume_ = 0.0;
  GraphMeta meta_;
};

/// Similarity graph from features with Gaussian kernel weights
/// exp(-|xi - xj|^2 / (2 sigma^2)), clamped below at 1e-300.
SimilarityGraph build_graph(const FeatureMatrix& x, const GraphMode& mode, const Bandwidth& sigma = Bandwidth::median(),
                            unsigned threads = 0);

/// Resolves the median-heuristic bandwidth for `x` with k1 neighbors.
double median_knn_distance(const FeatureMatrix& x, Index k1, unsigned threads = 0);

/// k1 nearest neighbors of every row (kd-tree for d <= 20, exhaustive above).
std::vector<std::vector<Neighbor>> knn_table(const DenseMatrix& points, Index k1, unsigned threads = 0);

SimilarityGraph edge_graph(const EdgeList& edges);

/// Edge list of a graph with identity external ids.
EdgeList to_edge_list(const SimilarityGraph& g);

/// L = D - A.
SparseMatrix laplacian(const SimilarityGraph& g);

enum class NormalizedKind { sym, rw };

/// D^{-1/2} L D^{-1/2} (sym) or D^{-1} L (rw). Throws on an isolated node.
SparseMatrix normalized_laplacian(const SimilarityGraph& g, NormalizedKind kind);

/// Signed edge-vertex incidence B (m x n) and edge weights W with L = B^T W B.
struct IncidenceFactor {
  SparseMatrix incidence;
  Vector weights;
  /// (head, tail) per row of B; the head carries +1.
  std::vector<std::pair<Index, Index>> edge_order;

  Index edge_count() const noexcept { return edge_order.size(); }
  SparseMatrix weight_matrix() const { return SparseMatrix::diagonal(weights); }
  /// B^T W B.
  SparseMatrix gram() const;
};

/// Orientation: the lower node id is the head.
IncidenceFactor incidence_factorization(const SimilarityGraph& g);

/// Same factor with the orientation of every edge e where flip[e] is true
/// reversed.
IncidenceFactor reorient(const IncidenceFactor& f, const std::vector<bool>& flip);

/// Connected component id per node (ids ordered by smallest member) and the
/// component count.
std::pair<std::vector<Index>, Index> connected_components(const SimilarityGraph& g);

bool is_connected(const SimilarityGraph& g);

struct ComponentExtraction {
  SimilarityGraph graph;
  /// old_to_new[v] is the new id of old node v, or npos when dropped.
  std::vector<Index> old_to_new;
  /// new_to_old[v'] is the old id of new node v'.
  std::vector<Index> new_to_old;

  static constexpr Index npos = static_cast<Index>(-1);
};

/// Induced subgraph on the largest connected component. Ties go to the
/// component holding the smallest node id.
ComponentExtraction largest_component(const SimilarityGraph& g);

}  // namespace cesc
