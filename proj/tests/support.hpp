#pragma once

// Graph generators and independent dense oracles shared by the tests. The
// oracles deliberately avoid the library code paths they check: Laplacians
// are assembled from edge lists by hand, pseudoinverses come from a complete
// orthogonal decomposition, hitting times from an LU solve of the
// first-step equations, components from BFS.

#include "cesc/dataset.hpp"
#include "cesc/random.hpp"
#include "cesc/simgraph.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace testing {

using cesc::Index;

inline cesc::EdgeList make_edges(Index n, const std::vector<cesc::WeightedEdge>& edges) {
  cesc::EdgeList el;
  el.node_count = n;
  el.edges = edges;
  for (Index i = 0; i < n; ++i) el.external_ids.push_back(i);
  return el;
}

inline cesc::SimilarityGraph graph_of(Index n, const std::vector<cesc::WeightedEdge>& edges) {
  return cesc::edge_graph(make_edges(n, edges));
}

inline cesc::SimilarityGraph single_edge(double w = 1.0) { return graph_of(2, {{0, 1, w}}); }
inline cesc::SimilarityGraph unit_path3() { return graph_of(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }
inline cesc::SimilarityGraph unit_triangle() { return graph_of(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }

/// Connected random graph: a random spanning tree plus `extra` random
/// edges, weights uniform in [0.1, 2].
inline std::vector<cesc::WeightedEdge> random_connected_edges(Index n, Index extra, std::uint64_t seed) {
  cesc::Rng rng(seed);
  std::set<std::pair<Index, Index>> seen;
  std::vector<cesc::WeightedEdge> edges;
  auto add = [&](Index u, Index v) {
    if (u == v) return;
    const auto key = std::minmax(u, v);
    if (!seen.insert(key).second) return;
    edges.push_back({key.first, key.second, rng.uniform(0.1, 2.0)});
  };
  for (Index v = 1; v < n; ++v) add(v, rng.below(v));
  for (Index e = 0; e < extra; ++e) add(rng.below(n), rng.below(n));
  return edges;
}

inline cesc::SimilarityGraph random_connected_graph(Index n, Index extra, std::uint64_t seed) {
  return graph_of(n, random_connected_edges(n, extra, seed));
}

/// Points in the unit square.
inline cesc::FeatureMatrix random_points(Index n, Index d, std::uint64_t seed) {
  cesc::Rng rng(seed);
  cesc::FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < fm.values.rows(); ++i)
    for (Eigen::Index j = 0; j < fm.values.cols(); ++j) fm.values(i, j) = rng.uniform();
  return fm;
}

/// Dense L = D - A from an edge list.
inline Eigen::MatrixXd dense_laplacian(Index n, const std::vector<cesc::WeightedEdge>& edges) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : edges) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    l(u, v) -= e.weight;
    l(v, u) -= e.weight;
    l(u, u) += e.weight;
    l(v, v) += e.weight;
  }
  return l;
}

inline Eigen::MatrixXd dense_laplacian(const cesc::SimilarityGraph& g) {
  return dense_laplacian(g.node_count(), g.edges());
}

/// Moore-Penrose pseudoinverse via a complete orthogonal decomposition.
inline Eigen::MatrixXd pinv_oracle(const Eigen::MatrixXd& m) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  cod.setThreshold(1e-10);
  return cod.pseudoInverse();
}

/// All commute times V_G (e_i - e_j)^T L^+ (e_i - e_j).
inline Eigen::MatrixXd commute_oracle(const cesc::SimilarityGraph& g) {
  const Eigen::MatrixXd p = pinv_oracle(dense_laplacian(g));
  const auto n = p.rows();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = g.volume() * (p(i, i) + p(j, j) - 2.0 * p(i, j));
  return c;
}

/// Hitting times to `target` from the recursion h_i = 1 + sum_l p_il h_l,
/// h_target = 0, solved as a dense linear system with partial-pivot LU.
inline Eigen::VectorXd hitting_oracle(Index n, const std::vector<cesc::WeightedEdge>& edges, Index target) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : edges) {
    w(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) += e.weight;
    w(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) += e.weight;
  }
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nn, nn);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (i == static_cast<Eigen::Index>(target)) {
      a.row(i).setZero();
      a(i, i) = 1.0;
      rhs[i] = 0.0;
      continue;
    }
    const double d = w.row(i).sum();
    for (Eigen::Index l = 0; l < nn; ++l)
      if (l != static_cast<Eigen::Index>(target)) a(i, l) -= w(i, l) / d;
  }
  return a.partialPivLu().solve(rhs);
}

/// Component sizes by breadth-first search, sorted descending.
inline std::vector<Index> bfs_component_sizes(Index n, const std::vector<cesc::WeightedEdge>& edges) {
  std::vector<std::vector<Index>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> seen(n, false);
  std::vector<Index> sizes;
  for (Index s = 0; s < n; ++s) {
    if (seen[s]) continue;
    Index size = 0;
    std::queue<Index> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const Index u = q.front();
      q.pop();
      ++size;
      for (const Index v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

/// Undirected union-rule kNN edge set from an O(n^2) scan with full sorts.
inline std::set<std::pair<Index, Index>> brute_knn_edges(const cesc::DenseMatrix& x, Index k) {
  const auto n = static_cast<Index>(x.rows());
  std::set<std::pair<Index, Index>> out;
  for (Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, Index>> d;
    for (Index j = 0; j < n; ++j)
      if (j != i)
        d.push_back({(x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).squaredNorm(), j});
    std::sort(d.begin(), d.end());
    for (Index r = 0; r < k; ++r) out.insert(std::minmax(i, d[r].second));
  }
  return out;
}

/// Best matched accuracy over every injective relabeling of the predicted
/// clusters (small label counts only).
inline double exhaustive_accuracy(const std::vector<int>& pred, const std::vector<int>& ref) {
  std::vector<int> p_ids(pred.begin(), pred.end()), r_ids(ref.begin(), ref.end());
  std::sort(p_ids.begin(), p_ids.end());
  p_ids.erase(std::unique(p_ids.begin(), p_ids.end()), p_ids.end());
  std::sort(r_ids.begin(), r_ids.end());
  r_ids.erase(std::unique(r_ids.begin(), r_ids.end()), r_ids.end());
  // Pad the reference side with unmatched slots so every predicted label
  // has somewhere to go.
  const std::size_t size = std::max(p_ids.size(), r_ids.size());
  std::vector<int> slots(size);
  std::iota(slots.begin(), slots.end(), 0);
  std::map<int, int> p_pos, r_pos;
  for (std::size_t i = 0; i < p_ids.size(); ++i) p_pos[p_ids[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < r_ids.size(); ++i) r_pos[r_ids[i]] = static_cast<int>(i);
  std::size_t best = 0;
  do {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (slots[static_cast<std::size_t>(p_pos[pred[i]])] == r_pos[ref[i]]) ++hit;
    best = std::max(best, hit);
  } while (std::next_permutation(slots.begin(), slots.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
