#include "cesc/simgraph.hpp"

#include "cesc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace cesc {
namespace {

constexpr double kMinWeight = 1e-300;
constexpr Eigen::Index kKdTreeMaxDim = 20;

double gaussian_weight(double dist2, double sigma) {
  return std::max(std::exp(-dist2 / (2.0 * sigma * sigma)), kMinWeight);
}

double squared_distance(const DenseMatrix& x, Index i, Index j) {
  const double* a = x.row(static_cast<Eigen::Index>(i)).data();
  const double* b = x.row(static_cast<Eigen::Index>(j)).data();
  double s = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

struct CandidateEdge {
  Index u;  // u < v
  Index v;
  double dist2;
};

SparseMatrix symmetric_adjacency(Index n, const std::vector<CandidateEdge>& edges, double sigma) {
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(2 * edges.size());
  for (const auto& e : edges) {
    const double w = gaussian_weight(e.dist2, sigma);
    t.push_back({e.u, e.v, w});
    t.push_back({e.v, e.u, w});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::knn: return "knn";
    case GraphKind::epsilon: return "epsilon";
    case GraphKind::full: return "full";
    case GraphKind::edge_list: return "edge_list";
  }
  return "?";
}

SimilarityGraph::SimilarityGraph(SparseMatrix adjacency, GraphMeta meta)
    : adjacency_(std::move(adjacency)), meta_(meta) {
  if (adjacency_.rows() != adjacency_.cols()) throw Error("adjacency must be square");
  if (!adjacency_.is_symmetric()) throw Error("adjacency must be symmetric");
  for (Index i = 0; i < adjacency_.rows(); ++i) {
    const auto cols = adjacency_.row_indices(i);
    const auto vals = adjacency_.row_values(i);
    for (Index p = 0; p < cols.size(); ++p) {
      if (cols[p] == i) throw Error("adjacency must not contain self-loops");
      if (!(vals[p] > 0.0) || !std::isfinite(vals[p])) throw Error("adjacency weights must be positive and finite");
    }
  }
  degrees_ = adjacency_.row_sums();
  volume_ = degrees_.sum();
}

std::vector<WeightedEdge> SimilarityGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (Index i = 0; i < node_count(); ++i) {
    const auto cols = adjacency_.row_indices(i);
    const auto vals = adjacency_.row_values(i);
    for (Index p = 0; p < cols.size(); ++p)
      if (cols[p] > i) out.push_back({i, cols[p], vals[p]});
  }
  return out;
}

std::vector<std::vector<Neighbor>> knn_table(const DenseMatrix& points, Index k1, unsigned threads) {
  const auto n = static_cast<Index>(points.rows());
  std::vector<std::vector<Neighbor>> table(n);
  if (points.cols() <= kKdTreeMaxDim) {
    const KdTree tree(points);
    parallel_for(n, threads, [&](std::size_t i) { table[i] = tree.nearest(i, k1); });
  } else {
    parallel_for(n, threads, [&](std::size_t i) { table[i] = brute_force_nearest(points, i, k1); });
  }
  return table;
}

double median_knn_distance(const FeatureMatrix& x, Index k1, unsigned threads) {
  const Index n = x.rows();
  if (n < 2) throw Error("median heuristic needs at least two points");
  k1 = std::clamp<Index>(k1, 1, n - 1);
  const auto table = knn_table(x.values, k1, threads);
  std::vector<double> dist(n);
  for (Index i = 0; i < n; ++i) dist[i] = std::sqrt(table[i].back().dist2);
  return median(std::move(dist));
}

SimilarityGraph build_graph(const FeatureMatrix& x, const GraphMode& mode, const Bandwidth& sigma, unsigned threads) {
  x.validate();
  const Index n = x.rows();
  if (n < 2) throw Error("build_graph: need at least two points");
  if (mode.kind == GraphKind::edge_list) throw Error("build_graph: edge_list is not a feature graph mode");
  if (mode.kind == GraphKind::knn && (mode.k1 == 0 || mode.k1 >= n))
    throw Error("build_graph: k1 must satisfy 1 <= k1 < n");
  if (mode.kind == GraphKind::epsilon && !(mode.epsilon > 0.0)) throw Error("build_graph: epsilon must be > 0");
  if (!sigma.median_heuristic && !(sigma.value > 0.0 && std::isfinite(sigma.value)))
    throw Error("build_graph: sigma must be > 0");

  const Index k1 = std::min<Index>(std::max<Index>(mode.k1, 1), n - 1);
  std::vector<std::vector<Neighbor>> table;
  if (mode.kind == GraphKind::knn || sigma.median_heuristic) table = knn_table(x.values, k1, threads);

  GraphMeta meta;
  meta.kind = mode.kind;
  meta.k1 = mode.kind == GraphKind::knn || sigma.median_heuristic ? k1 : 0;
  meta.epsilon = mode.epsilon;
  meta.sigma_from_heuristic = sigma.median_heuristic;
  if (sigma.median_heuristic) {
    std::vector<double> dist(n);
    for (Index i = 0; i < n; ++i) dist[i] = std::sqrt(table[i].back().dist2);
    meta.sigma = median(std::move(dist));
    if (!(meta.sigma > 0.0))
      throw DegenerateBandwidthError("median-heuristic bandwidth is zero: neighbor distances vanish");
  } else {
    meta.sigma = sigma.value;
  }

  std::vector<CandidateEdge> edges;
  switch (mode.kind) {
    case GraphKind::knn:
      // Union rule: keep (i, j) if either lists the other.
      for (Index i = 0; i < n; ++i)
        for (const auto& nb : table[i]) edges.push_back({std::min(i, nb.index), std::max(i, nb.index), nb.dist2});
      std::sort(edges.begin(), edges.end(),
                [](const auto& a, const auto& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
      edges.erase(std::unique(edges.begin(), edges.end(),
                              [](const auto& a, const auto& b) { return a.u == b.u && a.v == b.v; }),
                  edges.end());
      break;
    case GraphKind::epsilon: {
      const double eps2 = mode.epsilon * mode.epsilon;
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
          if (const double d2 = squared_distance(x.values, i, j); d2 <= eps2) edges.push_back({i, j, d2});
      break;
    }
    case GraphKind::full:
      edges.reserve(n * (n - 1) / 2);
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, squared_distance(x.values, i, j)});
      break;
    case GraphKind::edge_list:
      break;
  }
  return SimilarityGraph(symmetric_adjacency(n, edges, meta.sigma), meta);
}

SimilarityGraph edge_graph(const EdgeList& list) {
  if (list.edges.empty()) throw Error("edge_graph: empty edge list");
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(2 * list.edges.size());
  for (const auto& e : list.edges) {
    if (e.u == e.v) throw Error("edge_graph: self-loop");
    if (!(e.weight > 0.0)) throw Error("edge_graph: weights must be positive");
    if (e.u >= list.node_count || e.v >= list.node_count) throw Error("edge_graph: node id out of range");
    t.push_back({e.u, e.v, e.weight});
    t.push_back({e.v, e.u, e.weight});
  }
  // from_triplets would sum duplicates; a canonical list has none.
  auto adjacency = SparseMatrix::from_triplets(list.node_count, list.node_count, t);
  if (adjacency.nnz() != t.size()) throw Error("edge_graph: duplicate undirected edge");
  return SimilarityGraph(std::move(adjacency), GraphMeta{});
}

EdgeList to_edge_list(const SimilarityGraph& g) {
  EdgeList out;
  out.edges = g.edges();
  out.node_count = g.node_count();
  out.external_ids.resize(g.node_count());
  for (Index i = 0; i < g.node_count(); ++i) out.external_ids[i] = i;
  return out;
}

SparseMatrix laplacian(const SimilarityGraph& g) {
  const auto& a = g.adjacency();
  const Index n = g.node_count();
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(a.nnz() + n);
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, g.degrees()[static_cast<Eigen::Index>(i)]});
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    for (Index p = 0; p < cols.size(); ++p) t.push_back({i, cols[p], -vals[p]});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix normalized_laplacian(const SimilarityGraph& g, NormalizedKind kind) {
  const auto& a = g.adjacency();
  const auto& d = g.degrees();
  const Index n = g.node_count();
  for (Index i = 0; i < n; ++i)
    if (!(d[static_cast<Eigen::Index>(i)] > 0.0))
      throw Error("normalized_laplacian: node " + std::to_string(i) + " is isolated");
  const Vector root = d.cwiseSqrt();
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(a.nnz() + n);
  for (Index i = 0; i < n; ++i) {
    const auto ie = static_cast<Eigen::Index>(i);
    t.push_back({i, i, 1.0});
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    for (Index p = 0; p < cols.size(); ++p) {
      const double v = kind == NormalizedKind::sym
                           ? -vals[p] / (root[ie] * root[static_cast<Eigen::Index>(cols[p])])
                           : -vals[p] / d[ie];
      t.push_back({i, cols[p], v});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

namespace {

SparseMatrix incidence_from(Index n, const std::vector<std::pair<Index, Index>>& order) {
  std::vector<Index> row_ptr(order.size() + 1);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(2 * order.size());
  vals.reserve(2 * order.size());
  for (Index e = 0; e < order.size(); ++e) {
    const auto [head, tail] = order[e];
    if (head < tail) {
      cols.insert(cols.end(), {head, tail});
      vals.insert(vals.end(), {1.0, -1.0});
    } else {
      cols.insert(cols.end(), {tail, head});
      vals.insert(vals.end(), {-1.0, 1.0});
    }
    row_ptr[e + 1] = cols.size();
  }
  return SparseMatrix::from_csr(order.size(), n, std::move(row_ptr), std::move(cols), std::move(vals));
}

}  // namespace

SparseMatrix IncidenceFactor::gram() const {
  const SparseMatrix bt = incidence.transpose();
  return bt * (weight_matrix() * incidence);
}

IncidenceFactor incidence_factorization(const SimilarityGraph& g) {
  IncidenceFactor f;
  const auto edges = g.edges();
  f.edge_order.reserve(edges.size());
  f.weights.resize(static_cast<Eigen::Index>(edges.size()));
  for (Index e = 0; e < edges.size(); ++e) {
    f.edge_order.emplace_back(edges[e].u, edges[e].v);
    f.weights[static_cast<Eigen::Index>(e)] = edges[e].weight;
  }
  f.incidence = incidence_from(g.node_count(), f.edge_order);
  return f;
}

IncidenceFactor reorient(const IncidenceFactor& f, const std::vector<bool>& flip) {
  if (flip.size() != f.edge_count()) throw std::invalid_argument("reorient: flip mask size mismatch");
  IncidenceFactor out = f;
  for (Index e = 0; e < flip.size(); ++e)
    if (flip[e]) std::swap(out.edge_order[e].first, out.edge_order[e].second);
  out.incidence = incidence_from(f.incidence.cols(), out.edge_order);
  return out;
}

std::pair<std::vector<Index>, Index> connected_components(const SimilarityGraph& g) {
  const Index n = g.node_count();
  constexpr Index unseen = static_cast<Index>(-1);
  std::vector<Index> comp(n, unseen);
  Index count = 0;
  std::deque<Index> queue;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] != unseen) continue;
    comp[s] = count;
    queue.push_back(s);
    while (!queue.empty()) {
      const Index v = queue.front();
      queue.pop_front();
      for (const Index w : g.adjacency().row_indices(v)) {
        if (comp[w] == unseen) {
          comp[w] = count;
          queue.push_back(w);
        }
      }
    }
    ++count;
  }
  return {std::move(comp), count};
}

bool is_connected(const SimilarityGraph& g) {
  return g.node_count() > 0 && connected_components(g).second == 1;
}

ComponentExtraction largest_component(const SimilarityGraph& g) {
  const auto [comp, count] = connected_components(g);
  std::vector<Index> sizes(count, 0);
  for (const Index c : comp) ++sizes[c];
  // Component ids follow their smallest member, so the first maximum wins ties.
  const Index keep = static_cast<Index>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

  ComponentExtraction out;
  out.old_to_new.assign(g.node_count(), ComponentExtraction::npos);
  for (Index v = 0; v < g.node_count(); ++v) {
    if (comp[v] != keep) continue;
    out.old_to_new[v] = out.new_to_old.size();
    out.new_to_old.push_back(v);
  }
  if (count == 1) {
    out.graph = g;
    return out;
  }
  std::vector<SparseMatrix::Triplet> t;
  for (const Index v : out.new_to_old) {
    const auto cols = g.adjacency().row_indices(v);
    const auto vals = g.adjacency().row_values(v);
    for (Index p = 0; p < cols.size(); ++p) t.push_back({out.old_to_new[v], out.old_to_new[cols[p]], vals[p]});
  }
  const Index m = out.new_to_old.size();
  out.graph = SimilarityGraph(SparseMatrix::from_triplets(m, m, t), g.meta());
  return out;
}

}  // namespace cesc
