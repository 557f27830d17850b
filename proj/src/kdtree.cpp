#include "cesc/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace cesc {
namespace {

double squared_distance(const double* a, const double* b, Eigen::Index d) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

// Max-heap on (dist2, index): the root is the current worst candidate.
void offer(std::vector<Neighbor>& heap, Index k, Neighbor cand) {
  if (heap.size() < k) {
    heap.push_back(cand);
    std::push_heap(heap.begin(), heap.end());
  } else if (cand < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = cand;
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace

KdTree::KdTree(const DenseMatrix& points, Index leaf_size)
    : points_(points), leaf_size_(std::max<Index>(leaf_size, 1)), order_(static_cast<Index>(points.rows())) {
  std::iota(order_.begin(), order_.end(), Index{0});
  nodes_.reserve(2 * order_.size() / leaf_size_ + 2);
  if (!order_.empty()) build(0, order_.size());
}

Index KdTree::build(Index begin, Index end) {
  const Index id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0.0});
  if (end - begin <= leaf_size_) return id;

  // Split on the dimension of widest spread, at the median.
  const Eigen::Index d = points_.cols();
  Index best_dim = 0;
  double best_spread = -1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    double lo = points_(static_cast<Eigen::Index>(order_[begin]), j);
    double hi = lo;
    for (Index p = begin + 1; p < end; ++p) {
      const double v = points_(static_cast<Eigen::Index>(order_[p]), j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = static_cast<Index>(j);
    }
  }
  if (best_spread <= 0.0) return id;  // all points identical: keep as a leaf

  const Index mid = begin + (end - begin) / 2;
  const auto dim = static_cast<Eigen::Index>(best_dim);
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                     const double va = points_(static_cast<Eigen::Index>(a), dim);
                     const double vb = points_(static_cast<Eigen::Index>(b), dim);
                     return va < vb || (va == vb && a < b);
                   });
  nodes_[id].split_dim = best_dim;
  nodes_[id].split_value = points_(static_cast<Eigen::Index>(order_[mid]), dim);
  const Index left = build(begin, mid);
  const Index right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(Index node_id, const double* q, Index exclude, Index k, std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.leaf()) {
    for (Index p = node.begin; p < node.end; ++p) {
      const Index idx = order_[p];
      if (idx == exclude) continue;
      offer(heap, k, {squared_distance(q, points_.row(static_cast<Eigen::Index>(idx)).data(), points_.cols()), idx});
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split_value;
  const Index near = diff < 0.0 ? node.left : node.right;
  const Index far = diff < 0.0 ? node.right : node.left;
  search(near, q, exclude, k, heap);
  // Equal distance must still be visited: a tie may carry a smaller index.
  if (heap.size() < k || diff * diff <= heap.front().dist2) search(far, q, exclude, k, heap);
}

std::vector<Neighbor> KdTree::nearest(Index query, Index k) const {
  std::vector<Neighbor> heap;
  if (k == 0 || nodes_.empty()) return heap;
  heap.reserve(k + 1);
  search(0, points_.row(static_cast<Eigen::Index>(query)).data(), query, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

std::vector<Neighbor> brute_force_nearest(const DenseMatrix& points, Index query, Index k) {
  std::vector<Neighbor> all;
  const double* q = points.row(static_cast<Eigen::Index>(query)).data();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (static_cast<Index>(i) == query) continue;
    all.push_back({squared_distance(q, points.row(i).data(), points.cols()), static_cast<Index>(i)});
  }
  const Index keep = std::min<Index>(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end());
  all.resize(keep);
  return all;
}

}  // namespace cesc
