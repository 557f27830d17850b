#pragma once

#include "cesc/common.hpp"

#include <vector>

namespace cesc {

struct Neighbor {
  double dist2;  // squared Euclidean distance
  Index index;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Static kd-tree over the rows of a point matrix. The matrix must outlive
/// the tree.
class KdTree {
 public:
  explicit KdTree(const DenseMatrix& points, Index leaf_size = 16);

  /// The k nearest rows to `query` (excluding row `exclude` when it is a
  /// valid index), sorted by (distance, index). Ties on distance resolve to
  /// the smaller index.
  std::vector<Neighbor> nearest(Index query, Index k) const;

 private:
  struct Node {
    Index begin;
    Index end;
    Index split_dim;
    double split_value;
    Index left = 0;
    Index right = 0;
    bool leaf() const { return left == 0 && right == 0; }
  };

  Index build(Index begin, Index end);
  void search(Index node, const double* q, Index exclude, Index k, std::vector<Neighbor>& heap) const;

  const DenseMatrix& points_;
  Index leaf_size_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

/// Exhaustive O(n) scan with the same ordering contract as KdTree::nearest.
std::vector<Neighbor> brute_force_nearest(const DenseMatrix& points, Index query, Index k);

}  // namespace cesc
