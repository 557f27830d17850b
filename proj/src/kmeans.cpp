#include "cesc/kmeans.hpp"

#include "cesc/parallel.hpp"
#include "cesc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
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

struct Replication {
  std::vector<int> labels;
  double cost = std::numeric_limits<double>::infinity();
  Index iterations = 0;
  std::vector<double> history;
};

// Mean of each cluster, accumulated in point order.
void recompute_centroids(const DenseMatrix& x, const std::vector<int>& labels, DenseMatrix& centroids,
                         std::vector<Index>& sizes) {
  centroids.setZero();
  std::fill(sizes.begin(), sizes.end(), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    centroids.row(c) += x.row(i);
    ++sizes[static_cast<std::size_t>(c)];
  }
  for (Eigen::Index c = 0; c < centroids.rows(); ++c)
    if (sizes[static_cast<std::size_t>(c)] > 0) centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
}

double assignment_cost(const DenseMatrix& x, const std::vector<int>& labels, const DenseMatrix& centroids) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    cost += squared_distance(x.row(i).data(), centroids.row(labels[static_cast<std::size_t>(i)]).data(), x.cols());
  return cost;
}

Replication lloyd(const DenseMatrix& x, const std::vector<Index>& seeds, Index max_iter) {
  const Eigen::Index n = x.rows();
  const auto k = static_cast<Eigen::Index>(seeds.size());
  DenseMatrix centroids(k, x.cols());
  for (Eigen::Index c = 0; c < k; ++c) centroids.row(c) = x.row(static_cast<Eigen::Index>(seeds[static_cast<std::size_t>(c)]));

  Replication rep;
  rep.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<Index> sizes(static_cast<std::size_t>(k));

  for (Index it = 0; it < max_iter; ++it) {
    bool changed = false;
    double cost = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(x.row(i).data(), centroids.row(0).data(), x.cols());
      for (Eigen::Index c = 1; c < k; ++c) {
        const double d = squared_distance(x.row(i).data(), centroids.row(c).data(), x.cols());
        if (d < best_d) {  // strict: ties stay with the lower cluster id
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      auto& label = rep.labels[static_cast<std::size_t>(i)];
      changed |= label != best;
      label = best;
      dist[static_cast<std::size_t>(i)] = best_d;
      cost += best_d;
    }
    rep.history.push_back(cost);
    rep.iterations = it + 1;
    if (!changed) break;

    recompute_centroids(x, rep.labels, centroids, sizes);
    // Empty clusters seize the point farthest from its centroid, taken from
    // a cluster that keeps at least one member.
    for (Eigen::Index c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto owner = static_cast<std::size_t>(rep.labels[static_cast<std::size_t>(i)]);
        if (sizes[owner] < 2) continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      if (far < 0) break;  // fewer distinct candidates than clusters
      --sizes[static_cast<std::size_t>(rep.labels[static_cast<std::size_t>(far)])];
      rep.labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
      sizes[static_cast<std::size_t>(c)] = 1;
      dist[static_cast<std::size_t>(far)] = 0.0;
      recompute_centroids(x, rep.labels, centroids, sizes);
    }
  }
  recompute_centroids(x, rep.labels, centroids, sizes);
  rep.cost = assignment_cost(x, rep.labels, centroids);
  return rep;
}

}  // namespace

void KMeansConfig::validate() const {
  if (k < 1) throw Error("k-means: k must be >= 1");
  if (replications < 1) throw Error("k-means: replications must be >= 1");
  if (max_iter < 1) throw Error("k-means: max_iter must be >= 1");
}

std::vector<Index> plusplus_init(const DenseMatrix& x, Index k, std::uint64_t seed) {
  const auto n = static_cast<Index>(x.rows());
  if (k > n || k == 0) throw Error("plusplus_init: need 1 <= k <= n");
  Rng rng(seed);
  std::vector<Index> chosen{static_cast<Index>(rng.below(n))};
  std::vector<bool> taken(n, false);
  taken[chosen[0]] = true;
  std::vector<double> d2(n);
  for (Index i = 0; i < n; ++i)
    d2[i] = squared_distance(x.row(static_cast<Eigen::Index>(i)).data(),
                             x.row(static_cast<Eigen::Index>(chosen[0])).data(), x.cols());

  // Greedy variant: each step draws a few D^2-weighted candidates and keeps
  // the one that lowers the potential most.
  const Index trials = 2 + static_cast<Index>(std::log(static_cast<double>(k)));
  std::vector<double> cand_d2(n), best_d2(n);
  while (chosen.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Index pick = n;
    if (total > 0.0) {
      double best_potential = std::numeric_limits<double>::infinity();
      for (Index t = 0; t < trials; ++t) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        Index cand = n;
        for (Index i = 0; i < n; ++i) {
          if (d2[i] <= 0.0) continue;
          acc += d2[i];
          cand = i;
          if (acc > target) break;
        }
        const double* c = x.row(static_cast<Eigen::Index>(cand)).data();
        double potential = 0.0;
        for (Index i = 0; i < n; ++i) {
          cand_d2[i] = std::min(d2[i], squared_distance(x.row(static_cast<Eigen::Index>(i)).data(), c, x.cols()));
          potential += cand_d2[i];
        }
        if (potential < best_potential) {
          best_potential = potential;
          pick = cand;
          best_d2.swap(cand_d2);
        }
      }
      d2.swap(best_d2);
    } else {
      // Every remaining point coincides with a centroid: pick uniformly.
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i)
        if (!taken[i]) free.push_back(i);
      pick = free[rng.below(free.size())];
    }
    chosen.push_back(pick);
    taken[pick] = true;
  }
  return chosen;
}

std::vector<Index> sample_init(const DenseMatrix& x, Index k, std::uint64_t seed) {
  const auto n = static_cast<Index>(x.rows());
  if (k > n || k == 0) throw Error("sample_init: need 1 <= k <= n");
  Rng rng(seed);
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  return idx;
}

ClusterAssignment kmeans_cluster(const DenseMatrix& points, const KMeansConfig& cfg) {
  cfg.validate();
  if (cfg.k > static_cast<Index>(points.rows())) throw Error("k-means: k exceeds the number of points");
  if (points.cols() < 1) throw Error("k-means: points need at least one coordinate");
  if (!points.allFinite()) throw Error("k-means: points must be finite");

  std::vector<Replication> reps(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(cfg.seed, r);
    const auto seeds = cfg.init == KMeansInit::plusplus ? plusplus_init(points, cfg.k, s) : sample_init(points, cfg.k, s);
    reps[r] = lloyd(points, seeds, cfg.max_iter);
  });

  Index best = 0;
  for (Index r = 1; r < reps.size(); ++r)
    if (reps[r].cost < reps[best].cost) best = r;
  ClusterAssignment out;
  out.labels = std::move(reps[best].labels);
  out.cost = reps[best].cost;
  out.iterations = reps[best].iterations;
  out.replication_index = best;
  out.cost_history = std::move(reps[best].history);
  return out;
}

}  // namespace cesc
