#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "ime/common.hpp"
#include "ime/dataset.hpp"

namespace ime {

enum class GraphOrder { first, second };
enum class DistanceKind { euclidean, geodesic };

// Symmetric non-negative weights; 0 off the diagonal means "no direct edge".
struct WeightedGraph {
  Matrix weights;
  GraphOrder order = GraphOrder::first;

  Index size() const { return weights.rows(); }
};

// Entries in [0, +inf]; +inf marks an unreachable pair.
struct DistanceMatrix {
  Matrix dist;
  DistanceKind kind = DistanceKind::euclidean;

  Index size() const { return dist.rows(); }
};

inline void validate_weighted_graph(const WeightedGraph& g) {
  const Matrix& w = g.weights;
  if (w.rows() != w.cols()) throw InvalidArgument("graph weight matrix is not square");
  for (Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) throw InvalidArgument("graph has a nonzero diagonal entry");
    for (Index j = 0; j < w.cols(); ++j) {
      double v = w(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidArgument("graph weight (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is negative or non-finite");
      if (v != w(j, i)) throw InvalidArgument("graph weights are not symmetric");
    }
  }
}

inline DistanceMatrix pairwise_euclidean(const Matrix& points) {
  const Index d = points.rows();
  Vector sq = points.rowwise().squaredNorm();
  Matrix gram = points * points.transpose();
  DistanceMatrix out;
  out.kind = DistanceKind::euclidean;
  out.dist.resize(d, d);
  for (Index j = 0; j < d; ++j) {
    out.dist(j, j) = 0.0;
    for (Index i = j + 1; i < d; ++i) {
      double v = std::sqrt(std::max(sq(i) + sq(j) - 2.0 * gram(i, j), 0.0));
      out.dist(i, j) = v;
      out.dist(j, i) = v;
    }
  }
  return out;
}

inline DistanceMatrix pairwise_euclidean(const DescriptorSet& set) {
  return pairwise_euclidean(set.vectors);
}

inline WeightedGraph build_knn_graph(const DistanceMatrix& dist, Index k) {
  const Index d = dist.size();
  if (k < 1 || k > d - 1)
    throw InvalidArgument("k must lie in [1, " + std::to_string(d - 1) + "], got " +
                          std::to_string(k));
  WeightedGraph g;
  g.order = GraphOrder::first;
  g.weights = Matrix::Zero(d, d);
  std::vector<Index> cand(std::size_t(d - 1));
  for (Index i = 0; i < d; ++i) {
    Index c = 0;
    for (Index j = 0; j < d; ++j)
      if (j != i) cand[std::size_t(c++)] = j;
    // Ties in the k-th distance break toward the lower index.
    auto by_dist = [&](Index a, Index b) {
      double da = dist.dist(i, a), db = dist.dist(i, b);
      return da < db || (da == db && a < b);
    };
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end(), by_dist);
    for (Index t = 0; t < k; ++t) {
      Index j = cand[std::size_t(t)];
      double w = dist.dist(i, j);
      g.weights(i, j) = w;
      g.weights(j, i) = w;  // union symmetrization
    }
  }
  return g;
}

inline WeightedGraph second_order_graph(const WeightedGraph& g) {
  if (g.order != GraphOrder::first)
    throw InvalidArgument("second_order_graph expects a first-order graph");
  WeightedGraph out;
  out.order = GraphOrder::second;
  out.weights.noalias() = g.weights * g.weights;
  // The product puts sum_l w(i,l)^2 on the diagonal; self-weight must stay 0.
  out.weights.diagonal().setZero();
  // The product of a symmetric matrix with itself is symmetric; mirror the
  // lower triangle anyway so the invariant holds bit-for-bit.
  for (Index j = 0; j < out.weights.cols(); ++j)
    for (Index i = j + 1; i < out.weights.rows(); ++i) out.weights(j, i) = out.weights(i, j);
  return out;
}

namespace detail {

inline Matrix geodesic_init(const WeightedGraph& g) {
  const Index d = g.size();
  Matrix dist(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      double w = g.weights(i, j);
      dist(i, j) = (i == j) ? 0.0 : (w > 0.0 ? w : kInfinity);
    }
    dist(j, j) = 0.0;
  }
  return dist;
}

}  // namespace detail

// Floyd-Warshall. The relaxation is written column-at-a-time so the inner
// loop is contiguous and vectorizable; +inf entries propagate naturally.
inline DistanceMatrix geodesic_distances(const WeightedGraph& g) {
  DistanceMatrix out;
  out.kind = DistanceKind::geodesic;
  out.dist = detail::geodesic_init(g);
  Matrix& dist = out.dist;
  const Index d = g.size();
  Vector col_k(d);
  for (Index k = 0; k < d; ++k) {
    col_k = dist.col(k);
    for (Index j = 0; j < d; ++j) {
      double dkj = dist(k, j);
      if (dkj == kInfinity) continue;
      dist.col(j) = dist.col(j).cwiseMin((col_k.array() + dkj).matrix());
    }
  }
  return out;
}

// Per-source Dijkstra over the sparse edge list; same contract as
// geodesic_distances. The output is min-symmetrized because the two sweep
// directions may accumulate a path's weights in different orders.
inline DistanceMatrix geodesic_distances_sparse(const WeightedGraph& g) {
  const Index d = g.size();
  std::vector<std::vector<std::pair<Index, double>>> adj(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      double w = g.weights(i, j);
      if (i != j && w > 0.0) adj[std::size_t(i)].emplace_back(j, w);
    }
  DistanceMatrix out;
  out.kind = DistanceKind::geodesic;
  out.dist.setConstant(d, d, kInfinity);
  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  for (Index src = 0; src < d; ++src) {
    auto dist_col = out.dist.col(src);
    dist_col(src) = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > dist_col(u)) continue;  // stale entry
      for (auto [v, w] : adj[std::size_t(u)]) {
        double cand = du + w;
        if (cand < dist_col(v)) {
          dist_col(v) = cand;
          heap.emplace(cand, v);
        }
      }
    }
  }
  for (Index j = 0; j < d; ++j)
    for (Index i = j + 1; i < d; ++i) {
      double v = std::min(out.dist(i, j), out.dist(j, i));
      out.dist(i, j) = v;
      out.dist(j, i) = v;
    }
  return out;
}

}  // namespace ime
