#pragma once

// Independent reference implementations used as test oracles. These are
// deliberately naive: straight transliterations of the definitions, sharing
// no code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ime/common.hpp"
#include "ime/graph.hpp"

namespace oracle {

using ime::Index;
using ime::Matrix;
using ime::Vector;

inline Matrix naive_pairwise(const Matrix& points) {
  const Index d = points.rows();
  Matrix out(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      double sum = 0;
      for (Index c = 0; c < points.cols(); ++c) {
        double diff = points(i, c) - points(j, c);
        sum += diff * diff;
      }
      out(i, j) = std::sqrt(sum);
    }
  return out;
}

namespace detail {

inline void all_paths_from(const Matrix& w, Index node, Index goal, double length,
                           std::vector<bool>& visited, double& best) {
  if (node == goal) {
    best = std::min(best, length);
    return;
  }
  for (Index next = 0; next < w.rows(); ++next) {
    if (visited[std::size_t(next)] || next == node) continue;
    double edge = w(node, next);
    if (edge <= 0.0) continue;
    visited[std::size_t(next)] = true;
    all_paths_from(w, next, goal, length + edge, visited, best);
    visited[std::size_t(next)] = false;
  }
}

}  // namespace detail

// Minimum over every simple path, weights summed in path order. Exponential;
// keep the graphs small.
inline Matrix brute_force_geodesics(const ime::WeightedGraph& g) {
  const Index d = g.size();
  Matrix out(d, d);
  std::vector<bool> visited(std::size_t(d), false);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      if (i == j) {
        out(i, j) = 0.0;
        continue;
      }
      double best = ime::kInfinity;
      std::fill(visited.begin(), visited.end(), false);
      visited[std::size_t(i)] = true;
      detail::all_paths_from(g.weights, i, j, 0.0, visited, best);
      out(i, j) = best;
    }
  return out;
}

// Classical MDS on a finite distance matrix: double-center the squared
// distances and take the top positive eigenpairs of the Gram matrix.
inline Matrix classical_mds(const Matrix& dist, Index m) {
  const Index d = dist.rows();
  Matrix sq = dist.array().square();
  Matrix j = Matrix::Identity(d, d) - Matrix::Constant(d, d, 1.0 / double(d));
  Matrix b = -0.5 * j * sq * j;
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  Matrix coords = Matrix::Zero(d, m);
  for (Index p = 0; p < m; ++p) {
    double lambda = es.eigenvalues()(d - 1 - p);
    if (lambda <= 0.0) break;
    coords.col(p) = std::sqrt(lambda) * es.eigenvectors().col(d - 1 - p);
  }
  return coords;
}

// Ridge regression by SVD of the stacked least-squares system
// [X; sqrt(alpha) I] M = [Y; 0]; independent of the Cholesky route.
inline Matrix ridge_reference(const Matrix& x, const Matrix& y, double alpha) {
  const Index d = x.rows(), n = x.cols();
  Matrix stacked(d + n, n);
  stacked.topRows(d) = x;
  stacked.bottomRows(n) = std::sqrt(alpha) * Matrix::Identity(n, n);
  Matrix rhs = Matrix::Zero(d + n, y.cols());
  rhs.topRows(d) = y;
  return stacked.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
}

// AP straight from the definition: precision at each relevant rank, averaged
// over the relevant set.
inline double naive_average_precision(const std::vector<std::string>& ranking,
                                      const std::vector<std::string>& relevant) {
  std::unordered_set<std::string> wanted(relevant.begin(), relevant.end());
  double sum = 0;
  int hits = 0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (!wanted.count(ranking[r])) continue;
    ++hits;
    double precision_at_r = double(hits) / double(r + 1);
    sum += precision_at_r;
  }
  return sum / double(wanted.size());
}

}  // namespace oracle
