#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "ime/common.hpp"
#include "ime/config.hpp"
#include "ime/dataset.hpp"
#include "ime/graph.hpp"
#include "ime/similarity.hpp"
#include "ime/spectral.hpp"

namespace ime {

struct StageTiming {
  std::string stage;
  double seconds = 0;
};

// Everything the final iteration produced. The graph and geodesic matrix are
// kept because the graph-linked query baseline needs them.
struct FitResult {
  Embedding embedding;
  WeightedGraph final_graph;
  DistanceMatrix final_geodesics;
  IMEConfig config;  // normalized
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename F>
  auto run(const std::string& label, F&& f) {
    auto start = std::chrono::steady_clock::now();
    auto result = f();
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    sink_.push_back({label, elapsed.count()});
    return result;
  }

 private:
  std::vector<StageTiming>& sink_;
};

}  // namespace detail

// Algorithm: per iteration, rebuild the k-NN graph on the current
// representation, square it for second-order proximity, run all-pairs
// shortest paths, correct the geodesic similarity with the euclidean one,
// and eigen-embed; the embedding feeds the next iteration.
inline FitResult ime_fit_full(const DescriptorSet& set, const IMEConfig& raw_config,
                              const SpectralOptions& spectral_opts = {}) {
  validate_descriptor_set(set);
  FitResult result;
  result.config = normalize_config(raw_config);
  const IMEConfig& cfg = result.config;
  const Index d = set.rows();
  if (cfg.target_dim > d)
    throw InvalidArgument("target dimension " + std::to_string(cfg.target_dim) +
                          " exceeds database size " + std::to_string(d));
  for (Index k : cfg.k_per_iter)
    if (k > d - 1)
      throw InvalidArgument("k=" + std::to_string(k) + " needs at least " + std::to_string(k + 1) +
                            " points, have " + std::to_string(d));

  detail::StageClock clock(result.timings);
  Matrix current = set.vectors;
  for (Index it = 0; it < cfg.iterations; ++it) {
    const std::string tag = "iter" + std::to_string(it + 1) + ".";
    DistanceMatrix d_x =
        clock.run(tag + "pairwise", [&] { return pairwise_euclidean(current); });
    WeightedGraph graph =
        clock.run(tag + "knn", [&] { return build_knn_graph(d_x, cfg.k_per_iter[std::size_t(it)]); });
    if (cfg.use_second_order)
      graph = clock.run(tag + "second_order", [&] { return second_order_graph(graph); });
    DistanceMatrix d_g = clock.run(tag + "geodesic", [&] {
      return cfg.geodesic_backend == GeodesicBackend::floyd_warshall
                 ? geodesic_distances(graph)
                 : geodesic_distances_sparse(graph);
    });
    Matrix similarity = clock.run(tag + "similarity", [&] {
      return corrected_similarity(d_g, d_x, cfg.omega_per_iter[std::size_t(it)], cfg.conversion);
    });
    // Release the d x d intermediates the eigensolver does not need; at large
    // d they dominate the peak footprint. The final iteration keeps the graph
    // and geodesics because the query baseline consumes them.
    d_x.dist = Matrix();
    if (it + 1 < cfg.iterations) {
      graph.weights = Matrix();
      d_g.dist = Matrix();
    }
    Embedding embedding = clock.run(
        tag + "eigensolve", [&] { return spectral_embed(similarity, cfg.target_dim, spectral_opts); });
    if (embedding.truncated())
      result.warnings.push_back("iteration " + std::to_string(it + 1) + ": only " +
                                std::to_string(embedding.dim()) + " of " +
                                std::to_string(cfg.target_dim) + " eigenvalues are positive");
    current = embedding.coords;
    if (it + 1 == cfg.iterations) {
      result.final_graph = std::move(graph);
      result.final_geodesics = std::move(d_g);
      result.embedding = std::move(embedding);
    }
  }
  return result;
}

inline Embedding ime_fit(const DescriptorSet& set, const IMEConfig& config,
                         const SpectralOptions& spectral_opts = {}) {
  return ime_fit_full(set, config, spectral_opts).embedding;
}

}  // namespace ime
