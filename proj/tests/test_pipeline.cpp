#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ime/common.hpp"
#include "ime/pipeline.hpp"
#include "ime/synthetic.hpp"
#include "support/oracles.hpp"

using namespace ime;

namespace {

DescriptorSet random_set(Index d, Index n, std::uint64_t seed) {
  detail::Rng rng(seed);
  DescriptorSet set;
  set.vectors.resize(d, n);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < n; ++j) set.vectors(i, j) = rng.gauss();
  return set;
}

}  // namespace

TEST_CASE("single iteration equals the hand-chained stages bit for bit") {
  DescriptorSet set = random_set(40, 6, 1);
  IMEConfig cfg;
  cfg.iterations = 1;
  cfg.k_per_iter = {6};
  cfg.omega_per_iter = {2.0};
  cfg.target_dim = 4;

  auto fit = ime_fit_full(set, cfg);

  auto d_x = pairwise_euclidean(set.vectors);
  auto graph = second_order_graph(build_knn_graph(d_x, 6));
  auto d_g = geodesic_distances(graph);
  auto sim = corrected_similarity(d_g, d_x, 2.0, cfg.conversion);
  auto emb = spectral_embed(sim, 4);

  REQUIRE(fit.embedding.dim() == emb.dim());
  CHECK((fit.embedding.coords.array() == emb.coords.array()).all());
  CHECK((fit.embedding.eigenvalues.array() == emb.eigenvalues.array()).all());
  CHECK((fit.final_graph.weights.array() == graph.weights.array()).all());
  CHECK((fit.final_geodesics.dist.array() == d_g.dist.array()).all());
}

TEST_CASE("two iterations feed the first embedding into the second") {
  DescriptorSet set = random_set(35, 5, 2);
  IMEConfig cfg;
  cfg.iterations = 2;
  cfg.k_per_iter = {5};
  cfg.target_dim = 3;

  auto fit = ime_fit_full(set, cfg);

  // Reproduce by running two explicit single-iteration passes.
  IMEConfig one = cfg;
  one.iterations = 1;
  auto first = ime_fit(set, one);
  DescriptorSet mid;
  mid.vectors = first.coords;
  auto second = ime_fit(mid, one);
  CHECK((fit.embedding.coords.array() == second.coords.array()).all());
}

TEST_CASE("fit is deterministic") {
  DescriptorSet set = random_set(50, 4, 3);
  IMEConfig cfg;
  cfg.k_per_iter = {7};
  cfg.target_dim = 4;
  auto a = ime_fit(set, cfg);
  auto b = ime_fit(set, cfg);
  CHECK((a.coords.array() == b.coords.array()).all());
}

TEST_CASE("iterations reproduce isomap when configured to") {
  // Iter=1, omega=0, first-order graph, centered quadratic conversion is
  // exactly classical MDS on the graph geodesics.
  auto roll = generate_swiss_roll(120, 0.0, 7);
  IMEConfig cfg;
  cfg.iterations = 1;
  cfg.k_per_iter = {8};
  cfg.omega_per_iter = {0.0};
  cfg.target_dim = 2;
  cfg.conversion = {Conversion::quadratic, true};
  cfg.use_second_order = false;

  auto fit = ime_fit_full(roll.set, cfg);
  REQUIRE(fit.final_geodesics.dist.allFinite());
  Matrix mds = oracle::classical_mds(fit.final_geodesics.dist, 2);

  // Compare through pairwise distances: eigenvector signs are arbitrary in
  // the oracle while coordinates are only defined up to isometry anyway.
  Matrix mine = pairwise_euclidean(fit.embedding.coords).dist;
  Matrix theirs = pairwise_euclidean(mds).dist;
  double rel = (mine - theirs).norm() / theirs.norm();
  CHECK(rel < 1e-9);
}

TEST_CASE("geodesic backends give the same embedding") {
  DescriptorSet set = random_set(45, 4, 9);
  IMEConfig cfg;
  cfg.k_per_iter = {6};
  cfg.target_dim = 3;
  cfg.geodesic_backend = GeodesicBackend::floyd_warshall;
  auto fw = ime_fit(set, cfg);
  cfg.geodesic_backend = GeodesicBackend::per_source;
  auto sp = ime_fit(set, cfg);
  REQUIRE(fw.dim() == sp.dim());
  CHECK((fw.coords - sp.coords).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("disconnection policy follows the conversion") {
  // Two well-separated clusters with small k: the knn graph splits.
  DescriptorSet set;
  set.vectors.resize(12, 2);
  detail::Rng rng(4);
  for (Index i = 0; i < 12; ++i) {
    double cx = i < 6 ? 0.0 : 1000.0;
    set.vectors(i, 0) = cx + rng.uniform(-1.0, 1.0);
    set.vectors(i, 1) = rng.uniform(-1.0, 1.0);
  }
  IMEConfig cfg;
  cfg.iterations = 1;
  cfg.k_per_iter = {2};
  cfg.target_dim = 2;
  cfg.use_second_order = false;

  cfg.conversion = {Conversion::quadratic, false};
  cfg.omega_per_iter = {0.0};
  CHECK_THROWS_AS(ime_fit(set, cfg), NumericalError);

  cfg.omega_per_iter = {2.0};  // euclidean correction rescues it
  CHECK_NOTHROW(ime_fit(set, cfg));

  cfg.omega_per_iter = {0.0};
  cfg.conversion = {Conversion::t_distribution, false};
  CHECK_NOTHROW(ime_fit(set, cfg));
}

TEST_CASE("argument validation happens before any work") {
  DescriptorSet set = random_set(10, 3, 5);
  IMEConfig cfg;
  cfg.target_dim = 11;
  cfg.k_per_iter = {3};
  CHECK_THROWS_AS(ime_fit(set, cfg), InvalidArgument);
  cfg.target_dim = 2;
  cfg.k_per_iter = {10};
  CHECK_THROWS_AS(ime_fit(set, cfg), InvalidArgument);
  cfg.k_per_iter = {9};  // k = d-1 is the maximum
  CHECK_NOTHROW(ime_fit(set, cfg));
}

TEST_CASE("per-iteration k and omega are honoured") {
  DescriptorSet set = random_set(30, 4, 6);
  IMEConfig varied;
  varied.iterations = 2;
  varied.k_per_iter = {4, 8};
  varied.omega_per_iter = {2.0, 0.5};
  varied.target_dim = 3;
  auto fit_varied = ime_fit(set, varied);

  IMEConfig flat = varied;
  flat.k_per_iter = {4, 4};
  flat.omega_per_iter = {2.0, 2.0};
  auto fit_flat = ime_fit(set, flat);
  CHECK((fit_varied.coords - fit_flat.coords).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("stage timings cover every stage of every iteration") {
  DescriptorSet set = random_set(25, 3, 8);
  IMEConfig cfg;
  cfg.iterations = 2;
  cfg.k_per_iter = {4};
  cfg.target_dim = 2;
  auto fit = ime_fit_full(set, cfg);
  // 6 stages per iteration with second order on.
  REQUIRE(fit.timings.size() == 12);
  CHECK(fit.timings[0].stage == "iter1.pairwise");
  CHECK(fit.timings[5].stage == "iter1.eigensolve");
  CHECK(fit.timings[6].stage == "iter2.pairwise");
  for (const auto& t : fit.timings) CHECK(t.seconds >= 0.0);

  cfg.use_second_order = false;
  CHECK(ime_fit_full(set, cfg).timings.size() == 10);
}

TEST_CASE("truncation produces a warning and a narrower embedding") {
  // A tiny set under the quadratic centered conversion has limited positive
  // spectrum; ask for more dimensions than it can support.
  DescriptorSet set = random_set(6, 2, 10);
  IMEConfig cfg;
  cfg.iterations = 1;
  cfg.k_per_iter = {5};
  cfg.omega_per_iter = {0.0};
  cfg.target_dim = 6;
  cfg.conversion = {Conversion::quadratic, true};
  cfg.use_second_order = false;
  auto fit = ime_fit_full(set, cfg);
  // Centering kills at least one direction (the constant vector).
  CHECK(fit.embedding.dim() < 6);
  CHECK_FALSE(fit.warnings.empty());
}

TEST_CASE("embedding rows track the input rows") {
  DescriptorSet set = random_set(28, 5, 11);
  IMEConfig cfg;
  cfg.k_per_iter = {5};
  cfg.target_dim = 4;
  auto emb = ime_fit(set, cfg);
  CHECK(emb.rows() == 28);
  CHECK(emb.dim() == 4);
}
