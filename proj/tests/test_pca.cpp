#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ime/common.hpp"
#include "ime/pca.hpp"

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

TEST_CASE("points on a line project onto that line") {
  DescriptorSet set;
  set.vectors.resize(5, 2);
  // y = 2x plus an offset; the single principal direction is (1,2)/sqrt(5).
  for (Index i = 0; i < 5; ++i) {
    double t = double(i) - 2.0;
    set.vectors(i, 0) = t + 10.0;
    set.vectors(i, 1) = 2.0 * t - 3.0;
  }
  auto model = pca_fit(set, 1);
  CHECK(model.mean(0) == Catch::Approx(10.0));
  CHECK(model.mean(1) == Catch::Approx(-3.0));
  double inv = 1.0 / std::sqrt(5.0);
  CHECK(std::abs(model.components(0, 0)) == Catch::Approx(inv));
  CHECK(std::abs(model.components(1, 0)) == Catch::Approx(2.0 * inv));
  // Covariance [[2.5, 5], [5, 10]] has eigenvalues 12.5 and 0.
  CHECK(model.explained(0) == Catch::Approx(12.5));

  // Projections recover signed distances along the line (up to global sign).
  Vector proj = pca_apply(model, set).col(0);
  for (Index i = 1; i < 5; ++i)
    CHECK(std::abs(proj(i) - proj(i - 1)) == Catch::Approx(std::sqrt(5.0)));
}

TEST_CASE("projected data has zero mean") {
  auto set = random_set(40, 6, 1);
  auto model = pca_fit(set, 4);
  Matrix proj = pca_apply(model, set);
  CHECK(proj.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("components are orthonormal and variances non-increasing") {
  auto set = random_set(50, 8, 2);
  auto model = pca_fit(set, 8);
  Matrix gram = model.components.transpose() * model.components;
  CHECK((gram - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
  for (Index p = 1; p < 8; ++p) CHECK(model.explained(p) <= model.explained(p - 1));
  CHECK(model.explained.minCoeff() >= 0.0);
}

TEST_CASE("explained variances match the projected sample variances") {
  auto set = random_set(60, 5, 3);
  auto model = pca_fit(set, 5);
  Matrix proj = pca_apply(model, set);
  for (Index p = 0; p < 5; ++p) {
    double var = proj.col(p).squaredNorm() / double(60 - 1);
    CHECK(var == Catch::Approx(model.explained(p)).epsilon(1e-10));
  }
}

TEST_CASE("full-dimensional pca is an isometry on the data") {
  auto set = random_set(30, 6, 4);
  auto model = pca_fit(set, 6);
  Matrix proj = pca_apply(model, set);
  // Pairwise distances survive the orthogonal change of basis.
  for (Index i = 0; i < 30; ++i)
    for (Index j = i + 1; j < 30; ++j) {
      double orig = (set.vectors.row(i) - set.vectors.row(j)).norm();
      double mapped = (proj.row(i) - proj.row(j)).norm();
      CHECK(mapped == Catch::Approx(orig).epsilon(1e-10));
    }
}

TEST_CASE("full-dimensional pca reconstructs the data") {
  auto set = random_set(25, 4, 5);
  auto model = pca_fit(set, 4);
  Matrix proj = pca_apply(model, set);
  Matrix back = (proj * model.components.transpose()).rowwise() + model.mean.transpose();
  CHECK((back - set.vectors).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("truncated pca minimizes reconstruction error") {
  // Anisotropic data: variance 100, 10, 1, 0.1 along four fixed axes.
  detail::Rng rng(6);
  DescriptorSet set;
  set.vectors.resize(200, 4);
  double scales[4] = {10.0, 3.2, 1.0, 0.3};
  for (Index i = 0; i < 200; ++i)
    for (Index j = 0; j < 4; ++j) set.vectors(i, j) = scales[j] * rng.gauss();
  auto model = pca_fit(set, 2);
  // The two kept directions must be the two high-variance axes.
  CHECK(std::abs(model.components(0, 0)) == Catch::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(model.components(1, 1)) == Catch::Approx(1.0).epsilon(0.05));
  CHECK(model.explained(0) > model.explained(1));
  CHECK(model.explained(0) == Catch::Approx(100.0).epsilon(0.35));
}

TEST_CASE("batch application equals per-row application bit for bit") {
  auto set = random_set(20, 5, 7);
  auto model = pca_fit(set, 3);
  auto queries = random_set(9, 5, 8);
  Matrix batch = pca_apply(model, queries);
  for (Index i = 0; i < queries.rows(); ++i) {
    Vector one = pca_apply(model, Vector(queries.vectors.row(i).transpose()));
    CHECK((batch.row(i).transpose().array() == one.array()).all());
  }
}

TEST_CASE("pca validates its arguments") {
  auto set = random_set(10, 4, 9);
  CHECK_THROWS_AS(pca_fit(set, 0), InvalidArgument);
  CHECK_THROWS_AS(pca_fit(set, 5), InvalidArgument);
  DescriptorSet tiny = random_set(1, 4, 10);
  CHECK_THROWS_AS(pca_fit(tiny, 1), InvalidArgument);

  auto model = pca_fit(set, 2);
  Vector bad(3);
  bad.setZero();
  CHECK_THROWS_AS(pca_apply(model, bad), InvalidArgument);
  CHECK_THROWS_AS(pca_apply(model, random_set(2, 3, 11)), InvalidArgument);
}

TEST_CASE("fit is deterministic including component signs") {
  auto set = random_set(35, 6, 12);
  auto a = pca_fit(set, 4);
  auto b = pca_fit(set, 4);
  CHECK((a.components.array() == b.components.array()).all());
  CHECK((a.explained.array() == b.explained.array()).all());
}

TEST_CASE("m capped by the row count on short datasets") {
  auto set = random_set(3, 10, 13);
  CHECK_NOTHROW(pca_fit(set, 3));
  CHECK_THROWS_AS(pca_fit(set, 4), InvalidArgument);
}
