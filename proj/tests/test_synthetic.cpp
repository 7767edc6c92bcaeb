#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ime/synthetic.hpp"

using namespace ime;

TEST_CASE("swiss roll shape, classes and determinism") {
  auto a = generate_swiss_roll(1000, 0.0, 0);
  REQUIRE(a.set.rows() == 1000);
  REQUIRE(a.set.dim() == 3);
  REQUIRE(a.set.ids.size() == 1000);

  std::vector<int> class_size(10, 0);
  for (Index b : a.band_of) {
    REQUIRE(b >= 0);
    REQUIRE(b < 10);
    ++class_size[std::size_t(b)];
  }
  for (int s : class_size) CHECK(s == 100);

  auto b = generate_swiss_roll(1000, 0.0, 0);
  CHECK((a.set.vectors - b.set.vectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.set.ids == b.set.ids);
  CHECK(a.gt.queries == b.gt.queries);

  auto c = generate_swiss_roll(1000, 0.0, 1);
  CHECK((a.set.vectors - c.set.vectors).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("swiss roll points satisfy the surface equation at zero noise") {
  SwissRollGeometry geo;
  auto data = generate_swiss_roll(500, 0.0, 3, geo);
  for (Index i = 0; i < data.set.rows(); ++i) {
    double x = data.set.vectors(i, 0);
    double y = data.set.vectors(i, 1);
    double z = data.set.vectors(i, 2);
    // On the surface (t cos t, y, t sin t) the spiral radius recovers t.
    double t = std::hypot(x, z);
    CHECK(std::abs(x - t * std::cos(t)) < 1e-9);
    CHECK(std::abs(z - t * std::sin(t)) < 1e-9);
    CHECK(t >= geo.t_begin - 1e-9);
    CHECK(t <= geo.t_end + 1e-9);
    CHECK(y >= 0.0);
    CHECK(y <= geo.height);
  }
}

TEST_CASE("swiss roll validation") {
  CHECK_THROWS_AS(generate_swiss_roll(9, 0.0, 0), InvalidArgument);
  CHECK_THROWS_AS(generate_swiss_roll(100, -1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(generate_holed_manifold(100, 1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(generate_holed_manifold(100, -0.1, 0), InvalidArgument);
}

TEST_CASE("ground truth has one query per band, relevant = rest of band") {
  auto data = generate_swiss_roll(200, 0.0, 9);
  REQUIRE(data.gt.queries.size() == 10);
  std::set<std::string> query_ids;
  for (const auto& [query, relevant] : data.gt.queries) {
    query_ids.insert(query);
    CHECK(relevant.size() == 19);  // 20 per band minus the query
    // The query never lists itself as relevant.
    for (const auto& rel : relevant) CHECK(rel != query);
  }
  CHECK(query_ids.size() == 10);
}

TEST_CASE("hole_fraction=0 equals the plain swiss roll") {
  auto holed = generate_holed_manifold(400, 0.0, 17);
  auto plain = generate_swiss_roll(400, 0.0, 17);
  CHECK((holed.set.vectors - plain.set.vectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(holed.holes.empty());
}

TEST_CASE("holed manifold removes the advertised arc intervals") {
  SwissRollGeometry geo;
  auto data = generate_holed_manifold(1000, 0.3, 5, geo);
  REQUIRE(data.set.rows() == 1000);
  // 30% of the 40 sub-intervals are gone.
  CHECK(data.holes.size() == 12);

  const double s0 = 0.5 * (geo.t_begin * std::sqrt(1.0 + geo.t_begin * geo.t_begin) +
                           std::asinh(geo.t_begin));
  for (Index i = 0; i < data.set.rows(); ++i) {
    double t = std::hypot(data.set.vectors(i, 0), data.set.vectors(i, 2));
    double s = 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
    for (auto [a, b] : data.holes) {
      bool inside = s > a + 1e-9 && s < b - 1e-9;
      CHECK_FALSE(inside);
    }
    CHECK(s >= s0 - 1e-9);
  }

  auto again = generate_holed_manifold(1000, 0.3, 5, geo);
  CHECK((again.set.vectors - data.set.vectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(again.holes == data.holes);

  // Every band keeps at least one interval, so every class stays populated.
  std::vector<int> class_size(10, 0);
  for (Index b : data.band_of) ++class_size[std::size_t(b)];
  for (int s : class_size) CHECK(s == 100);
}

TEST_CASE("noise perturbs the surface by the requested scale") {
  auto clean = generate_swiss_roll(100, 0.0, 2);
  auto noisy = generate_swiss_roll(100, 0.05, 2);
  double max_shift = (noisy.set.vectors - clean.set.vectors).cwiseAbs().maxCoeff();
  CHECK(max_shift > 0.0);
  CHECK(max_shift < 0.05 * 6);  // six sigma
}

TEST_CASE("dimension lift preserves pairwise distances") {
  auto data = generate_swiss_roll(50, 0.0, 4);
  auto lifted = embed_in_dimension(data.set, 64, 99);
  REQUIRE(lifted.dim() == 64);
  REQUIRE(lifted.rows() == 50);
  CHECK(lifted.ids == data.set.ids);
  for (Index i = 0; i < 50; ++i)
    for (Index j = i + 1; j < 50; ++j) {
      double orig = (data.set.vectors.row(i) - data.set.vectors.row(j)).norm();
      double now = (lifted.vectors.row(i) - lifted.vectors.row(j)).norm();
      CHECK(std::abs(orig - now) < 1e-9);
    }
  CHECK_THROWS_AS(embed_in_dimension(data.set, 2, 0), InvalidArgument);
}
