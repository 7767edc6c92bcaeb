#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "ime/bench.hpp"
#include "ime/common.hpp"

using namespace ime;

namespace {

IMEConfig small_config() {
  IMEConfig cfg;
  cfg.iterations = 1;
  cfg.k_per_iter = {8};
  cfg.target_dim = 2;
  return cfg;
}

}  // namespace

TEST_CASE("timing bench produces one report per method and size") {
  auto reports = timing_bench(small_config(), {60, 90}, 1);
  REQUIRE(reports.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& r = reports[i];
    CHECK((r.method == "ime_layer" || r.method == "ime_graph_query" || r.method == "pca"));
    CHECK(r.d == (i < 3 ? 60 : 90));
    CHECK(r.m >= 1);
    CHECK(r.embed_ms >= 0.0);
    CHECK(r.rank_ms >= 0.0);
    CHECK(r.map >= 0.0);
    CHECK(r.map <= 1.0);
    CHECK(r.threads == 1);
    CHECK(r.iter == 1);
    CHECK(r.k == "8");
  }
  CHECK(reports[0].method == "ime_layer");
  CHECK(reports[1].method == "ime_graph_query");
  CHECK(reports[2].method == "pca");
}

TEST_CASE("map does not depend on the repetition count") {
  auto once = timing_bench(small_config(), {70}, 1);
  auto thrice = timing_bench(small_config(), {70}, 3);
  REQUIRE(once.size() == thrice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].map == thrice[i].map);
    CHECK(once[i].method == thrice[i].method);
    CHECK(once[i].m == thrice[i].m);
  }
}

TEST_CASE("bench honours the lift dimension option") {
  BenchOptions opt;
  opt.lift_dim = 16;
  auto reports = timing_bench(small_config(), {60}, 1, opt);
  // Lifted input changes nothing about the report schema; the embedding is
  // still 2-d, and the isometric lift keeps retrieval quality intact.
  REQUIRE(reports.size() == 3);
  auto plain = timing_bench(small_config(), {60}, 1);
  CHECK(reports[1].map == Catch::Approx(plain[1].map).margin(1e-9));
}

TEST_CASE("bench validates its arguments") {
  CHECK_THROWS_AS(timing_bench(small_config(), {60}, 0), InvalidArgument);
  CHECK_THROWS_AS(timing_bench(small_config(), {}, 1), InvalidArgument);
}

TEST_CASE("tsv output is one header plus one line per report") {
  auto reports = timing_bench(small_config(), {60}, 1);
  std::ostringstream out;
  write_bench_tsv(out, reports);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "method\td\tm\tk\tomega\titer\tembed_ms\trank_ms\tmap\tthreads");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), '\t') == 9);
  }
  CHECK(rows == reports.size());
}

TEST_CASE("record output is one json object per line") {
  auto reports = timing_bench(small_config(), {60}, 1);
  std::ostringstream out;
  write_bench_records(out, reports);
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.front() == '{');
    CHECK(line.back() == '}');
    CHECK(line.find("\"method\":\"") != std::string::npos);
    CHECK(line.find("\"map\":") != std::string::npos);
  }
  CHECK(rows == reports.size());
}
