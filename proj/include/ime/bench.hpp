#pragma once

#include <algorithm>
#include <chrono>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ime/common.hpp"
#include "ime/config.hpp"
#include "ime/eval.hpp"
#include "ime/layer.hpp"
#include "ime/pca.hpp"
#include "ime/pipeline.hpp"
#include "ime/synthetic.hpp"

namespace ime {

struct BenchReport {
  std::string method;
  Index d = 0;
  Index m = 0;
  std::string k;      // per-iteration list, comma-joined
  std::string omega;  // per-iteration list, comma-joined
  Index iter = 0;
  double embed_ms = 0;  // median per-query embedding time
  double rank_ms = 0;   // median per-query ranking time
  double map = 0;
  int threads = 1;  // the measured code path is single-threaded
};

struct BenchOptions {
  std::uint64_t seed = 0;
  double alpha = 1.0;
  Index lift_dim = 0;  // when > 0, lift the synthetic data to this dimension
  double noise = 0.0;
  SpectralOptions spectral;
};

namespace detail {

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

class QueryTimer {
 public:
  // Returns (median per-call seconds, one result per query); the callable is
  // run reps times per query and once untimed as warmup.
  template <typename F>
  static std::pair<double, std::vector<Vector>> run(const std::vector<Index>& queries,
                                                    Index reps, F&& embed) {
    std::vector<Vector> results;
    std::vector<double> samples;
    results.reserve(queries.size());
    samples.reserve(queries.size());
    if (!queries.empty()) (void)embed(queries.front());  // warmup
    for (Index q : queries) {
      auto start = std::chrono::steady_clock::now();
      Vector out;
      for (Index r = 0; r < reps; ++r) out = embed(q);
      std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      samples.push_back(elapsed.count() / double(reps));
      results.push_back(std::move(out));
    }
    return {median(std::move(samples)), std::move(results)};
  }
};

}  // namespace detail

inline std::vector<BenchReport> timing_bench(const IMEConfig& raw_config,
                                             const std::vector<Index>& sizes, Index repetitions,
                                             const BenchOptions& opt = {}) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be positive");
  if (sizes.empty()) throw InvalidArgument("size list is empty");
  IMEConfig cfg = normalize_config(raw_config);
  std::vector<BenchReport> reports;
  for (Index d : sizes) {
    SyntheticData data = generate_swiss_roll(d, opt.noise, opt.seed);
    DescriptorSet set = opt.lift_dim > 0 ? embed_in_dimension(data.set, opt.lift_dim, opt.seed)
                                         : std::move(data.set);
    GraphQueryContext ctx =
        make_query_context(set, ime_fit_full(set, cfg, opt.spectral));
    IMELayer layer = fit_layer(set, ctx.embedding, opt.alpha, cfg);
    PCAModel pca = pca_fit(set, std::min(ctx.embedding.dim(), std::min(set.dim(), d)));
    Matrix pca_db = pca_apply(pca, set);

    std::unordered_map<std::string, Index> row_of;
    for (Index i = 0; i < set.rows(); ++i) row_of[set.ids[std::size_t(i)]] = i;
    std::vector<Index> queries;
    for (const auto& [qid, rel] : data.gt.queries) queries.push_back(row_of.at(qid));

    BenchReport base;
    base.d = d;
    base.m = ctx.embedding.dim();
    base.k = detail::join_list(cfg.k_per_iter, [](Index k) { return std::to_string(k); });
    base.omega = detail::join_list(cfg.omega_per_iter, detail::format_double);
    base.iter = cfg.iterations;

    auto measure = [&](const std::string& method, const Matrix& db, auto&& embed) {
      auto [embed_s, coords] = detail::QueryTimer::run(queries, repetitions, embed);
      std::vector<double> rank_samples;
      std::vector<RankedList> lists;
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const std::string& qid = set.ids[std::size_t(queries[qi])];
        auto start = std::chrono::steady_clock::now();
        RankedList list = rank_by_distance(db, set.ids, coords[qi], qid);
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        rank_samples.push_back(elapsed.count());
        lists.push_back(std::move(list));
      }
      BenchReport rep = base;
      rep.method = method;
      rep.m = db.cols();
      rep.embed_ms = embed_s * 1e3;
      rep.rank_ms = detail::median(std::move(rank_samples)) * 1e3;
      rep.map = mean_average_precision(lists, data.gt);
      reports.push_back(std::move(rep));
    };

    measure("ime_layer", ctx.embedding.coords,
            [&](Index q) { return apply_layer(layer, Vector(set.vectors.row(q).transpose())); });
    measure("ime_graph_query", ctx.embedding.coords, [&](Index q) {
      return embed_query_via_graph(ctx, Vector(set.vectors.row(q).transpose()));
    });
    measure("pca", pca_db,
            [&](Index q) { return pca_apply(pca, Vector(set.vectors.row(q).transpose())); });
  }
  return reports;
}

inline void write_bench_tsv(std::ostream& out, const std::vector<BenchReport>& reports) {
  out << "method\td\tm\tk\tomega\titer\tembed_ms\trank_ms\tmap\tthreads\n";
  for (const auto& r : reports)
    out << r.method << '\t' << r.d << '\t' << r.m << '\t' << r.k << '\t' << r.omega << '\t'
        << r.iter << '\t' << detail::format_double(r.embed_ms) << '\t'
        << detail::format_double(r.rank_ms) << '\t' << detail::format_double(r.map) << '\t'
        << r.threads << '\n';
}

// Line-delimited records for plotting; one JSON object per report.
inline void write_bench_records(std::ostream& out, const std::vector<BenchReport>& reports) {
  for (const auto& r : reports)
    out << "{\"method\":\"" << r.method << "\",\"d\":" << r.d << ",\"m\":" << r.m << ",\"k\":\""
        << r.k << "\",\"omega\":\"" << r.omega << "\",\"iter\":" << r.iter
        << ",\"embed_ms\":" << detail::format_double(r.embed_ms)
        << ",\"rank_ms\":" << detail::format_double(r.rank_ms)
        << ",\"map\":" << detail::format_double(r.map) << ",\"threads\":" << r.threads << "}\n";
}

}  // namespace ime
