// ime: command-line front end for the iterative manifold embedding library.
// Subcommands: generate, fit, embed, eval, sweep, bench. Exit codes: 0 ok,
// 2 invalid argument, 3 I/O, 4 numerical failure, 5 referential error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ime/ime.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ime::Index> parse_index_list(const std::string& text, const std::string& flag) {
  std::vector<ime::Index> out;
  for (const auto& tok : ime::detail::split(text, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(ime::detail::trim(tok), &used);
      if (used != ime::detail::trim(tok).size()) throw std::invalid_argument(tok);
      out.push_back(ime::Index(v));
    } catch (const std::exception&) {
      throw ime::InvalidArgument(flag + ": '" + tok + "' is not an integer");
    }
  }
  if (out.empty()) throw ime::InvalidArgument(flag + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& tok : ime::detail::split(text, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(ime::detail::trim(tok), &used);
      if (used != ime::detail::trim(tok).size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ime::InvalidArgument(flag + ": '" + tok + "' is not a number");
    }
  }
  if (out.empty()) throw ime::InvalidArgument(flag + ": empty list");
  return out;
}

template <typename T>
std::vector<T> dedup_with_warning(std::vector<T> values, const std::string& flag) {
  std::vector<T> out;
  std::size_t dropped = 0;
  for (const T& v : values) {
    if (std::find(out.begin(), out.end(), v) == out.end())
      out.push_back(v);
    else
      ++dropped;
  }
  if (dropped)
    std::cerr << "warning: " << flag << ": dropped " << dropped << " duplicate value(s)\n";
  return out;
}

ime::DescriptorFormat to_format(const std::string& name) {
  return name == "csv" ? ime::DescriptorFormat::csv : ime::DescriptorFormat::binary;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  ime::detail::write_file_bytes(tmp, text);
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ime::IoError("cannot rename '" + tmp + "' to '" + path + "'");
}

std::string file_sha256_hex(const std::string& path) {
  return ime::to_hex(ime::sha256(ime::detail::read_file_bytes(path)));
}

ime::DescriptorSet load_with_ids(const std::string& path, ime::DescriptorFormat format,
                                 const char* role) {
  ime::DescriptorSet set = ime::load_descriptors(path, format);
  if (!set.has_ids())
    throw ime::InvalidArgument(std::string(role) + " '" + path +
                               "' has no ids; provide the .ids sidecar or an id column");
  return set;
}

// Pipeline flags shared by fit/sweep/bench, resolved with the documented
// precedence: explicit flags > --config file > built-in defaults.
struct PipelineFlags {
  std::string config_path;
  long long iter = 0;
  long long dim = 0;
  std::string k_list;
  std::string omega_list;
  std::string conv = "tdist";
  bool center = false;
  bool second_order = true;
  std::string geodesic = "fw";

  CLI::Option* config_opt = nullptr;
  CLI::Option* iter_opt = nullptr;
  CLI::Option* dim_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* omega_opt = nullptr;
  CLI::Option* conv_opt = nullptr;
  CLI::Option* center_opt = nullptr;
  CLI::Option* second_opt = nullptr;
  CLI::Option* geodesic_opt = nullptr;

  void attach(CLI::App* cmd) {
    config_opt = cmd->add_option("--config", config_path, "pipeline config file (key = value)");
    iter_opt = cmd->add_option("--iter", iter, "pipeline iterations");
    dim_opt = cmd->add_option("--dim", dim, "embedding dimension m");
    k_opt = cmd->add_option("--k", k_list, "neighbours per iteration (comma list)");
    omega_opt = cmd->add_option("--omega", omega_list, "correction weight per iteration (comma list)");
    conv_opt = cmd->add_option("--conv", conv, "similarity conversion")
                   ->check(CLI::IsMember({"tdist", "quad"}));
    center_opt = cmd->add_flag("--center,!--no-center", center,
                               "double-center the quadratic similarity");
    second_opt = cmd->add_flag("--second-order,!--no-second-order", second_order,
                               "use the second-order proximity graph");
    geodesic_opt = cmd->add_option("--geodesic", geodesic, "shortest-path backend")
                       ->check(CLI::IsMember({"fw", "sparse"}));
  }

  ime::IMEConfig resolve() const {
    ime::IMEConfig cfg;
    if (config_opt->count()) cfg = ime::load_config(config_path, cfg);
    if (iter_opt->count()) cfg.iterations = ime::Index(iter);
    if (dim_opt->count()) cfg.target_dim = ime::Index(dim);
    if (k_opt->count()) cfg.k_per_iter = parse_index_list(k_list, "--k");
    if (omega_opt->count()) cfg.omega_per_iter = parse_double_list(omega_list, "--omega");
    if (conv_opt->count())
      cfg.conversion.kind =
          conv == "quad" ? ime::Conversion::quadratic : ime::Conversion::t_distribution;
    if (center_opt->count()) cfg.conversion.center = center;
    if (second_opt->count()) cfg.use_second_order = second_order;
    if (geodesic_opt->count())
      cfg.geodesic_backend = geodesic == "sparse" ? ime::GeodesicBackend::per_source
                                                  : ime::GeodesicBackend::floyd_warshall;
    return cfg;
  }
};

json config_json(const ime::IMEConfig& normalized) {
  json j;
  j["iter"] = normalized.iterations;
  j["dim"] = normalized.target_dim;
  j["k"] = normalized.k_per_iter;
  j["omega"] = normalized.omega_per_iter;
  j["conv"] = normalized.conversion.kind == ime::Conversion::t_distribution ? "tdist" : "quad";
  j["center"] = normalized.conversion.center;
  j["second_order"] = normalized.use_second_order;
  j["geodesic"] =
      normalized.geodesic_backend == ime::GeodesicBackend::floyd_warshall ? "fw" : "sparse";
  return j;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  long long count = 1000;
  double noise = 0.0;
  double hole_fraction = 0.0;
  std::uint64_t seed = 0;
  long long lift_dim = 0;
  std::string out;
  std::string gt_path;
  std::string format = "binary";
};

int run_generate(const GenerateArgs& a) {
  if (a.hole_fraction > 0.0 && a.noise > 0.0)
    throw ime::InvalidArgument("--noise applies to the unholed roll only");
  ime::SyntheticData data =
      a.hole_fraction > 0.0
          ? ime::generate_holed_manifold(ime::Index(a.count), a.hole_fraction, a.seed)
          : ime::generate_swiss_roll(ime::Index(a.count), a.noise, a.seed);
  ime::DescriptorSet set = a.lift_dim > 0
                               ? ime::embed_in_dimension(data.set, ime::Index(a.lift_dim), a.seed)
                               : std::move(data.set);
  ime::save_descriptors(set, a.out, to_format(a.format));
  std::cout << "generated " << set.rows() << " points (dim " << set.dim() << ") -> " << a.out
            << '\n';
  if (!a.gt_path.empty()) {
    ime::save_ground_truth(data.gt, a.gt_path);
    std::cout << "ground truth: " << data.gt.queries.size() << " queries -> " << a.gt_path
              << '\n';
  }
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string format = "binary";
  bool l2 = false;
  double alpha = 1.0;
  std::uint64_t seed = 0x5eedba5eULL;
  std::string layer_path;
  std::string embedding_path;
  std::string manifest_path;
};

int run_fit(const FitArgs& a, const PipelineFlags& flags) {
  auto start = Clock::now();
  ime::DescriptorSet set = ime::load_descriptors(a.input, to_format(a.format));
  std::string input_sha = file_sha256_hex(a.input);
  if (a.l2) {
    auto norm = ime::l2_normalize(set);
    if (!norm.zero_rows.empty())
      std::cerr << "warning: " << norm.zero_rows.size() << " zero row(s) left unnormalized\n";
    set = std::move(norm.set);
  }
  ime::IMEConfig cfg = flags.resolve();
  ime::SpectralOptions spectral;
  spectral.seed = a.seed;

  ime::FitResult fit = ime::ime_fit_full(set, cfg, spectral);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';

  auto layer_start = Clock::now();
  ime::IMELayer layer = ime::fit_layer(set, fit.embedding, a.alpha, fit.config);
  fit.timings.push_back({"layer.fit", seconds_since(layer_start)});

  ime::save_layer(layer, a.layer_path);
  std::cout << "layer: " << layer.input_dim() << " -> " << layer.output_dim()
            << " (alpha = " << ime::detail::format_double(layer.alpha) << ") -> " << a.layer_path
            << '\n';

  if (!a.embedding_path.empty()) {
    ime::DescriptorSet dump;
    dump.vectors = fit.embedding.coords;
    dump.ids = set.ids;
    ime::save_descriptors(dump, a.embedding_path);
    std::cout << "embedding: " << dump.rows() << "x" << dump.dim() << " -> " << a.embedding_path
              << '\n';
  }

  std::string manifest_path =
      a.manifest_path.empty() ? a.layer_path + ".manifest.json" : a.manifest_path;
  json manifest;
  manifest["command"] = "fit";
  manifest["config"] = config_json(fit.config);
  manifest["alpha"] = a.alpha;
  manifest["inputs"]["descriptors"] = {
      {"path", a.input}, {"rows", set.rows()}, {"dim", set.dim()}, {"sha256", input_sha}};
  manifest["outputs"]["layer"] = a.layer_path;
  if (!a.embedding_path.empty()) manifest["outputs"]["embedding"] = a.embedding_path;
  json stages = json::array();
  for (const auto& t : fit.timings) stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  manifest["timings_s"] = stages;
  manifest["total_seconds"] = seconds_since(start);
  manifest["versions"] = {{"layer_format", 1}, {"descriptor_format", "IMEV1"}};
  manifest["layer_fingerprint"] = ime::to_hex(layer.fingerprint);
  manifest["warnings"] = fit.warnings;
  write_text_atomic(manifest_path, manifest.dump(2) + "\n");
  std::cout << "manifest: " << manifest_path << '\n';
  return 0;
}

// ------------------------------------------------------------------- embed

struct EmbedArgs {
  std::string layer_path;
  std::string input;
  std::string format = "binary";
  bool l2 = false;
  std::string out;
  std::string database_path;
  bool strict = false;
};

int run_embed(const EmbedArgs& a) {
  ime::IMELayer layer = ime::load_layer(a.layer_path);
  ime::DescriptorSet queries = ime::load_descriptors(a.input, to_format(a.format));
  if (a.l2) queries = ime::l2_normalize(queries).set;

  if (!a.database_path.empty()) {
    ime::DescriptorSet db = ime::load_descriptors(a.database_path, to_format(a.format));
    ime::Fingerprint expect =
        ime::dataset_fingerprint(db, ime::serialize_config(layer.config));
    if (expect != layer.fingerprint) {
      std::string msg = "layer fingerprint does not match database '" + a.database_path + "'";
      if (a.strict) throw ime::GroundTruthError(msg);
      std::cerr << "warning: " << msg << '\n';
    }
  }

  auto start = Clock::now();
  ime::Matrix mapped = ime::apply_layer(layer, queries);
  double total = seconds_since(start);

  ime::DescriptorSet out_set;
  out_set.vectors = std::move(mapped);
  out_set.ids = queries.ids;
  ime::save_descriptors(out_set, a.out);
  std::printf("embedded %lld queries in %.3f ms (%.6f ms/query)\n",
              static_cast<long long>(queries.rows()), total * 1e3,
              total * 1e3 / double(queries.rows()));
  std::cout << "coords: " << out_set.rows() << "x" << out_set.dim() << " -> " << a.out << '\n';
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string database;
  std::string queries;
  std::string format = "binary";
  std::string gt_path;
  std::string records_path;
};

int run_eval(const EvalArgs& a) {
  ime::DescriptorSet db = load_with_ids(a.database, to_format(a.format), "database");
  ime::DescriptorSet qs = load_with_ids(a.queries, to_format(a.format), "query set");
  if (db.dim() != qs.dim())
    throw ime::InvalidArgument("database dimension " + std::to_string(db.dim()) +
                               " does not match query dimension " + std::to_string(qs.dim()));
  ime::GroundTruth gt = ime::load_ground_truth(a.gt_path, db.ids);

  std::unordered_map<std::string, ime::Index> query_row;
  for (ime::Index i = 0; i < qs.rows(); ++i) query_row[qs.ids[std::size_t(i)]] = i;

  json records = json::array();
  double sum = 0.0;
  for (const auto& [qid, relevant] : gt.queries) {
    auto it = query_row.find(qid);
    if (it == query_row.end())
      throw ime::GroundTruthError("query '" + qid + "' has no row in '" + a.queries + "'");
    ime::RankedList ranked = ime::rank_by_distance(
        db.vectors, db.ids, ime::Vector(qs.vectors.row(it->second).transpose()), qid);
    double ap = ime::average_precision(ranked, relevant);
    sum += ap;
    std::printf("ap\t%s\t%.6f\n", qid.c_str(), ap);
    records.push_back({{"query", qid}, {"ap", ap}});
  }
  double map = sum / double(gt.queries.size());
  std::printf("map\t%.6f\n", map);

  if (!a.records_path.empty()) {
    std::string lines;
    for (const auto& r : records) lines += r.dump() + "\n";
    lines += json{{"map", map}}.dump() + "\n";
    ime::detail::write_file_bytes(a.records_path, lines);
  }
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string input;
  std::string format = "binary";
  std::string gt_path;
  long long count = 500;
  double noise = 0.0;
  double hole_fraction = 0.0;
  std::uint64_t seed = 0;
  long long lift_dim = 0;
  std::string sweep_iter, sweep_dim, sweep_k, sweep_omega;
  std::string records_path;
};

int run_sweep(const SweepArgs& a, const PipelineFlags& flags) {
  ime::IMEConfig base = ime::normalize_config(flags.resolve());

  ime::DescriptorSet set;
  ime::GroundTruth gt;
  if (!a.input.empty()) {
    if (a.gt_path.empty())
      throw ime::InvalidArgument("--input requires --gt for retrieval scoring");
    set = load_with_ids(a.input, to_format(a.format), "input");
    gt = ime::load_ground_truth(a.gt_path, set.ids);
  } else {
    ime::SyntheticData data =
        a.hole_fraction > 0.0
            ? ime::generate_holed_manifold(ime::Index(a.count), a.hole_fraction, a.seed)
            : ime::generate_swiss_roll(ime::Index(a.count), a.noise, a.seed);
    set = a.lift_dim > 0 ? ime::embed_in_dimension(data.set, ime::Index(a.lift_dim), a.seed)
                         : std::move(data.set);
    gt = std::move(data.gt);
  }

  auto iters = a.sweep_iter.empty()
                   ? std::vector<ime::Index>{base.iterations}
                   : dedup_with_warning(parse_index_list(a.sweep_iter, "--sweep-iter"),
                                        "--sweep-iter");
  auto dims = a.sweep_dim.empty()
                  ? std::vector<ime::Index>{base.target_dim}
                  : dedup_with_warning(parse_index_list(a.sweep_dim, "--sweep-dim"), "--sweep-dim");
  auto ks = a.sweep_k.empty()
                ? std::vector<ime::Index>{}
                : dedup_with_warning(parse_index_list(a.sweep_k, "--sweep-k"), "--sweep-k");
  auto omegas = a.sweep_omega.empty() ? std::vector<double>{}
                                      : dedup_with_warning(
                                            parse_double_list(a.sweep_omega, "--sweep-omega"),
                                            "--sweep-omega");

  std::unordered_map<std::string, ime::Index> row_of;
  for (ime::Index i = 0; i < set.rows(); ++i) row_of[set.ids[std::size_t(i)]] = i;

  ime::SpectralOptions spectral;
  spectral.seed = a.seed ^ 0x5eedba5eULL;

  // An unswept k/omega axis keeps the base setting. Uniform base lists shrink
  // back to a singleton so they re-expand to any swept iteration count;
  // non-uniform ones only make sense at the base iteration count.
  auto base_list = [](const auto& list, ime::Index it, const char* flag) {
    auto out = list;
    if (std::all_of(out.begin(), out.end(), [&](auto v) { return v == out.front(); }))
      out.resize(1);
    else if (it != ime::Index(list.size()))
      throw ime::InvalidArgument(std::string("--sweep-iter with a non-uniform ") + flag +
                                 " list is ambiguous; pass a single value");
    return out;
  };

  std::vector<ime::BenchReport> reports;
  for (ime::Index it : iters)
    for (ime::Index m : dims)
      for (std::size_t ki = 0; ki < std::max<std::size_t>(1, ks.size()); ++ki)
        for (std::size_t oi = 0; oi < std::max<std::size_t>(1, omegas.size()); ++oi) {
          ime::IMEConfig cfg = base;
          cfg.iterations = it;
          cfg.target_dim = m;
          // A swept k/omega value applies to every iteration.
          cfg.k_per_iter = ks.empty() ? base_list(base.k_per_iter, it, "--k")
                                      : std::vector<ime::Index>{ks[ki]};
          cfg.omega_per_iter = omegas.empty() ? base_list(base.omega_per_iter, it, "--omega")
                                              : std::vector<double>{omegas[oi]};

          auto fit_start = Clock::now();
          ime::FitResult fit = ime::ime_fit_full(set, cfg, spectral);
          double fit_seconds = seconds_since(fit_start);
          for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';

          auto eval_start = Clock::now();
          std::vector<ime::RankedList> lists;
          for (const auto& [qid, relevant] : gt.queries)
            lists.push_back(ime::rank_by_distance(
                fit.embedding.coords, set.ids,
                ime::Vector(fit.embedding.coords.row(row_of.at(qid)).transpose()), qid));
          double map = ime::mean_average_precision(lists, gt);
          double eval_seconds = seconds_since(eval_start);

          ime::BenchReport rep;
          rep.method = "ime";
          rep.d = set.rows();
          rep.m = fit.embedding.dim();
          rep.k = ime::detail::join_list(fit.config.k_per_iter,
                                         [](ime::Index k) { return std::to_string(k); });
          rep.omega =
              ime::detail::join_list(fit.config.omega_per_iter, ime::detail::format_double);
          rep.iter = fit.config.iterations;
          rep.embed_ms = fit_seconds * 1e3;
          rep.rank_ms = eval_seconds * 1e3;
          rep.map = map;
          reports.push_back(std::move(rep));
        }

  if (a.records_path.empty()) {
    ime::write_bench_records(std::cout, reports);
  } else {
    std::ostringstream out;
    ime::write_bench_records(out, reports);
    ime::detail::write_file_bytes(a.records_path, std::move(out).str());
    std::cout << "wrote " << reports.size() << " records -> " << a.records_path << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string sizes = "500,1000,2000";
  long long reps = 3;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  long long lift_dim = 0;
  double noise = 0.0;
  std::string records_path;
};

int run_bench(const BenchArgs& a, const PipelineFlags& flags) {
  ime::IMEConfig cfg = flags.resolve();
  ime::BenchOptions opt;
  opt.seed = a.seed;
  opt.alpha = a.alpha;
  opt.lift_dim = ime::Index(a.lift_dim);
  opt.noise = a.noise;
  opt.spectral.seed = a.seed ^ 0x5eedba5eULL;

  auto sizes = parse_index_list(a.sizes, "--sizes");
  auto reports = ime::timing_bench(cfg, sizes, ime::Index(a.reps), opt);
  ime::write_bench_tsv(std::cout, reports);
  if (!a.records_path.empty()) {
    std::ostringstream out;
    ime::write_bench_records(out, reports);
    ime::detail::write_file_bytes(a.records_path, std::move(out).str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iterative manifold embedding toolkit"};
  app.set_version_flag("--version", "ime 1.0.0");
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "synthesize a Swiss-roll descriptor set");
  gen_cmd->add_option("--count", gen.count, "number of points")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--noise", gen.noise, "gaussian noise sigma (unholed roll only)");
  gen_cmd->add_option("--hole-fraction", gen.hole_fraction,
                      "fraction of surface intervals to remove");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--lift-dim", gen.lift_dim, "isometrically lift into this many dimensions");
  gen_cmd->add_option("--out", gen.out, "output descriptor path")->required();
  gen_cmd->add_option("--gt", gen.gt_path, "ground-truth output path");
  gen_cmd->add_option("--format", gen.format, "descriptor format")
      ->check(CLI::IsMember({"binary", "csv"}));

  FitArgs fit;
  PipelineFlags fit_flags;
  CLI::App* fit_cmd = app.add_subcommand("fit", "learn an IME embedding and distill the layer");
  fit_cmd->add_option("--input", fit.input, "training descriptor file")->required();
  fit_cmd->add_option("--format", fit.format, "descriptor format")
      ->check(CLI::IsMember({"binary", "csv"}));
  fit_cmd->add_flag("--l2-normalize", fit.l2, "l2-normalize rows before fitting");
  fit_flags.attach(fit_cmd);
  fit_cmd->add_option("--alpha", fit.alpha, "ridge regularization weight");
  fit_cmd->add_option("--seed", fit.seed, "eigensolver seed (large inputs only)");
  fit_cmd->add_option("--layer", fit.layer_path, "output layer path")->required();
  fit_cmd->add_option("--embedding", fit.embedding_path, "optional embedding dump path");
  fit_cmd->add_option("--manifest", fit.manifest_path,
                      "manifest path (default: <layer>.manifest.json)");

  EmbedArgs embed;
  CLI::App* embed_cmd = app.add_subcommand("embed", "push query descriptors through a layer");
  embed_cmd->add_option("--layer", embed.layer_path, "fitted layer file")->required();
  embed_cmd->add_option("--input", embed.input, "query descriptor file")->required();
  embed_cmd->add_option("--format", embed.format, "descriptor format")
      ->check(CLI::IsMember({"binary", "csv"}));
  embed_cmd->add_flag("--l2-normalize", embed.l2, "l2-normalize rows before embedding");
  embed_cmd->add_option("--out", embed.out, "output coordinate path (binary)")->required();
  auto* db_opt = embed_cmd->add_option("--database", embed.database_path,
                                       "training descriptors for fingerprint verification");
  embed_cmd->add_flag("--strict", embed.strict, "treat fingerprint mismatch as an error")
      ->needs(db_opt);

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score rankings against ground truth");
  eval_cmd->add_option("--database", eval.database, "database coordinate file")->required();
  eval_cmd->add_option("--queries", eval.queries, "query coordinate file")->required();
  eval_cmd->add_option("--format", eval.format, "descriptor format")
      ->check(CLI::IsMember({"binary", "csv"}));
  eval_cmd->add_option("--gt", eval.gt_path, "ground-truth file")->required();
  eval_cmd->add_option("--records", eval.records_path, "per-query record output (jsonl)");

  SweepArgs sweep;
  PipelineFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter study over iter/dim/k/omega");
  sweep_cmd->add_option("--input", sweep.input, "descriptor file (default: synthetic roll)");
  sweep_cmd->add_option("--format", sweep.format, "descriptor format")
      ->check(CLI::IsMember({"binary", "csv"}));
  sweep_cmd->add_option("--gt", sweep.gt_path, "ground-truth file (required with --input)");
  sweep_cmd->add_option("--count", sweep.count, "synthetic point count")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--noise", sweep.noise, "synthetic noise sigma");
  sweep_cmd->add_option("--hole-fraction", sweep.hole_fraction, "synthetic hole fraction");
  sweep_cmd->add_option("--seed", sweep.seed, "generator seed");
  sweep_cmd->add_option("--lift-dim", sweep.lift_dim, "lift synthetic data to this dimension");
  sweep_flags.attach(sweep_cmd);
  sweep_cmd->add_option("--sweep-iter", sweep.sweep_iter, "iteration axis (comma list)");
  sweep_cmd->add_option("--sweep-dim", sweep.sweep_dim, "dimension axis (comma list)");
  sweep_cmd->add_option("--sweep-k", sweep.sweep_k, "neighbour-count axis (comma list)");
  sweep_cmd->add_option("--sweep-omega", sweep.sweep_omega, "correction-weight axis (comma list)");
  sweep_cmd->add_option("--records", sweep.records_path, "record output path (default: stdout)");

  BenchArgs bench;
  PipelineFlags bench_flags;
  CLI::App* bench_cmd = app.add_subcommand("bench", "timing and quality comparison");
  bench_cmd->add_option("--sizes", bench.sizes, "database sizes (comma list)");
  bench_cmd->add_option("--reps", bench.reps, "timing repetitions per query")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "generator seed");
  bench_cmd->add_option("--alpha", bench.alpha, "ridge regularization weight");
  bench_cmd->add_option("--lift-dim", bench.lift_dim, "lift synthetic data to this dimension");
  bench_cmd->add_option("--noise", bench.noise, "synthetic noise sigma");
  bench_flags.attach(bench_cmd);
  bench_cmd->add_option("--records", bench.records_path, "record output path (jsonl)");

  try {
    app.parse(argc, argv);
    if (*gen_cmd) return run_generate(gen);
    if (*fit_cmd) return run_fit(fit, fit_flags);
    if (*embed_cmd) return run_embed(embed);
    if (*eval_cmd) return run_eval(eval);
    if (*sweep_cmd) return run_sweep(sweep, sweep_flags);
    if (*bench_cmd) return run_bench(bench, bench_flags);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: invalid-argument: " << e.what() << '\n';
    return 2;
  } catch (const ime::InvalidArgument& e) {
    std::cerr << "error: invalid-argument: " << e.what() << '\n';
    return 2;
  } catch (const ime::IoError& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 3;
  } catch (const ime::NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << '\n';
    return 4;
  } catch (const ime::GroundTruthError& e) {
    std::cerr << "error: referential: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
}
