#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ime/common.hpp"
#include "ime/dataset.hpp"
#include "ime/similarity.hpp"

namespace ime {

enum class GeodesicBackend { floyd_warshall, per_source };

// Pipeline parameters. k and omega are per-iteration lists; a single element
// stands for "same value every iteration" until normalize_config expands it.
struct IMEConfig {
  Index iterations = 2;
  std::vector<Index> k_per_iter = {10};
  std::vector<double> omega_per_iter = {2.0};
  Index target_dim = 8;
  ConversionKind conversion = {Conversion::t_distribution, false};
  bool use_second_order = true;
  GeodesicBackend geodesic_backend = GeodesicBackend::floyd_warshall;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0;
  std::sscanf(buf, "%lg", &back);
  if (back == v) return buf;
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

template <typename T, typename Fmt>
std::string join_list(const std::vector<T>& xs, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace detail

// Expand singleton k/omega lists to the iteration count and check invariants.
inline IMEConfig normalize_config(const IMEConfig& raw) {
  IMEConfig cfg = raw;
  if (cfg.iterations < 1) throw InvalidArgument("iterations must be positive");
  if (cfg.target_dim < 1) throw InvalidArgument("target dimension must be positive");
  if (cfg.k_per_iter.empty()) throw InvalidArgument("k list is empty");
  if (cfg.omega_per_iter.empty()) throw InvalidArgument("omega list is empty");
  if (Index(cfg.k_per_iter.size()) == 1)
    cfg.k_per_iter.assign(std::size_t(cfg.iterations), cfg.k_per_iter[0]);
  if (Index(cfg.omega_per_iter.size()) == 1)
    cfg.omega_per_iter.assign(std::size_t(cfg.iterations), cfg.omega_per_iter[0]);
  if (Index(cfg.k_per_iter.size()) != cfg.iterations)
    throw InvalidArgument("k list has " + std::to_string(cfg.k_per_iter.size()) +
                          " entries for " + std::to_string(cfg.iterations) + " iterations");
  if (Index(cfg.omega_per_iter.size()) != cfg.iterations)
    throw InvalidArgument("omega list has " + std::to_string(cfg.omega_per_iter.size()) +
                          " entries for " + std::to_string(cfg.iterations) + " iterations");
  for (Index k : cfg.k_per_iter)
    if (k < 1) throw InvalidArgument("k must be positive");
  for (double w : cfg.omega_per_iter)
    if (w < 0.0) throw InvalidArgument("omega must be non-negative");
  return cfg;
}

inline std::string serialize_config(const IMEConfig& raw) {
  IMEConfig cfg = normalize_config(raw);
  std::ostringstream out;
  out << "iter = " << cfg.iterations << '\n';
  out << "dim = " << cfg.target_dim << '\n';
  out << "k = "
      << detail::join_list(cfg.k_per_iter, [](Index k) { return std::to_string(k); }) << '\n';
  out << "omega = " << detail::join_list(cfg.omega_per_iter, detail::format_double) << '\n';
  out << "conv = " << (cfg.conversion.kind == Conversion::t_distribution ? "tdist" : "quad")
      << '\n';
  out << "center = " << (cfg.conversion.center ? "true" : "false") << '\n';
  out << "second_order = " << (cfg.use_second_order ? "true" : "false") << '\n';
  out << "geodesic = "
      << (cfg.geodesic_backend == GeodesicBackend::floyd_warshall ? "fw" : "sparse") << '\n';
  return std::move(out).str();
}

namespace detail {

inline bool parse_bool(const std::string& v, std::size_t line_no) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("line " + std::to_string(line_no) + ": expected a boolean, got '" + v + "'");
}

inline Index parse_index(const std::string& v, std::size_t line_no) {
  return Index(std::llround(parse_double(v, line_no)));
}

}  // namespace detail

// Applies "key = value" lines over the supplied defaults. Unknown keys are
// rejected so config typos fail loudly.
inline IMEConfig parse_config_text(const std::string& text, const IMEConfig& defaults = {}) {
  IMEConfig cfg = defaults;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key == "iter") {
      cfg.iterations = detail::parse_index(value, line_no);
    } else if (key == "dim") {
      cfg.target_dim = detail::parse_index(value, line_no);
    } else if (key == "k") {
      cfg.k_per_iter.clear();
      for (const auto& tok : detail::split(value, ','))
        cfg.k_per_iter.push_back(detail::parse_index(detail::trim(tok), line_no));
    } else if (key == "omega") {
      cfg.omega_per_iter.clear();
      for (const auto& tok : detail::split(value, ','))
        cfg.omega_per_iter.push_back(detail::parse_double(detail::trim(tok), line_no));
    } else if (key == "conv") {
      if (value == "tdist")
        cfg.conversion.kind = Conversion::t_distribution;
      else if (value == "quad")
        cfg.conversion.kind = Conversion::quadratic;
      else
        throw ParseError("line " + std::to_string(line_no) + ": conv must be tdist or quad");
    } else if (key == "center") {
      cfg.conversion.center = detail::parse_bool(value, line_no);
    } else if (key == "second_order") {
      cfg.use_second_order = detail::parse_bool(value, line_no);
    } else if (key == "geodesic") {
      if (value == "fw")
        cfg.geodesic_backend = GeodesicBackend::floyd_warshall;
      else if (value == "sparse")
        cfg.geodesic_backend = GeodesicBackend::per_source;
      else
        throw ParseError("line " + std::to_string(line_no) + ": geodesic must be fw or sparse");
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

inline IMEConfig load_config(const std::string& path, const IMEConfig& defaults = {}) {
  return parse_config_text(detail::read_file_bytes(path), defaults);
}

}  // namespace ime
