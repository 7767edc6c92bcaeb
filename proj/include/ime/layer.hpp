#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "ime/common.hpp"
#include "ime/config.hpp"
#include "ime/dataset.hpp"
#include "ime/fingerprint.hpp"
#include "ime/pipeline.hpp"

namespace ime {

// The distilled linear map: an n x m matrix applied as x -> M^T x. Provenance
// records the pipeline that produced the training targets plus a content hash
// of the training descriptors, so mismatched layer/data pairs are detectable.
struct IMELayer {
  Matrix weights;
  double alpha = 1.0;
  IMEConfig config;
  Fingerprint fingerprint{};

  Index input_dim() const { return weights.rows(); }
  Index output_dim() const { return weights.cols(); }
};

// Content hash of the descriptor payload (as stored on disk: float32
// row-major plus dimensions) and the serialized pipeline config.
inline Fingerprint dataset_fingerprint(const DescriptorSet& set, const std::string& config_text) {
  detail::Sha256 h;
  std::uint64_t dims[2] = {std::uint64_t(set.rows()), std::uint64_t(set.dim())};
  h.update(dims, sizeof(dims));
  std::vector<float> row(std::size_t(set.dim()));
  for (Index i = 0; i < set.rows(); ++i) {
    for (Index j = 0; j < set.dim(); ++j) row[std::size_t(j)] = float(set.vectors(i, j));
    h.update(row.data(), row.size() * sizeof(float));
  }
  h.update(config_text.data(), config_text.size());
  return h.finish();
}

// Closed-form ridge solution of min ||M^T x_i - y_i||^2 + alpha ||M||^2:
// M = (X^T X + alpha I)^(-1) X^T Y, solved by Cholesky factorization rather
// than an explicit inverse, then polished by iterative refinement until the
// normal-equation residual meets the contract.
inline IMELayer fit_layer(const DescriptorSet& train, const Embedding& targets, double alpha,
                          const IMEConfig& provenance = {}) {
  if (alpha < 0.0) throw InvalidArgument("alpha must be non-negative");
  if (train.rows() != targets.rows())
    throw InvalidArgument("training set has " + std::to_string(train.rows()) +
                          " rows, targets have " + std::to_string(targets.rows()));
  const Matrix& x = train.vectors;   // d x n
  const Matrix& y = targets.coords;  // d x m

  Matrix gram = x.transpose() * x;
  gram.diagonal().array() += alpha;
  Matrix rhs = x.transpose() * y;

  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError(alpha == 0.0
                             ? "gram matrix is singular at alpha=0; use alpha > 0"
                             : "cholesky factorization failed");
  Matrix m = llt.solve(rhs);
  double rhs_norm = rhs.norm();
  double residual = (gram * m - rhs).norm();
  for (int refine = 0; refine < 3 && residual > 1e-12 * std::max(rhs_norm, 1.0); ++refine) {
    m += llt.solve((rhs - gram * m).eval());
    residual = (gram * m - rhs).norm();
  }
  if (rhs_norm > 0.0 && residual / rhs_norm > 1e-8)
    throw NumericalError("normal-equation residual " + std::to_string(residual / rhs_norm) +
                         " exceeds 1e-8; the system is too ill-conditioned (alpha=" +
                         detail::format_double(alpha) + ")");
  if (!m.allFinite()) throw NumericalError("ridge solution contains non-finite weights");

  IMELayer layer;
  layer.weights = std::move(m);
  layer.alpha = alpha;
  layer.config = normalize_config(provenance);
  layer.fingerprint = dataset_fingerprint(train, serialize_config(layer.config));
  return layer;
}

inline Vector apply_layer(const IMELayer& layer, const Vector& query) {
  if (query.size() != layer.input_dim())
    throw InvalidArgument("query dimension " + std::to_string(query.size()) +
                          " does not match layer input " + std::to_string(layer.input_dim()));
  return (query.transpose() * layer.weights).transpose();
}

// Batch application, row per query; computed row-by-row with the same kernel
// as the single-query overload so batch and single results are bit-identical.
inline Matrix apply_layer(const IMELayer& layer, const DescriptorSet& queries) {
  if (queries.dim() != layer.input_dim())
    throw InvalidArgument("query dimension " + std::to_string(queries.dim()) +
                          " does not match layer input " + std::to_string(layer.input_dim()));
  Matrix out(queries.rows(), layer.output_dim());
  for (Index i = 0; i < queries.rows(); ++i)
    out.row(i) = queries.vectors.row(i) * layer.weights;
  return out;
}

namespace detail {

inline constexpr char kLayerMagic[6] = {'I', 'M', 'E', 'L', '1', '\0'};
inline constexpr unsigned char kLayerVersion = 1;

inline void put_f64_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  put_u64_le(out, bits);
}

inline double get_f64_le(const unsigned char* p) {
  return std::bit_cast<double>(get_u64_le(p));
}

}  // namespace detail

inline void save_layer(const IMELayer& layer, const std::string& path) {
  std::string bytes;
  const std::string config_text = serialize_config(layer.config);
  bytes.reserve(64 + std::size_t(layer.weights.size()) * 8 + config_text.size());
  bytes.append(detail::kLayerMagic, sizeof(detail::kLayerMagic));
  bytes.push_back(char(detail::kLayerVersion));
  detail::put_u64_le(bytes, std::uint64_t(layer.input_dim()));
  detail::put_u64_le(bytes, std::uint64_t(layer.output_dim()));
  detail::put_f64_le(bytes, layer.alpha);
  for (Index i = 0; i < layer.input_dim(); ++i)
    for (Index j = 0; j < layer.output_dim(); ++j) detail::put_f64_le(bytes, layer.weights(i, j));
  detail::put_u64_le(bytes, std::uint64_t(config_text.size()));
  bytes += config_text;
  bytes.append(reinterpret_cast<const char*>(layer.fingerprint.data()), layer.fingerprint.size());
  detail::write_file_bytes(path, bytes);
}

inline IMELayer load_layer(const std::string& path) {
  std::string bytes = detail::read_file_bytes(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  auto need = [&](std::size_t off, std::size_t len) {
    if (off + len > bytes.size())
      throw ParseError("'" + path + "': truncated at byte " + std::to_string(bytes.size()) +
                       ", need " + std::to_string(off + len));
  };
  need(0, 7);
  if (std::memcmp(p, detail::kLayerMagic, sizeof(detail::kLayerMagic)) != 0)
    throw ParseError("'" + path + "': bad magic at byte 0");
  if (p[6] != detail::kLayerVersion)
    throw ParseError("'" + path + "': unsupported layer version " + std::to_string(p[6]) +
                     " (supported: 1)");
  need(7, 24);
  std::uint64_t n = detail::get_u64_le(p + 7);
  std::uint64_t m = detail::get_u64_le(p + 15);
  if (n == 0 || m == 0 || n > (1u << 24) || m > (1u << 24))
    throw ParseError("'" + path + "': implausible layer shape " + std::to_string(n) + "x" +
                     std::to_string(m));
  IMELayer layer;
  layer.alpha = detail::get_f64_le(p + 23);
  std::size_t off = 31;
  need(off, std::size_t(n * m) * 8);
  layer.weights.resize(Index(n), Index(m));
  for (Index i = 0; i < Index(n); ++i)
    for (Index j = 0; j < Index(m); ++j, off += 8)
      layer.weights(i, j) = detail::get_f64_le(p + off);
  need(off, 8);
  std::uint64_t config_len = detail::get_u64_le(p + off);
  off += 8;
  need(off, std::size_t(config_len) + 32);
  layer.config = parse_config_text(bytes.substr(off, std::size_t(config_len)));
  off += std::size_t(config_len);
  std::memcpy(layer.fingerprint.data(), p + off, 32);
  off += 32;
  if (off != bytes.size())
    throw ParseError("'" + path + "': " + std::to_string(bytes.size() - off) +
                     " trailing bytes at byte " + std::to_string(off));
  if (!layer.weights.allFinite())
    throw ParseError("'" + path + "': non-finite weights");
  return layer;
}

// Everything the slow graph-linked query baseline needs, captured from one
// ime_fit run so graph, geodesics and eigenpairs are mutually consistent.
struct GraphQueryContext {
  DescriptorSet train;
  WeightedGraph graph;
  DistanceMatrix geodesics;
  Embedding embedding;
  ConversionKind conversion;
  double omega = 0.0;
  Index k = 1;
  Fingerprint fingerprint{};
};

inline GraphQueryContext make_query_context(const DescriptorSet& train, FitResult fit,
                                            Index query_k = 0) {
  const auto& cfg = fit.config;
  GraphQueryContext ctx;
  ctx.train = train;
  ctx.graph = std::move(fit.final_graph);
  ctx.geodesics = std::move(fit.final_geodesics);
  ctx.embedding = std::move(fit.embedding);
  ctx.conversion = cfg.conversion;
  ctx.omega = cfg.omega_per_iter.back();
  ctx.k = query_k > 0 ? query_k : cfg.k_per_iter.back();
  if (ctx.k > train.rows()) throw InvalidArgument("query k exceeds training size");
  ctx.fingerprint = dataset_fingerprint(train, serialize_config(cfg));
  return ctx;
}

// Graph-linked out-of-sample embedding: link the query to its k nearest
// training points, take the shortest geodesic through those links, convert
// to corrected similarity, and project onto the stored eigenpairs with
// out_p = s.v_p / sqrt(lambda_p).
inline Vector embed_query_via_graph(const GraphQueryContext& ctx, const Vector& query) {
  if (query.size() != ctx.train.dim())
    throw InvalidArgument("query dimension " + std::to_string(query.size()) +
                          " does not match training dimension " + std::to_string(ctx.train.dim()));
  const Index d = ctx.train.rows();
  Vector d_euc = (ctx.train.vectors.rowwise() - query.transpose()).rowwise().norm();

  std::vector<Index> order(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) order[std::size_t(i)] = i;
  auto by_dist = [&](Index a, Index b) {
    return d_euc(a) < d_euc(b) || (d_euc(a) == d_euc(b) && a < b);
  };
  Index k = std::min(ctx.k, d);
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), by_dist);

  Vector d_geo = Vector::Constant(d, kInfinity);
  for (Index t = 0; t < k; ++t) {
    Index link = order[std::size_t(t)];
    // Any graph path from the query must leave through one of its links, so
    // min over links of (euclidean hop + stored geodesic) is exact.
    d_geo = d_geo.cwiseMin((ctx.geodesics.dist.col(link).array() + d_euc(link)).matrix());
  }

  const bool quadratic = ctx.conversion.kind == Conversion::quadratic;
  bool has_inf = !d_geo.allFinite();
  if (quadratic && has_inf && ctx.omega == 0.0 && !ctx.conversion.center)
    throw NumericalError("query unreachable through the graph under the quadratic conversion");
  Vector s(d);
  for (Index j = 0; j < d; ++j) s(j) = detail::convert_one(d_geo(j), ctx.conversion.kind);
  if (quadratic && has_inf) {
    double floor = 0.0;
    for (Index j = 0; j < d; ++j)
      if (std::isfinite(s(j))) floor = std::min(floor, s(j));
    double cap = floor - std::abs(floor);
    for (Index j = 0; j < d; ++j)
      if (!std::isfinite(s(j))) s(j) = cap;
  }
  if (ctx.omega > 0.0)
    for (Index j = 0; j < d; ++j)
      s(j) += ctx.omega * detail::convert_one(d_euc(j), ctx.conversion.kind);

  Vector projected = ctx.embedding.eigenvectors.transpose() * s;
  for (Index p = 0; p < projected.size(); ++p)
    projected(p) /= std::sqrt(ctx.embedding.eigenvalues(p));
  return projected;
}

}  // namespace ime
