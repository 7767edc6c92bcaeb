#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "ime/common.hpp"
#include "ime/dataset.hpp"

namespace ime {

// Swiss-roll surface (t·cos t, y, t·sin t), t in [t_begin, t_end], y in [0, height].
// Relevance classes are contiguous arc-length bands, so Euclidean neighbourhoods
// (adjacent windings) and geodesic neighbourhoods (same band) disagree on purpose.
struct SwissRollGeometry {
  double t_begin = 1.5 * std::numbers::pi;
  double t_end = 4.5 * std::numbers::pi;
  double height = 24.0;
  Index bands = 10;
  Index intervals_per_band = 4;
};

struct SyntheticData {
  DescriptorSet set;
  GroundTruth gt;
  std::vector<Index> band_of;                       // band index per row
  std::vector<std::pair<double, double>> holes;     // removed arc-length intervals [a,b)
};

namespace detail {

// Arc length of the spiral (t cos t, t sin t) from 0: integral of sqrt(1+t^2).
inline double spiral_arc(double t) {
  return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

// Invert spiral_arc by Newton; monotone with derivative sqrt(1+t^2) >= 1.
inline double spiral_arc_inverse(double s, double t_guess) {
  double t = t_guess;
  for (int it = 0; it < 64; ++it) {
    double f = spiral_arc(t) - s;
    double step = f / std::sqrt(1.0 + t * t);
    t -= step;
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(t))) break;
  }
  return t;
}

}  // namespace detail

inline SyntheticData generate_holed_manifold(Index count, double hole_fraction,
                                             std::uint64_t seed,
                                             const SwissRollGeometry& geo = {}) {
  if (count < 10) throw InvalidArgument("count must be at least 10, got " + std::to_string(count));
  if (!(hole_fraction >= 0.0 && hole_fraction < 1.0))
    throw InvalidArgument("hole_fraction must lie in [0, 1), got " + std::to_string(hole_fraction));
  if (geo.bands < 1 || geo.intervals_per_band < 1 || !(geo.t_end > geo.t_begin) ||
      !(geo.height > 0.0))
    throw InvalidArgument("degenerate swiss-roll geometry");

  const double s0 = detail::spiral_arc(geo.t_begin);
  const double s1 = detail::spiral_arc(geo.t_end);
  const double total = s1 - s0;
  const Index bands = geo.bands;
  const Index per_band = geo.intervals_per_band;
  const Index n_intervals = bands * per_band;
  const double interval_len = total / double(n_intervals);

  detail::Rng rng(seed);

  // Remove whole sub-intervals, never emptying a band, so every relevance class
  // stays populated while the surface gets genuine coverage gaps.
  std::vector<bool> removed(std::size_t(n_intervals), false);
  std::vector<Index> kept_per_band(std::size_t(bands), per_band);
  Index want_removed = Index(std::llround(hole_fraction * double(n_intervals)));
  if (want_removed > 0) {
    std::vector<Index> order(static_cast<std::size_t>(n_intervals));
    for (Index i = 0; i < n_intervals; ++i) order[std::size_t(i)] = i;
    for (Index i = n_intervals - 1; i > 0; --i)
      std::swap(order[std::size_t(i)], order[rng.below(std::uint64_t(i + 1))]);
    Index done = 0;
    for (Index idx : order) {
      if (done == want_removed) break;
      Index band = idx / per_band;
      if (kept_per_band[std::size_t(band)] <= 1) continue;
      removed[std::size_t(idx)] = true;
      --kept_per_band[std::size_t(band)];
      ++done;
    }
  }

  SyntheticData out;
  for (Index i = 0; i < n_intervals; ++i)
    if (removed[std::size_t(i)])
      out.holes.emplace_back(s0 + double(i) * interval_len, s0 + double(i + 1) * interval_len);

  // Stratified band quotas: count/bands each, remainder to the first bands.
  std::vector<Index> quota(std::size_t(bands), count / bands);
  for (Index b = 0; b < count % bands; ++b) ++quota[std::size_t(b)];

  out.set.vectors.resize(count, 3);
  out.set.ids.reserve(std::size_t(count));
  out.band_of.resize(std::size_t(count));

  Index row = 0;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(bands));
  for (Index b = 0; b < bands; ++b) {
    std::vector<Index> kept;
    for (Index i = 0; i < per_band; ++i)
      if (!removed[std::size_t(b * per_band + i)]) kept.push_back(b * per_band + i);
    for (Index q = 0; q < quota[std::size_t(b)]; ++q, ++row) {
      Index interval = kept[rng.below(std::uint64_t(kept.size()))];
      double s = s0 + (double(interval) + rng.uniform()) * interval_len;
      double t = detail::spiral_arc_inverse(s, 0.5 * (geo.t_begin + geo.t_end));
      double y = rng.uniform(0.0, geo.height);
      out.set.vectors(row, 0) = t * std::cos(t);
      out.set.vectors(row, 1) = y;
      out.set.vectors(row, 2) = t * std::sin(t);
      out.set.ids.push_back("p" + std::to_string(row));
      out.band_of[std::size_t(row)] = b;
      members[std::size_t(b)].push_back(row);
    }
  }

  // One query per band with at least two members; relevant = rest of the band.
  for (Index b = 0; b < bands; ++b) {
    const auto& m = members[std::size_t(b)];
    if (m.size() < 2) continue;
    Index query = m[rng.below(std::uint64_t(m.size()))];
    std::vector<std::string> relevant;
    relevant.reserve(m.size() - 1);
    for (Index i : m)
      if (i != query) relevant.push_back(out.set.ids[std::size_t(i)]);
    out.gt.queries.emplace_back(out.set.ids[std::size_t(query)], std::move(relevant));
  }
  return out;
}

inline SyntheticData generate_swiss_roll(Index count, double noise, std::uint64_t seed,
                                         const SwissRollGeometry& geo = {}) {
  SyntheticData data = generate_holed_manifold(count, 0.0, seed, geo);
  if (noise < 0.0) throw InvalidArgument("noise must be non-negative");
  if (noise > 0.0) {
    detail::Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (Index i = 0; i < data.set.rows(); ++i)
      for (Index j = 0; j < 3; ++j) data.set.vectors(i, j) += noise * rng.gauss();
  }
  return data;
}

// Isometric lift into n dimensions via a fixed orthonormal basis; pairwise
// distances are preserved exactly, so graph/geodesic behaviour is unchanged.
inline DescriptorSet embed_in_dimension(const DescriptorSet& set, Index n, std::uint64_t seed) {
  if (n < set.dim())
    throw InvalidArgument("target dimension " + std::to_string(n) + " below input dimension " +
                          std::to_string(set.dim()));
  detail::Rng rng(seed);
  Matrix g(n, set.dim());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < set.dim(); ++j) g(i, j) = rng.gauss();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, set.dim());
  DescriptorSet out;
  out.vectors = set.vectors * q.transpose();
  out.ids = set.ids;
  return out;
}

}  // namespace ime
