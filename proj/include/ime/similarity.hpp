#pragma once

#include <cmath>
#include <string>

#include "ime/common.hpp"
#include "ime/graph.hpp"

namespace ime {

enum class Conversion { quadratic, t_distribution };

// center applies the double-centering projector J·S·J (classical-MDS Gram
// form) and is meaningful for the quadratic conversion only.
struct ConversionKind {
  Conversion kind = Conversion::t_distribution;
  bool center = false;
};

namespace detail {

inline double convert_one(double d, Conversion kind) {
  // 1/(1+inf^2) = 0, so the t-distribution handles unreachable pairs natively.
  if (kind == Conversion::t_distribution) return 1.0 / (1.0 + d * d);
  return -0.5 * d * d;
}

inline void double_center(Matrix& s) {
  const Index d = s.rows();
  Vector row_mean = s.rowwise().mean();
  double total = row_mean.mean();
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) s(i, j) += total - row_mean(i) - row_mean(j);
}

}  // namespace detail

inline Matrix convert_similarity(const DistanceMatrix& dist, const ConversionKind& conv) {
  const Index d = dist.size();
  Matrix s(d, d);
  bool has_inf = false;
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      double v = dist.dist(i, j);
      if (v == kInfinity) has_inf = true;
      s(i, j) = detail::convert_one(v, conv.kind);
    }
  if (conv.kind == Conversion::quadratic && has_inf) {
    // No finite image exists for +inf under -d^2/2; cap it one magnitude
    // below the most negative finite similarity present.
    double floor = 0.0;
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i)
        if (std::isfinite(s(i, j))) floor = std::min(floor, s(i, j));
    double cap = floor - std::abs(floor);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i)
        if (!std::isfinite(s(i, j))) s(i, j) = cap;
  }
  if (conv.kind == Conversion::quadratic && conv.center) detail::double_center(s);
  return s;
}

inline Matrix corrected_similarity(const DistanceMatrix& geo, const DistanceMatrix& euc,
                                   double omega, const ConversionKind& conv) {
  if (geo.size() != euc.size())
    throw InvalidArgument("geodesic matrix is " + std::to_string(geo.size()) +
                          "x, euclidean is " + std::to_string(euc.size()) + "x");
  if (omega < 0.0) throw InvalidArgument("omega must be non-negative");
  if (conv.kind == Conversion::quadratic && !conv.center && omega == 0.0 &&
      !geo.dist.allFinite())
    throw NumericalError(
        "graph disconnected beyond correction: unreachable pairs have no finite "
        "quadratic similarity and omega=0 provides no euclidean term");
  Matrix s = convert_similarity(geo, conv);
  if (omega == 0.0) return s;
  s.noalias() += omega * convert_similarity(euc, conv);
  return s;
}

}  // namespace ime
