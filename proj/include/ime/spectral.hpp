#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <lapacke.h>

#include "ime/common.hpp"

namespace ime {

// Top eigenpairs of a similarity matrix. coords(i,p) = sqrt(lambda_p) * v_p(i);
// only strictly positive eigenvalues are retained, so cols() may be smaller
// than the dimension that was asked for (requested_dim records the request).
struct Embedding {
  Matrix coords;
  Vector eigenvalues;
  Matrix eigenvectors;
  Index requested_dim = 0;

  Index rows() const { return coords.rows(); }
  Index dim() const { return coords.cols(); }
  bool truncated() const { return dim() < requested_dim; }
};

struct SpectralOptions {
  // Dense solver up to this many rows, iterative above (they agree to 1e-6).
  Index dense_threshold = 4096;
  bool force_iterative = false;
  double iterative_tol = 1e-9;
  Index max_cycles = 80;
  std::uint64_t seed = 0x5eedba5eULL;
};

namespace detail {

// Largest-magnitude component positive, earliest index deciding ties.
inline void fix_eigenvector_signs(Matrix& vectors) {
  for (Index p = 0; p < vectors.cols(); ++p) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      double a = std::abs(vectors(i, p));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors(best, p) < 0.0) vectors.col(p) = -vectors.col(p);
  }
}

// Top-m algebraic eigenpairs via LAPACK dsyevr on an index range.
inline std::pair<Vector, Matrix> topk_eigs_dense(Matrix a, Index m) {
  const Index d = a.rows();
  Vector w(d);
  Matrix z(d, m);
  std::vector<lapack_int> isuppz(std::size_t(2 * std::max<Index>(1, m)));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', lapack_int(d), a.data(), lapack_int(d), 0.0, 0.0,
      lapack_int(d - m + 1), lapack_int(d), 0.0, &found, w.data(), z.data(), lapack_int(d),
      isuppz.data());
  if (info != 0)
    throw NumericalError("dense eigensolver failed (dsyevr info=" + std::to_string(info) + ")");
  if (found != lapack_int(m))
    throw NumericalError("dense eigensolver returned " + std::to_string(found) +
                         " of " + std::to_string(m) + " eigenpairs");
  // dsyevr reports the range in ascending order; flip to non-increasing.
  Vector values(m);
  Matrix vectors(d, m);
  for (Index p = 0; p < m; ++p) {
    values(p) = w(m - 1 - p);
    vectors.col(p) = z.col(m - 1 - p);
  }
  return {std::move(values), std::move(vectors)};
}

// Restarted block-Krylov Rayleigh-Ritz for the top-m algebraic eigenpairs of
// a symmetric matrix too large for the dense solver. The basis grows by
// A-images of the newest vectors (full reorthogonalization), is compressed
// back to the leading Ritz vectors at each restart, and convergence is
// declared on the residual norms of the wanted pairs.
inline std::pair<Vector, Matrix> topk_eigs_iterative(const Matrix& a, Index m,
                                                     const SpectralOptions& opts) {
  const Index d = a.rows();
  const Index block = std::min<Index>(8, d);
  const Index p_max = std::min(d, std::max<Index>(2 * m + 32, 96));
  const Index keep_max = std::max(m, std::min<Index>(m + 32, p_max - block));
  Rng rng(opts.seed);

  Matrix v(d, p_max), av(d, p_max);
  Index cur = 0;

  auto fill_random = [&](Vector& w) {
    for (Index i = 0; i < d; ++i) w(i) = rng.gauss();
  };
  // Orthonormalize w against the accepted basis (twice), append, advance cur.
  auto append_column = [&](Vector w) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      for (int pass = 0; pass < 2; ++pass)
        if (cur > 0) w.noalias() -= v.leftCols(cur) * (v.leftCols(cur).transpose() * w);
      double nrm = w.norm();
      if (nrm > 1e-8) {
        v.col(cur) = w / nrm;
        ++cur;
        return;
      }
      fill_random(w);  // direction collapsed; restart from fresh randomness
    }
    throw NumericalError("eigensolver basis collapsed");
  };

  while (cur < std::min(block, p_max)) {
    Vector w(d);
    fill_random(w);
    append_column(std::move(w));
  }
  av.leftCols(cur).noalias() = a * v.leftCols(cur);

  for (Index cycle = 0; cycle < opts.max_cycles; ++cycle) {
    while (cur < p_max) {
      Index base = cur;
      Index grow = std::min(block, p_max - cur);
      for (Index t = 0; t < grow; ++t) {
        // Krylov direction: the A-image of the newest basis vectors.
        Vector w(d);
        Index src = base - 1 - t;
        if (src >= 0)
          w = av.col(src);
        else
          fill_random(w);
        append_column(std::move(w));
      }
      av.block(0, base, d, cur - base).noalias() = a * v.block(0, base, d, cur - base);
    }
    Matrix h(cur, cur);
    h.noalias() = v.leftCols(cur).transpose() * av.leftCols(cur);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("projected eigensolve failed");

    const Index m_eff = std::min(m, cur);
    Matrix u_top(cur, m_eff);
    Vector theta(m_eff);
    for (Index p = 0; p < m_eff; ++p) {
      theta(p) = es.eigenvalues()(cur - 1 - p);
      u_top.col(p) = es.eigenvectors().col(cur - 1 - p);
    }
    Matrix ritz = v.leftCols(cur) * u_top;
    Matrix a_ritz = av.leftCols(cur) * u_top;
    double scale = std::max(std::abs(theta(0)), 1.0);
    bool converged = true;
    for (Index p = 0; p < m_eff && converged; ++p)
      converged = (a_ritz.col(p) - theta(p) * ritz.col(p)).norm() <= opts.iterative_tol * scale;
    if (converged || cur == d) return {std::move(theta), std::move(ritz)};

    // Thick restart: compress to the leading Ritz vectors and keep growing.
    Index keep = std::min(keep_max, cur);
    Matrix u_keep(cur, keep);
    for (Index p = 0; p < keep; ++p) u_keep.col(p) = es.eigenvectors().col(cur - 1 - p);
    Matrix v_new = v.leftCols(cur) * u_keep;
    Matrix av_new = av.leftCols(cur) * u_keep;
    v.leftCols(keep) = v_new;
    av.leftCols(keep) = av_new;
    cur = keep;
  }
  throw NumericalError("eigensolver did not converge within " +
                       std::to_string(opts.max_cycles) + " restarts");
}

}  // namespace detail

inline Embedding spectral_embed(const Matrix& similarity, Index m,
                                const SpectralOptions& opts = {}) {
  const Index d = similarity.rows();
  if (similarity.cols() != d) throw InvalidArgument("similarity matrix is not square");
  if (m < 1 || m > d)
    throw InvalidArgument("target dimension must lie in [1, " + std::to_string(d) + "], got " +
                          std::to_string(m));
  double scale = std::max(1.0, similarity.cwiseAbs().maxCoeff());
  double asym = (similarity - similarity.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw InvalidArgument("similarity matrix is not symmetric (max deviation " +
                          std::to_string(asym) + ")");
  Matrix sym = 0.5 * (similarity + similarity.transpose());

  auto [values, vectors] = (d <= opts.dense_threshold && !opts.force_iterative)
                               ? detail::topk_eigs_dense(std::move(sym), m)
                               : detail::topk_eigs_iterative(sym, m, opts);

  // Never retain a non-positive eigenvalue: sqrt(lambda) must be real and the
  // coordinate must carry actual similarity mass. The floor is relative to the
  // leading eigenvalue so rank-deficient inputs whose null space comes back as
  // +-1e-16 noise are truncated rather than embedded.
  const double floor =
      double(d) * std::numeric_limits<double>::epsilon() * std::max(values(0), 0.0);
  Index positive = 0;
  while (positive < values.size() && values(positive) > floor) ++positive;
  if (positive == 0) throw NumericalError("no positive spectrum");

  Embedding emb;
  emb.requested_dim = m;
  emb.eigenvalues = values.head(positive);
  emb.eigenvectors = vectors.leftCols(positive);
  detail::fix_eigenvector_signs(emb.eigenvectors);
  emb.coords.resize(d, positive);
  for (Index p = 0; p < positive; ++p)
    emb.coords.col(p) = std::sqrt(emb.eigenvalues(p)) * emb.eigenvectors.col(p);
  return emb;
}

}  // namespace ime
