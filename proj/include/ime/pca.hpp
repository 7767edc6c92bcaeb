#pragma once

#include <cmath>
#include <string>

#include "ime/common.hpp"
#include "ime/dataset.hpp"
#include "ime/spectral.hpp"

namespace ime {

struct PCAModel {
  Vector mean;        // n
  Matrix components;  // n x m, orthonormal columns, descending variance
  Vector explained;   // m sample variances

  Index input_dim() const { return components.rows(); }
  Index output_dim() const { return components.cols(); }
};

inline PCAModel pca_fit(const DescriptorSet& train, Index m) {
  const Index d = train.rows();
  const Index n = train.dim();
  if (d < 2) throw InvalidArgument("pca needs at least 2 rows");
  if (m < 1 || m > std::min(n, d))
    throw InvalidArgument("m must lie in [1, " + std::to_string(std::min(n, d)) + "], got " +
                          std::to_string(m));
  PCAModel model;
  model.mean = train.vectors.colwise().mean();
  Matrix centered = train.vectors.rowwise() - model.mean.transpose();
  Matrix cov = (centered.transpose() * centered) / double(d - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) throw NumericalError("pca eigensolve failed");
  model.components.resize(n, m);
  model.explained.resize(m);
  for (Index p = 0; p < m; ++p) {
    model.components.col(p) = es.eigenvectors().col(n - 1 - p);
    model.explained(p) = std::max(es.eigenvalues()(n - 1 - p), 0.0);
  }
  detail::fix_eigenvector_signs(model.components);
  return model;
}

inline Vector pca_apply(const PCAModel& model, const Vector& x) {
  if (x.size() != model.input_dim())
    throw InvalidArgument("vector dimension " + std::to_string(x.size()) +
                          " does not match pca input " + std::to_string(model.input_dim()));
  return ((x - model.mean).transpose() * model.components).transpose();
}

inline Matrix pca_apply(const PCAModel& model, const DescriptorSet& set) {
  if (set.dim() != model.input_dim())
    throw InvalidArgument("set dimension " + std::to_string(set.dim()) +
                          " does not match pca input " + std::to_string(model.input_dim()));
  Matrix out(set.rows(), model.output_dim());
  for (Index i = 0; i < set.rows(); ++i)
    out.row(i) = (set.vectors.row(i) - model.mean.transpose()) * model.components;
  return out;
}

}  // namespace ime
