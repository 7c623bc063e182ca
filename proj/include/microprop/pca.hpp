#pragma once

#include <Eigen/Dense>

#include "microprop/features.hpp"
#include "microprop/matrix.hpp"

namespace microprop::features {

/// Principal components of mean-centred data (rows are samples).
struct PcaModel {
  Eigen::VectorXd mean;
  RowMatrix components;                   ///< one orthonormal direction per row
  Eigen::VectorXd explained_variance_ratio;  ///< non-increasing
  int n_components = 0;
  /// Set when fewer components than requested carry variance; only those
  /// are kept.
  bool rank_deficient = false;
};

/// Thin SVD of the centred data. Each component's largest-magnitude entry is
/// made positive. Throws InvalidArgument for fewer than two rows or
/// n_components outside [1, min(rows, cols)].
PcaModel pca_fit(const RowMatrix& data, int n_components);

FeatureVector pca_transform(const PcaModel& model, const FeatureVector& x);
FeatureVector pca_transform(const PcaModel& model, const GrayImage& image);

}  // namespace microprop::features
