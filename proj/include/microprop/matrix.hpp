#pragma once

#include <Eigen/Dense>

namespace microprop {

/// Sample-major feature matrix: one row per sample.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace microprop
