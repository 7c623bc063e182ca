#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "microprop/matrix.hpp"

namespace microprop::regress {

/// Piecewise-constant regression: targets are binned with width `bin_width`
/// and each bin remembers the mean training feature vector. Prediction
/// returns the centre of the bin whose mean lies nearest to the query in
/// min-max scaled feature space.
class PcrModel {
 public:
  struct Bin {
    std::vector<double> mean;  ///< unscaled mean feature vector
    double property = 0.0;     ///< bin centre, index * width + width / 2
  };

  PcrModel(double bin_width, std::vector<double> scale_min, std::vector<double> scale_max,
           std::map<std::int64_t, Bin> bins);

  double bin_width() const { return bin_width_; }
  std::size_t dimension() const { return scale_min_.size(); }
  const std::vector<double>& scale_min() const { return scale_min_; }
  const std::vector<double>& scale_max() const { return scale_max_; }
  const std::map<std::int64_t, Bin>& bins() const { return bins_; }

  /// Map a feature vector into [0,1] per dimension (clamped). Dimensions with
  /// min == max map to 0.
  std::vector<double> scale(std::span<const double> x) const;

  /// Index of the nearest bin. Exact distance ties go to the lower bin.
  std::int64_t nearest_bin(std::span<const double> x) const;
  double predict(std::span<const double> x) const;

 private:
  double bin_width_;
  std::vector<double> scale_min_;
  std::vector<double> scale_max_;
  std::map<std::int64_t, Bin> bins_;
  std::vector<std::pair<std::int64_t, std::vector<double>>> scaled_means_;
};

/// Throws EmptyTraining with no samples, InvalidArgument on bad width or
/// mismatched sizes.
PcrModel pcr_fit(const RowMatrix& features, std::span<const double> targets, double bin_width = 1.0);

}  // namespace microprop::regress
