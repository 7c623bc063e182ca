#include "microprop/pcr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "microprop/error.hpp"

namespace microprop::regress {

PcrModel::PcrModel(double bin_width, std::vector<double> scale_min, std::vector<double> scale_max,
                   std::map<std::int64_t, Bin> bins)
    : bin_width_(bin_width), scale_min_(std::move(scale_min)), scale_max_(std::move(scale_max)), bins_(std::move(bins)) {
  if (!(bin_width_ > 0.0)) throw Error(Errc::InvalidArgument, "bin width must be positive");
  if (scale_min_.size() != scale_max_.size()) throw Error(Errc::InvalidArgument, "scaling bounds differ in length");
  if (bins_.empty()) throw Error(Errc::EmptyTraining, "model has no bins");
  scaled_means_.reserve(bins_.size());
  for (const auto& [index, bin] : bins_) {
    if (bin.mean.size() != dimension()) throw Error(Errc::InvalidArgument, "bin mean has wrong dimension");
    scaled_means_.emplace_back(index, scale(bin.mean));
  }
}

std::vector<double> PcrModel::scale(std::span<const double> x) const {
  if (x.size() != dimension()) throw Error(Errc::InvalidArgument, "feature dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double range = scale_max_[d] - scale_min_[d];
    out[d] = range > 0.0 ? std::clamp((x[d] - scale_min_[d]) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

std::int64_t PcrModel::nearest_bin(std::span<const double> x) const {
  const auto q = scale(x);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_index = scaled_means_.front().first;
  // scaled_means_ is in ascending bin order; strict < keeps the lower bin on ties.
  for (const auto& [index, mean] : scaled_means_) {
    double dist = 0.0;
    for (std::size_t d = 0; d < q.size(); ++d) dist += (q[d] - mean[d]) * (q[d] - mean[d]);
    if (dist < best) {
      best = dist;
      best_index = index;
    }
  }
  return best_index;
}

double PcrModel::predict(std::span<const double> x) const { return bins_.at(nearest_bin(x)).property; }

PcrModel pcr_fit(const RowMatrix& features, std::span<const double> targets, double bin_width) {
  if (features.rows() == 0 || targets.empty()) throw Error(Errc::EmptyTraining, "no training samples");
  if (static_cast<std::size_t>(features.rows()) != targets.size())
    throw Error(Errc::InvalidArgument, "feature rows and targets differ in count");
  if (!(bin_width > 0.0)) throw Error(Errc::InvalidArgument, "bin width must be positive");

  const auto dim = static_cast<std::size_t>(features.cols());
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  struct Accumulator {
    std::vector<double> sum;
    std::int64_t count = 0;
  };
  std::map<std::int64_t, Accumulator> acc;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const auto index = static_cast<std::int64_t>(std::floor(targets[i] / bin_width));
    auto& a = acc[index];
    if (a.sum.empty()) a.sum.assign(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = features(i, static_cast<Eigen::Index>(d));
      a.sum[d] += v;
      lo[d] = std::min(lo[d], v);
      hi[d] = std::max(hi[d], v);
    }
    ++a.count;
  }

  std::map<std::int64_t, PcrModel::Bin> bins;
  for (auto& [index, a] : acc) {
    for (double& s : a.sum) s /= static_cast<double>(a.count);
    bins.emplace(index, PcrModel::Bin{std::move(a.sum), static_cast<double>(index) * bin_width + 0.5 * bin_width});
  }
  return PcrModel(bin_width, std::move(lo), std::move(hi), std::move(bins));
}

}  // namespace microprop::regress
