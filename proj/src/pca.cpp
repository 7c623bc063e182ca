#include "microprop/pca.hpp"

#include <algorithm>
#include <cmath>

#include "microprop/error.hpp"

namespace microprop::features {

PcaModel pca_fit(const RowMatrix& data, int n_components) {
  const auto rows = data.rows();
  const auto cols = data.cols();
  if (rows < 2) throw Error(Errc::InvalidArgument, "PCA needs at least two samples");
  if (n_components < 1 || n_components > std::min(rows, cols))
    throw Error(Errc::InvalidArgument, "n_components must be in [1, min(rows, cols)]");

  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centred = data.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  const double total = sv.squaredNorm();
  const double tol = sv.size() > 0 ? sv(0) * 1e-12 * static_cast<double>(std::max(rows, cols)) : 0.0;
  int available = 0;
  while (available < sv.size() && sv(available) > tol) ++available;

  int k = n_components;
  if (k > available) {
    k = available;
    model.rank_deficient = true;
  }
  model.n_components = k;
  model.components.resize(k, cols);
  model.explained_variance_ratio.resize(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = svd.matrixV().col(i);
    Eigen::Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v(largest) < 0) v = -v;
    model.components.row(i) = v.transpose();
    model.explained_variance_ratio(i) = total > 0.0 ? sv(i) * sv(i) / total : 0.0;
  }
  return model;
}

FeatureVector pca_transform(const PcaModel& model, const FeatureVector& x) {
  if (static_cast<Eigen::Index>(x.size()) != model.mean.size())
    throw Error(Errc::InvalidArgument, "PCA input dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd projected = model.components * (v - model.mean);
  return FeatureVector(projected.data(), projected.data() + projected.size());
}

FeatureVector pca_transform(const PcaModel& model, const GrayImage& image) {
  return pca_transform(model, image.values());
}

}  // namespace microprop::features
