#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "microprop/error.hpp"
#include "microprop/pca.hpp"
#include "microprop/rng.hpp"

using namespace microprop;
using namespace microprop::features;

namespace {

RowMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() * 2.0 - 1.0;
  return m;
}

FeatureVector row_of(const RowMatrix& m, Eigen::Index i) {
  return FeatureVector(m.data() + i * m.cols(), m.data() + (i + 1) * m.cols());
}

}  // namespace

TEST(Pca, LineExplainsAllVariance) {
  RowMatrix data(6, 2);
  for (int i = 0; i < 6; ++i) data.row(i) << 1.0 + i, 2.0 + 3.0 * i;
  const auto model = pca_fit(data, 1);
  EXPECT_NEAR(model.explained_variance_ratio(0), 1.0, 1e-12);
  EXPECT_FALSE(model.rank_deficient);
}

TEST(Pca, MeanMapsToZero) {
  const auto data = random_matrix(10, 5, 1);
  const auto model = pca_fit(data, 3);
  const FeatureVector mean(model.mean.data(), model.mean.data() + model.mean.size());
  for (double v : pca_transform(model, mean)) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Pca, MatchesCovarianceEigendecomposition) {
  const auto data = random_matrix(10, 5, 2);
  const auto model = pca_fit(data, 4);
  const Eigen::MatrixXd centred = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred / 9.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double total = eig.eigenvalues().sum();
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXd ref = eig.eigenvectors().col(4 - k);  // ascending order
    const Eigen::VectorXd got = model.components.row(k).transpose();
    const double sign = ref.dot(got) < 0 ? -1.0 : 1.0;
    EXPECT_LT((sign * ref - got).cwiseAbs().maxCoeff(), 1e-8) << "component " << k;
    EXPECT_NEAR(model.explained_variance_ratio(k), eig.eigenvalues()(4 - k) / total, 1e-10);
  }
}

TEST(Pca, ComponentsOrthonormalAndOrdered) {
  const auto data = random_matrix(30, 8, 3);
  const auto model = pca_fit(data, 8);
  const Eigen::MatrixXd gram = model.components * model.components.transpose();
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-10);
  for (int k = 1; k < 8; ++k) EXPECT_LE(model.explained_variance_ratio(k), model.explained_variance_ratio(k - 1));
  EXPECT_LE(model.explained_variance_ratio.sum(), 1.0 + 1e-12);
}

TEST(Pca, SignConvention) {
  const auto model = pca_fit(random_matrix(20, 6, 4), 6);
  for (int k = 0; k < 6; ++k) {
    Eigen::Index idx = 0;
    model.components.row(k).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(model.components(k, idx), 0.0);
  }
}

TEST(Pca, FullRankTransformIsIsometry) {
  const auto data = random_matrix(12, 4, 5);
  const auto model = pca_fit(data, 4);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) {
      const auto a = pca_transform(model, row_of(data, i));
      const auto b = pca_transform(model, row_of(data, j));
      const double d_in = (data.row(i) - data.row(j)).norm();
      double d_out = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) d_out += (a[k] - b[k]) * (a[k] - b[k]);
      EXPECT_NEAR(std::sqrt(d_out), d_in, 1e-8);
    }
}

TEST(Pca, IsometryOnLowRankSubspace) {
  // 10 points in a 3-D subspace of R^6; 3 components preserve distances.
  const auto basis = random_matrix(3, 6, 6);
  const auto coords = random_matrix(10, 3, 7);
  const RowMatrix data = coords * basis;
  const auto model = pca_fit(data, 3);
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) {
      const auto a = pca_transform(model, row_of(data, i));
      const auto b = pca_transform(model, row_of(data, j));
      double d_out = 0.0;
      for (std::size_t k = 0; k < 3; ++k) d_out += (a[k] - b[k]) * (a[k] - b[k]);
      EXPECT_NEAR(std::sqrt(d_out), (data.row(i) - data.row(j)).norm(), 1e-8);
    }
}

TEST(Pca, RankDeficientRequestIsFlagged) {
  RowMatrix data(5, 4);
  for (int i = 0; i < 5; ++i) data.row(i) << i, 2.0 * i, -i, 0.5;
  const auto model = pca_fit(data, 3);
  EXPECT_TRUE(model.rank_deficient);
  EXPECT_EQ(model.n_components, 1);
  EXPECT_EQ(model.components.rows(), 1);
}

TEST(Pca, RejectsBadArguments) {
  const auto data = random_matrix(4, 3, 8);
  EXPECT_THROW(pca_fit(data, 0), Error);
  EXPECT_THROW(pca_fit(data, 4), Error);
  EXPECT_THROW(pca_fit(random_matrix(1, 3, 9), 1), Error);
  const auto model = pca_fit(data, 2);
  EXPECT_THROW(pca_transform(model, FeatureVector{1.0, 2.0}), Error);
}

TEST(Pca, ImageTransformUsesPixels) {
  const auto data = random_matrix(6, 16, 10);
  const auto model = pca_fit(data, 2);
  const auto pixels = row_of(data, 2);
  EXPECT_EQ(pca_transform(model, GrayImage(4, 4, pixels)), pca_transform(model, pixels));
}
