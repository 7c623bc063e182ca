#include <gtest/gtest.h>

#include "microprop/error.hpp"
#include "microprop/pcr.hpp"
#include "microprop/rng.hpp"

using namespace microprop;
using namespace microprop::regress;

namespace {

RowMatrix column(std::initializer_list<double> v) {
  RowMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST(Pcr, TwoSamplesShareOneBin) {
  const auto model = pcr_fit(column({1.0, 3.0}), std::vector<double>{10.2, 10.4}, 1.0);
  ASSERT_EQ(model.bins().size(), 1u);
  const auto& [index, bin] = *model.bins().begin();
  EXPECT_EQ(index, 10);
  EXPECT_EQ(bin.mean, std::vector<double>{2.0});
  EXPECT_EQ(bin.property, 10.5);
  const std::vector<double> q{2.1};
  EXPECT_EQ(model.predict(q), 10.5);
}

TEST(Pcr, SingleSampleHasDegenerateScaling) {
  const auto model = pcr_fit(column({4.0}), std::vector<double>{3.7}, 1.0);
  ASSERT_EQ(model.bins().size(), 1u);
  const std::vector<double> q{-100.0};
  EXPECT_EQ(model.scale(q), std::vector<double>{0.0});
  EXPECT_EQ(model.predict(q), 3.5);
}

TEST(Pcr, BinCountBoundedByPigeonhole) {
  Rng rng(1);
  RowMatrix x(1000, 2);
  std::vector<double> y(1000);
  for (int i = 0; i < 1000; ++i) {
    y[i] = rng.uniform() * 255.0;
    x(i, 0) = y[i] + rng.uniform();
    x(i, 1) = rng.uniform();
  }
  const auto model = pcr_fit(x, y, 1.0);
  EXPECT_LE(model.bins().size(), 256u);
  for (const auto& [index, bin] : model.bins()) {
    EXPECT_EQ(bin.mean.size(), 2u);
    EXPECT_EQ(bin.property, index + 0.5);
  }
}

TEST(Pcr, QueryAtBinMeanReturnsItsProperty) {
  const auto model = pcr_fit(column({0.0, 1.0, 5.0, 6.0}), std::vector<double>{0.5, 0.7, 3.2, 3.9}, 1.0);
  for (const auto& [index, bin] : model.bins()) EXPECT_EQ(model.predict(bin.mean), bin.property);
}

TEST(Pcr, TieGoesToLowerProperty) {
  const auto model = pcr_fit(column({0.0, 4.0}), std::vector<double>{1.2, 7.9}, 1.0);
  const std::vector<double> mid{2.0};
  EXPECT_EQ(model.predict(mid), 1.5);
}

TEST(Pcr, ScalingIntoUnitInterval) {
  const auto model = pcr_fit(column({2.0, 4.0, 6.0}), std::vector<double>{1, 2, 3}, 1.0);
  EXPECT_EQ(model.scale(std::vector<double>{4.0}), std::vector<double>{0.5});
  EXPECT_EQ(model.scale(std::vector<double>{10.0}), std::vector<double>{1.0});
  EXPECT_EQ(model.scale(std::vector<double>{-1.0}), std::vector<double>{0.0});
}

TEST(Pcr, NearestBinInvariantUnderAffineRescaling) {
  Rng rng(2);
  const int n = 200;
  RowMatrix x(n, 3);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = rng.uniform() * 30.0;
    for (int d = 0; d < 3; ++d) x(i, d) = y[i] * (d + 1) + 5.0 * rng.uniform();
  }
  const auto base = pcr_fit(x, y, 1.0);
  for (double a : {3.0, 0.01, -2.0}) {
    for (int d = 0; d < 3; ++d) {
      RowMatrix xs = x;
      xs.col(d) = xs.col(d) * a + Eigen::VectorXd::Constant(n, 7.0);
      const auto scaled = pcr_fit(xs, y, 1.0);
      for (int q = 0; q < 50; ++q) {
        std::vector<double> query{rng.uniform() * 40, rng.uniform() * 70, rng.uniform() * 100};
        auto transformed = query;
        transformed[d] = transformed[d] * a + 7.0;
        // Clamping at the range edges commutes with the map as well.
        EXPECT_EQ(base.nearest_bin(query), scaled.nearest_bin(transformed)) << "a=" << a << " d=" << d;
      }
    }
  }
}

TEST(Pcr, Errors) {
  EXPECT_THROW(pcr_fit(RowMatrix(0, 2), std::vector<double>{}, 1.0), Error);
  try {
    pcr_fit(RowMatrix(0, 2), std::vector<double>{}, 1.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyTraining);
  }
  EXPECT_THROW(pcr_fit(column({1.0}), std::vector<double>{1.0}, 0.0), Error);
  EXPECT_THROW(pcr_fit(column({1.0, 2.0}), std::vector<double>{1.0}, 1.0), Error);
  const auto model = pcr_fit(column({1.0}), std::vector<double>{1.0}, 1.0);
  EXPECT_THROW(model.predict(std::vector<double>{1.0, 2.0}), Error);
}

TEST(Pcr, NegativeTargetsUseFloorBins) {
  const auto model = pcr_fit(column({0.0}), std::vector<double>{-0.3}, 1.0);
  EXPECT_EQ(model.bins().begin()->first, -1);
  EXPECT_EQ(model.bins().begin()->second.property, -0.5);
}
