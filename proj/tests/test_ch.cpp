#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "microprop/cahn_hilliard.hpp"
#include "microprop/error.hpp"
#include "microprop/rng.hpp"

using namespace microprop;
using namespace microprop::ch;

namespace {

constexpr double kPi = std::numbers::pi;

ChParams small_params(int n = 32) {
  ChParams p;
  p.size = n;
  return p;
}

// Smooth periodic test field and its exact gradient on [0, L)^2.
struct Smooth {
  double length;
  double c(double x, double y) const {
    return 0.3 + 0.2 * std::exp(std::sin(2 * kPi * x / length) * std::cos(2 * kPi * y / length));
  }
  double grad2(double x, double y) const {
    const double w = 2 * kPi / length;
    const double e = 0.2 * std::exp(std::sin(w * x) * std::cos(w * y));
    const double cx = e * w * std::cos(w * x) * std::cos(w * y);
    const double cy = -e * w * std::sin(w * x) * std::sin(w * y);
    return cx * cx + cy * cy;
  }
};

ConcentrationField sample(int n, double length, const auto& f) {
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  const double h = length / n;
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) v[static_cast<std::size_t>(r) * n + col] = f(col * h, r * h);
  return ConcentrationField(n, length, v);
}

// Energy from the analytic integrand on a fine grid.
double quadrature_oracle(const Smooth& s, const ChParams& p, int n) {
  const double h = p.length / n;
  double sum = 0.0;
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) {
      const double x = col * h;
      const double y = r * h;
      const double c = s.c(x, y);
      sum += p.c0 * c * c * (1 - c) * (1 - c) + 0.5 * p.kc * s.grad2(x, y);
    }
  return sum * h * h;
}

}  // namespace

TEST(ChSchedule, Defaults) {
  const auto dts = TimeSchedule{}.steps();
  ASSERT_EQ(dts.size(), 12000u);
  EXPECT_DOUBLE_EQ(dts[0], 1e-7);
  EXPECT_EQ(dts[1999], 1e-4);
  for (std::size_t i = 2000; i < dts.size(); ++i) ASSERT_EQ(dts[i], 1e-4);
  for (std::size_t i = 1; i < 2000; ++i) ASSERT_GT(dts[i], dts[i - 1]);
  // Log spacing: constant ratio.
  EXPECT_NEAR(dts[1] / dts[0], dts[1999] / dts[1998], 1e-12);
  EXPECT_EQ(TimeSchedule{}.snapshot_count(), 3000);
}

TEST(ChSchedule, SingleLogStepIsDtMin) {
  const auto dts = time_schedule(1, 3e-7, 1e-4, 2, 1e-4);
  ASSERT_EQ(dts.size(), 3u);
  EXPECT_EQ(dts[0], 3e-7);
}

TEST(ChSchedule, RejectsInvalidInput) {
  EXPECT_THROW(time_schedule(0, 1e-7, 1e-4, 10, 1e-4), Error);
  EXPECT_THROW(time_schedule(10, 1e-7, 1e-4, 0, 1e-4), Error);
  EXPECT_THROW(time_schedule(10, -1e-7, 1e-4, 10, 1e-4), Error);
  EXPECT_THROW(time_schedule(10, 1e-4, 1e-7, 10, 1e-4), Error);
  EXPECT_THROW(time_schedule(10, 1e-7, 1e-4, 10, 0.0), Error);
  try {
    time_schedule(0, 1e-7, 1e-4, 10, 1e-4);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ScheduleInvalid);
  }
}

TEST(ChSchedule, ExportPattern) {
  TimeSchedule s;
  EXPECT_TRUE(s.exported(1));
  EXPECT_TRUE(s.exported(2000));
  EXPECT_FALSE(s.exported(2001));
  EXPECT_TRUE(s.exported(2010));
  EXPECT_TRUE(s.exported(12000));
}

TEST(ChEnergy, UniformFields) {
  ChParams p = small_params();
  EXPECT_EQ(free_energy(ConcentrationField::uniform(32, p.length, 0.0), p), 0.0);
  p.c0 = 1.0;
  EXPECT_NEAR(free_energy(ConcentrationField::uniform(32, p.length, 0.5), p), 0.0625 * p.length * p.length, 1e-12);
}

TEST(ChEnergy, CosineMatchesClosedForm) {
  ChParams p = small_params();
  const double a = 0.1;
  const auto f = sample(32, p.length, [&](double x, double) { return 0.5 + a * std::cos(2 * kPi * x / p.length); });
  const double w = 2 * kPi / p.length;
  const double area = p.length * p.length;
  const double expected = p.c0 * area * (1.0 / 16 - a * a / 4 + 3 * a * a * a * a / 8) + 0.5 * p.kc * w * w * a * a / 2 * area;
  EXPECT_NEAR(free_energy(f, p), expected, 1e-10 * expected);
}

TEST(ChEnergy, CosineMatchesRefinedQuadrature) {
  ChParams p = small_params();
  auto c = [&](double x, double) { return 0.5 + 0.1 * std::cos(2 * kPi * x / p.length); };
  const double w = 2 * kPi / p.length;
  double fine = 0.0;
  const int n4 = 4 * 32;
  const double h = p.length / n4;
  for (int r = 0; r < n4; ++r)
    for (int col = 0; col < n4; ++col) {
      const double x = col * h;
      const double v = c(x, 0.0);
      const double gx = -0.1 * w * std::sin(w * x);
      fine += (p.c0 * v * v * (1 - v) * (1 - v) + 0.5 * p.kc * gx * gx) * h * h;
    }
  const double e = free_energy(sample(32, p.length, c), p);
  EXPECT_NEAR(e, fine, 1e-6 * fine);
}

TEST(ChEnergy, SmoothFieldConvergesUnderRefinement) {
  const Smooth s{20.0};
  ChParams p = small_params();
  const double oracle = quadrature_oracle(s, p, 256);
  double previous_error = std::numeric_limits<double>::infinity();
  for (int n : {8, 16, 32, 64}) {
    p.size = n;
    const double e = free_energy(sample(n, p.length, [&](double x, double y) { return s.c(x, y); }), p);
    const double err = std::abs(e - oracle) / oracle;
    // Monotone until round-off takes over.
    EXPECT_TRUE(err < previous_error || err < 1e-13) << "n=" << n << " err=" << err;
    previous_error = err;
  }
  // Spectral accuracy on an analytic field.
  EXPECT_LT(previous_error, 1e-12);
}

TEST(ChEnergy, NonNegativeAndLowerWhenSeparated) {
  ChParams p = small_params();
  Rng rng(4);
  const auto random = ConcentrationField::random(32, p.length, rng);
  const double e_random = free_energy(random, p);
  EXPECT_GE(e_random, 0.0);
  // Two flat slabs of c = 0 and c = 1 with smooth interfaces.
  const auto separated = sample(32, p.length, [&](double x, double) {
    return 0.5 + 0.5 * std::tanh(4.0 * std::sin(2 * kPi * x / p.length));
  });
  const double e_sep = free_energy(separated, p);
  EXPECT_GE(e_sep, 0.0);
  EXPECT_LT(e_sep, e_random);
}

TEST(ChStep, UniformFieldIsFixedPoint) {
  const ChParams p = small_params();
  const auto f = ConcentrationField::uniform(32, p.length, 0.37);
  for (double dt : {1e-7, 1e-4, 1.0}) EXPECT_EQ(ch_step(f, dt, p).values(), f.values());
}

TEST(ChStep, ConservesMean) {
  const ChParams p = small_params();
  Rng rng(8);
  auto f = ConcentrationField::random(32, p.length, rng);
  ChSolver solver(p);
  const double m0 = f.mean();
  for (double dt : {1e-7, 1e-5, 1e-4, 1e-3}) {
    solver.step(f, dt);
    EXPECT_NEAR(f.mean(), m0, 1e-12);
  }
}

TEST(ChStep, EnergyDecreasesAtSmallStep) {
  const ChParams p = small_params(64);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto f = ConcentrationField::random(64, p.length, rng);
    const double before = free_energy(f, p);
    const double after = free_energy(ch_step(f, 1e-7, p), p);
    EXPECT_LE(after, before + 1e-9 * before);
  }
}

TEST(ChStep, RejectsBadInput) {
  const ChParams p = small_params();
  const auto f = ConcentrationField::uniform(32, p.length, 0.5);
  EXPECT_THROW(ch_step(f, 0.0, p), Error);
  ChSolver solver(p);
  auto mismatched = ConcentrationField::uniform(p.size / 2, p.length, 0.5);
  EXPECT_THROW(solver.step(mismatched, 1e-4), Error);
  ChParams odd = p;
  odd.size = 31;
  EXPECT_THROW(odd.validate(), Error);
  ChParams neg = p;
  neg.kc = -1.0;
  EXPECT_THROW(neg.validate(), Error);
}

TEST(ChStep, NonFiniteInputIsReportedUnstable) {
  const ChParams p = small_params();
  auto f = ConcentrationField::uniform(32, p.length, 0.5);
  f.values()[5] = std::numeric_limits<double>::infinity();
  try {
    ch_step(f, 1e-4, p);
    FAIL() << "expected StepUnstable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StepUnstable);
  }
}

TEST(ChRun, ShortRunDeterministicAndExportsSchedule) {
  ChParams p = small_params();
  p.schedule.n_log = 20;
  p.schedule.n_const = 50;
  p.seed = 3;
  const auto a = run_ch(p);
  const auto b = run_ch(p);
  ASSERT_EQ(a.size(), 25u);
  ASSERT_EQ(b.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image, b[i].image);
    EXPECT_EQ(a[i].energy, b[i].energy);
  }
  EXPECT_EQ(a.front().step, 1);
  EXPECT_EQ(a[19].step, 20);
  EXPECT_EQ(a[20].step, 30);
  EXPECT_EQ(a.back().step, 70);
  p.seed = 4;
  const auto c = run_ch(p);
  EXPECT_NE(c.front().image, a.front().image);
}

TEST(ChRun, DifferentSeedsOverlapInEnergy) {
  ChParams p;
  p.schedule.n_log = 200;
  p.schedule.n_const = 500;
  double lo[2], hi[2];
  for (int s = 0; s < 2; ++s) {
    p.seed = 100 + s;
    const auto snaps = run_ch(p);
    lo[s] = hi[s] = snaps.front().energy;
    for (const auto& snap : snaps) {
      lo[s] = std::min(lo[s], snap.energy);
      hi[s] = std::max(hi[s], snap.energy);
    }
  }
  EXPECT_LT(std::max(lo[0], lo[1]), std::min(hi[0], hi[1]));
}

TEST(ChImage, Rounding) {
  EXPECT_EQ(field_to_image(ConcentrationField::uniform(4, 1.0, 1.0)), Image8(4, 4, 255));
  EXPECT_EQ(field_to_image(ConcentrationField::uniform(4, 1.0, 0.0)), Image8(4, 4, 0));
  EXPECT_EQ(field_to_image(ConcentrationField::uniform(4, 1.0, 0.5)), Image8(4, 4, 128));
  EXPECT_EQ(field_to_image(ConcentrationField::uniform(4, 1.0, 1.7)), Image8(4, 4, 255));
  EXPECT_EQ(field_to_image(ConcentrationField::uniform(4, 1.0, -0.2)), Image8(4, 4, 0));
}
