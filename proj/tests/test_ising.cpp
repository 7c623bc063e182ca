#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

#include "microprop/error.hpp"
#include "microprop/ising.hpp"
#include "microprop/rng.hpp"

using namespace microprop;
using namespace microprop::ising;

namespace {

IsingParams at_temperature(double t) {
  IsingParams p;
  p.temperature = t;
  return p;
}

SpinLattice shifted(const SpinLattice& l, int dr, int dc) {
  const int n = l.size();
  std::vector<std::int8_t> s(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) s[static_cast<std::size_t>((r + dr) % n) * n + (c + dc) % n] = static_cast<std::int8_t>(l.at(r, c));
  return SpinLattice::from_spins(n, s);
}

}  // namespace

TEST(Ising, CriticalTemperature) { EXPECT_NEAR(critical_temperature(), 2.269185314213022, 1e-12); }

TEST(Ising, EnergyExamples) {
  EXPECT_EQ(hamiltonian_energy(SpinLattice::uniform(4, 1)), -32.0);
  EXPECT_EQ(hamiltonian_energy(SpinLattice::checkerboard(4)), 32.0);
  auto l = SpinLattice::uniform(4, 1);
  l.flip({2, 1});
  EXPECT_EQ(hamiltonian_energy(l), -24.0);
}

TEST(Ising, MagnetizationExamples) {
  EXPECT_EQ(magnetization(SpinLattice::uniform(8, 1)), 1.0);
  EXPECT_EQ(magnetization(SpinLattice::uniform(8, -1)), -1.0);
  EXPECT_EQ(magnetization(SpinLattice::checkerboard(8)), 0.0);
}

TEST(Ising, PeriodicNeighbours) {
  auto l = SpinLattice::uniform(4, 1);
  l.flip({0, 3});
  l.flip({3, 0});
  // (0,0) sees (0,3) and (3,0) through the wrap.
  EXPECT_EQ(l.neighbour_sum({0, 0}), 0);
}

TEST(Ising, FromSpinsRejectsInvalidValues) {
  EXPECT_THROW(SpinLattice::from_spins(2, {1, -1, 0, 1}), Error);
  EXPECT_THROW(SpinLattice::from_spins(2, {1, -1, 1}), Error);
}

TEST(Ising, MetropolisExamples) {
  // Flipping a down spin in an all-up lattice: dE = -8.
  auto l = SpinLattice::uniform(4, 1);
  l.flip({1, 1});
  ASSERT_EQ(flip_energy_delta(l, {1, 1}), -8);
  EXPECT_TRUE(metropolis_attempt(l, {1, 1}, at_temperature(0.1), 0.999999));
  EXPECT_EQ(l, SpinLattice::uniform(4, 1));

  // dE = +4: one neighbour of the site already flipped.
  auto make = [] {
    auto m = SpinLattice::uniform(4, 1);
    m.flip({1, 2});
    return m;
  };
  auto hot = make();
  ASSERT_EQ(flip_energy_delta(hot, {1, 1}), 4);
  EXPECT_TRUE(metropolis_attempt(hot, {1, 1}, at_temperature(std::numeric_limits<double>::infinity()), 0.999));

  auto warm = make();
  EXPECT_FALSE(metropolis_attempt(warm, {1, 1}, at_temperature(2.0), 0.14));
  EXPECT_EQ(warm, make());
  EXPECT_TRUE(metropolis_attempt(warm, {1, 1}, at_temperature(2.0), 0.13));
}

TEST(Ising, ZeroTemperatureRejectsUphillMoves) {
  auto l = SpinLattice::uniform(4, 1);
  EXPECT_FALSE(metropolis_attempt(l, {0, 0}, at_temperature(0.0), 0.0));
  EXPECT_EQ(l, SpinLattice::uniform(4, 1));
}

TEST(Ising, ParamsValidation) {
  EXPECT_THROW(at_temperature(-1.0).validate(), Error);
  EXPECT_THROW(at_temperature(std::nan("")).validate(), Error);
  IsingParams p;
  p.size = 0;
  EXPECT_THROW(p.validate(), Error);
  p.size = 8;
  EXPECT_EQ(p.attempt_count(), 512);
}

TEST(Ising, LocalDeltaMatchesGlobalEnergyDifference) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    auto l = SpinLattice::random(n, rng);
    for (int k = 0; k < 20; ++k) {
      const Site s{static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n))};
      const double before = hamiltonian_energy(l);
      const int delta = flip_energy_delta(l, s);
      l.flip(s);
      ASSERT_EQ(hamiltonian_energy(l) - before, delta) << "n=" << n;
    }
  }
}

TEST(Ising, EnergyBoundsAndTranslationInvariance) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const auto l = SpinLattice::random(n, rng);
    const double e = hamiltonian_energy(l);
    EXPECT_LE(std::abs(e), 2.0 * n * n);
    const int dr = static_cast<int>(rng.below(n));
    const int dc = static_cast<int>(rng.below(n));
    EXPECT_EQ(hamiltonian_energy(shifted(l, dr, dc)), e);
  }
}

TEST(Ising, ExactTransitionMatrixSatisfiesDetailedBalance) {
  // 2x2 lattice: enumerate all 16 states and the Metropolis kernel with
  // uniform site choice. Acceptance of dE > 0 is exp(-beta dE).
  const double t = 2.0;
  const double beta = 1.0 / t;
  std::array<double, 16> weight{};
  std::array<std::array<double, 16>, 16> p{};
  auto lattice_of = [](int s) {
    std::vector<std::int8_t> spins(4);
    for (int b = 0; b < 4; ++b) spins[b] = (s >> b) & 1 ? 1 : -1;
    return SpinLattice::from_spins(2, spins);
  };
  for (int s = 0; s < 16; ++s) {
    const auto l = lattice_of(s);
    weight[s] = std::exp(-beta * hamiltonian_energy(l));
    for (int b = 0; b < 4; ++b) {
      const int de = flip_energy_delta(l, {b / 2, b % 2});
      const double a = de <= 0 ? 1.0 : std::exp(-beta * de);
      p[s][s ^ (1 << b)] += 0.25 * a;
    }
  }
  for (int s = 0; s < 16; ++s)
    for (int u = 0; u < 16; ++u) EXPECT_NEAR(weight[s] * p[s][u], weight[u] * p[u][s], 1e-14);
}

TEST(Ising, RunIsDeterministic) {
  IsingParams p;
  p.size = 16;
  p.temperature = 2.0;
  p.seed = 77;
  const auto a = run_ising(p);
  const auto b = run_ising(p);
  EXPECT_EQ(a.lattice, b.lattice);
  p.seed = 78;
  EXPECT_NE(run_ising(p).lattice, a.lattice);
}

TEST(Ising, HighTemperatureIsDisordered) {
  double mean_abs = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    IsingParams p;
    p.temperature = 5.0;
    p.seed = seed;
    mean_abs += std::abs(magnetization(run_ising(p).lattice)) / 20.0;
  }
  EXPECT_LT(mean_abs, 0.1);
}

TEST(Ising, LabelEncoding) {
  EXPECT_NEAR(IsingLabel{critical_temperature()}.encoded(), 127.5, 1e-12);
  EXPECT_EQ(IsingLabel{0.0}.encoded(), 0.0);
  EXPECT_NEAR(IsingLabel{2.0 * critical_temperature()}.encoded(), 255.0, 1e-12);
  EXPECT_NEAR(IsingLabel::from_encoded(51.0).encoded(), 51.0, 1e-12);
}

TEST(Ising, ImageRoundTrip) {
  EXPECT_EQ(lattice_to_image(SpinLattice::uniform(5, 1)), Image8(5, 5, 255));
  EXPECT_EQ(lattice_to_image(SpinLattice::uniform(5, -1)), Image8(5, 5, 0));
  Rng rng(1);
  const auto l = SpinLattice::random(12, rng);
  const auto img = lattice_to_image(l);
  EXPECT_EQ(image_to_lattice(img), l);
  EXPECT_EQ(lattice_to_image(image_to_lattice(img)), img);
  Image8 bad(2, 2, 0);
  bad.at(0, 0) = 17;
  EXPECT_THROW(image_to_lattice(bad), Error);
}
