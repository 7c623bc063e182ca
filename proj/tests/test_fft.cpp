#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "microprop/fft.hpp"
#include "microprop/rng.hpp"

using namespace microprop;
using cd = std::complex<double>;

namespace {

std::vector<double> random_field(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (auto& x : v) x = rng.uniform() * 255.0;
  return v;
}

// F(u,v) = sum_{r,c} x(r,c) exp(-2 pi i (u r + v c) / n)
std::vector<cd> naive_dft(const std::vector<double>& x, int n) {
  std::vector<cd> out(x.size());
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      cd sum = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const double phase = -2.0 * std::numbers::pi * ((u * r + v * c) % n) / n;
          sum += x[static_cast<std::size_t>(r) * n + c] * std::polar(1.0, phase);
        }
      out[static_cast<std::size_t>(u) * n + v] = sum;
    }
  return out;
}

}  // namespace

TEST(Fft, FullSpectrumMatchesNaiveDft) {
  for (int n : {4, 8, 12}) {
    const auto x = random_field(n, static_cast<std::uint64_t>(n));
    Fft2d fft(n);
    std::vector<cd> out(x.size());
    fft.forward_full(x, out);
    const auto ref = naive_dft(x, n);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(out[i] - ref[i]), 1e-9) << "n=" << n << " i=" << i;
  }
}

TEST(Fft, HalfSpectrumIsLeadingColumnsAndHermitian) {
  const int n = 16;
  const auto x = random_field(n, 2);
  Fft2d fft(n);
  std::vector<cd> full(x.size()), half(fft.half_size());
  fft.forward_full(x, full);
  fft.forward_half(x, half);
  const int w = n / 2 + 1;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < w; ++v) EXPECT_LT(std::abs(half[u * w + v] - full[u * n + v]), 1e-9);
    for (int v = 0; v < n; ++v) {
      const cd conj_partner = std::conj(full[((n - u) % n) * n + (n - v) % n]);
      EXPECT_LT(std::abs(full[u * n + v] - conj_partner), 1e-9);
    }
  }
}

TEST(Fft, InverseHalfIsUnnormalizedInverse) {
  const int n = 32;
  const auto x = random_field(n, 3);
  Fft2d fft(n);
  std::vector<cd> half(fft.half_size());
  fft.forward_half(x, half);
  const auto saved = half;
  std::vector<double> back(x.size());
  fft.inverse_half(half, back);
  EXPECT_EQ(half, saved);  // input left intact
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back[i] / (n * n), x[i], 1e-10);
}

TEST(Fft, ParsevalWithUnitaryScaling) {
  const int n = 64;
  const auto x = random_field(n, 4);
  Fft2d fft(n);
  std::vector<cd> full(x.size());
  fft.forward_full(x, full);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var_sum = 0.0;
  for (double v : x) var_sum += (v - mean) * (v - mean);
  double ac = 0.0;
  for (std::size_t i = 1; i < full.size(); ++i) ac += std::norm(full[i]) / (n * n);
  EXPECT_NEAR(ac, var_sum, 1e-8 * var_sum);
}

TEST(Fft, RepeatedTransformsAreBitIdentical) {
  const int n = 64;
  const auto x = random_field(n, 5);
  Fft2d a(n);
  Fft2d b(n);
  std::vector<cd> o1(x.size()), o2(x.size()), o3(x.size());
  a.forward_full(x, o1);
  a.forward_full(x, o2);
  b.forward_full(x, o3);
  EXPECT_EQ(o1, o2);
  EXPECT_EQ(o1, o3);
}
