#include "microprop/fft.hpp"

#include <algorithm>
#include <cstring>
#include <fftw3.h>
#include <mutex>

#include "microprop/error.hpp"

namespace microprop {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft2d::Plans {
  double* real = nullptr;
  fftw_complex* full_in = nullptr;
  fftw_complex* full_out = nullptr;
  fftw_complex* half = nullptr;
  fftw_plan full_plan = nullptr;
  fftw_plan r2c_plan = nullptr;
  fftw_plan c2r_plan = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (full_plan) fftw_destroy_plan(full_plan);
    if (r2c_plan) fftw_destroy_plan(r2c_plan);
    if (c2r_plan) fftw_destroy_plan(c2r_plan);
    fftw_free(real);
    fftw_free(full_in);
    fftw_free(full_out);
    fftw_free(half);
  }
};

Fft2d::Fft2d(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n <= 0) throw Error(Errc::InvalidArgument, "FFT size must be positive");
  const auto nn = static_cast<std::size_t>(n) * n;
  std::lock_guard lock(planner_mutex());
  auto& p = *plans_;
  p.real = fftw_alloc_real(nn);
  p.full_in = fftw_alloc_complex(nn);
  p.full_out = fftw_alloc_complex(nn);
  p.half = fftw_alloc_complex(half_size());
  p.full_plan = fftw_plan_dft_2d(n, n, p.full_in, p.full_out, FFTW_FORWARD, FFTW_ESTIMATE);
  p.r2c_plan = fftw_plan_dft_r2c_2d(n, n, p.real, p.half, FFTW_ESTIMATE);
  p.c2r_plan = fftw_plan_dft_c2r_2d(n, n, p.half, p.real, FFTW_ESTIMATE);
}

Fft2d::~Fft2d() = default;
Fft2d::Fft2d(Fft2d&&) noexcept = default;
Fft2d& Fft2d::operator=(Fft2d&&) noexcept = default;

std::size_t Fft2d::half_size() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }

void Fft2d::forward_full(std::span<const double> in, std::span<std::complex<double>> out) {
  const auto nn = static_cast<std::size_t>(n_) * n_;
  auto& p = *plans_;
  for (std::size_t i = 0; i < nn; ++i) {
    p.full_in[i][0] = in[i];
    p.full_in[i][1] = 0.0;
  }
  fftw_execute(p.full_plan);
  std::memcpy(static_cast<void*>(out.data()), p.full_out, nn * sizeof(fftw_complex));
}

void Fft2d::forward_half(std::span<const double> in, std::span<std::complex<double>> out) {
  auto& p = *plans_;
  std::copy(in.begin(), in.end(), p.real);
  fftw_execute(p.r2c_plan);
  std::memcpy(static_cast<void*>(out.data()), p.half, half_size() * sizeof(fftw_complex));
}

void Fft2d::inverse_half(std::span<const std::complex<double>> in, std::span<double> out) {
  auto& p = *plans_;
  std::memcpy(p.half, in.data(), half_size() * sizeof(fftw_complex));
  fftw_execute(p.c2r_plan);  // c2r destroys its input; the copy above protects the caller
  std::copy(p.real, p.real + static_cast<std::size_t>(n_) * n_, out.begin());
}

}  // namespace microprop
