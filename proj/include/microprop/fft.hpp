#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace microprop {

/// Square 2-D transforms backed by FFTW with owned, aligned buffers.
///
/// Buffers are allocated once per plan, so repeated transforms of the same
/// input produce bit-identical output regardless of caller alignment.
/// Transforms are unnormalized (FFTW convention); callers scale.
class Fft2d {
 public:
  explicit Fft2d(int n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;
  Fft2d(Fft2d&&) noexcept;
  Fft2d& operator=(Fft2d&&) noexcept;

  int size() const { return n_; }
  /// Number of complex coefficients in the half spectrum (n * (n/2 + 1)).
  std::size_t half_size() const;

  /// Full complex spectrum of a real n*n row-major field (n*n entries).
  void forward_full(std::span<const double> in, std::span<std::complex<double>> out);
  /// Half spectrum of a real field: rows 0..n-1, columns 0..n/2.
  void forward_half(std::span<const double> in, std::span<std::complex<double>> out);
  /// Inverse of forward_half; overwrites `out` with the real field (unnormalized).
  void inverse_half(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Plans;
  int n_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace microprop
