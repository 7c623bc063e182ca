#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "microprop/fft.hpp"
#include "microprop/image.hpp"
#include "microprop/rng.hpp"

namespace microprop::ch {

/// Two-phase step-size schedule: n_log steps log-spaced from dt_min to
/// dt_max, then n_const steps of dt_const.
struct TimeSchedule {
  int n_log = 2000;
  double dt_min = 1e-7;
  double dt_max = 1e-4;
  int n_const = 10000;
  double dt_const = 1e-4;
  /// Snapshot stride during the constant phase.
  int export_every = 10;

  std::vector<double> steps() const;
  /// Whether the state after 1-based step `step` is exported.
  bool exported(std::int64_t step) const;
  std::int64_t total_steps() const { return static_cast<std::int64_t>(n_log) + n_const; }
  std::int64_t snapshot_count() const;
};

/// Throws ScheduleInvalid on non-positive counts or step sizes, or when
/// dt_min >= dt_max with more than one log step.
std::vector<double> time_schedule(int n_log, double dt_min, double dt_max, int n_const, double dt_const);

/// Periodic N x N concentration field on a square domain of edge `length`.
class ConcentrationField {
 public:
  ConcentrationField(int size, double length, std::vector<double> values);
  static ConcentrationField uniform(int size, double length, double value);
  /// Independent U[0,1) values in row-major order.
  static ConcentrationField random(int size, double length, Rng& rng);

  int size() const { return size_; }
  double length() const { return length_; }
  double spacing() const { return length_ / size_; }
  double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * size_ + c]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double mean() const;

 private:
  int size_;
  double length_;
  std::vector<double> values_;
};

/// Bulk + gradient model parameters in solver units.
///
/// Defaults: c0 = 50, kc = 10, M = 1 on a 20 x 20 domain at 64^2. The
/// stabilization constant S adds S*Laplacian(c) implicitly and removes it
/// explicitly; S >= max|f''|/2 makes the step energy-diminishing for any dt.
struct ChParams {
  int size = 64;
  double length = 20.0;
  double mobility = 1.0;
  double c0 = 50.0;
  double kc = 10.0;
  /// Unset selects 2 * c0.
  std::optional<double> stabilization;
  TimeSchedule schedule;
  std::uint64_t seed = 0;

  double stabilization_constant() const { return stabilization.value_or(2.0 * c0); }
  void validate() const;
};

/// Integral of c0 c^2 (1-c)^2 + kc/2 |grad c|^2 over the domain. Midpoint
/// quadrature; gradient term evaluated spectrally via Parseval.
double free_energy(const ConcentrationField& field, const ChParams& params);

/// Semi-implicit Fourier-spectral stepper. Holds FFT plans and wavenumber
/// tables for one grid; reuse it across steps.
class ChSolver {
 public:
  explicit ChSolver(const ChParams& params);

  /// One step of dc/dt = M Lap(mu), mu = c0 (4c^3 - 6c^2 + 2c) - kc Lap(c).
  /// The k = 0 mode is left untouched. Throws StepUnstable on non-finite output.
  void step(ConcentrationField& field, double dt);
  double energy(const ConcentrationField& field);

 private:
  ChParams params_;
  Fft2d fft_;
  std::vector<double> k2_;  // |k|^2 on the half spectrum
  std::vector<double> work_;
  std::vector<std::complex<double>> c_hat_;
  std::vector<std::complex<double>> f_hat_;
};

ConcentrationField ch_step(const ConcentrationField& field, double dt, const ChParams& params);

struct ChSnapshot {
  std::int64_t step = 0;  ///< 1-based count of completed steps
  double time = 0.0;
  double energy = 0.0;
  double mean = 0.0;
  Image8 image;
};

using SnapshotSink = std::function<void(const ChSnapshot&)>;

/// Integrates the full schedule from a seeded random field and hands every
/// exported snapshot to `sink`. StepUnstable is rethrown with the step index.
void run_ch(const ChParams& params, const SnapshotSink& sink);
std::vector<ChSnapshot> run_ch(const ChParams& params);

/// Clamp to [0,1], scale by 255, round half to even.
Image8 field_to_image(const ConcentrationField& field);

}  // namespace microprop::ch
