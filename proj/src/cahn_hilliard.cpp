#include "microprop/cahn_hilliard.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "microprop/error.hpp"

namespace microprop::ch {

std::vector<double> time_schedule(int n_log, double dt_min, double dt_max, int n_const, double dt_const) {
  if (n_log <= 0 || n_const <= 0) throw Error(Errc::ScheduleInvalid, "step counts must be positive");
  if (!(dt_min > 0.0) || !(dt_max > 0.0) || !(dt_const > 0.0))
    throw Error(Errc::ScheduleInvalid, "step sizes must be positive");
  if (n_log > 1 && !(dt_min < dt_max)) throw Error(Errc::ScheduleInvalid, "dt_min must be below dt_max");

  std::vector<double> dts;
  dts.reserve(static_cast<std::size_t>(n_log) + n_const);
  if (n_log == 1) {
    dts.push_back(dt_min);
  } else {
    const double ratio = std::log(dt_max / dt_min);
    for (int i = 0; i < n_log; ++i) dts.push_back(dt_min * std::exp(ratio * i / (n_log - 1)));
    dts.back() = dt_max;
  }
  dts.insert(dts.end(), static_cast<std::size_t>(n_const), dt_const);
  return dts;
}

std::vector<double> TimeSchedule::steps() const { return time_schedule(n_log, dt_min, dt_max, n_const, dt_const); }

bool TimeSchedule::exported(std::int64_t step) const {
  if (step <= n_log) return step >= 1;
  return (step - n_log) % export_every == 0;
}

std::int64_t TimeSchedule::snapshot_count() const { return n_log + n_const / export_every; }

ConcentrationField::ConcentrationField(int size, double length, std::vector<double> values)
    : size_(size), length_(length), values_(std::move(values)) {
  if (size <= 0 || !(length > 0.0)) throw Error(Errc::InvalidArgument, "field size and length must be positive");
  if (values_.size() != static_cast<std::size_t>(size) * size)
    throw Error(Errc::InvalidArgument, "field values do not match grid size");
}

ConcentrationField ConcentrationField::uniform(int size, double length, double value) {
  return ConcentrationField(size, length, std::vector<double>(static_cast<std::size_t>(size) * size, value));
}

ConcentrationField ConcentrationField::random(int size, double length, Rng& rng) {
  std::vector<double> values(static_cast<std::size_t>(size) * size);
  for (auto& v : values) v = rng.uniform();
  return ConcentrationField(size, length, std::move(values));
}

double ConcentrationField::mean() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

void ChParams::validate() const {
  if (size <= 0 || size % 2 != 0) throw Error(Errc::InvalidArgument, "grid size must be positive and even");
  if (!(length > 0.0)) throw Error(Errc::InvalidArgument, "domain length must be positive");
  if (!(c0 > 0.0) || !(kc > 0.0) || !(mobility > 0.0))
    throw Error(Errc::InvalidArgument, "c0, kc and mobility must be positive");
  if (!(stabilization_constant() >= 0.0)) throw Error(Errc::InvalidArgument, "stabilization must be >= 0");
  if (schedule.export_every <= 0) throw Error(Errc::ScheduleInvalid, "export stride must be positive");
  (void)schedule.steps();
}

namespace {

std::vector<double> wavenumbers_squared(int n, double length) {
  const int half = n / 2 + 1;
  std::vector<double> k2(static_cast<std::size_t>(n) * half);
  const double unit = 2.0 * std::numbers::pi / length;
  for (int i = 0; i < n; ++i) {
    const int ki = i <= n / 2 ? i : i - n;
    for (int j = 0; j < half; ++j) {
      const double kx = unit * j;
      const double ky = unit * ki;
      k2[static_cast<std::size_t>(i) * half + j] = kx * kx + ky * ky;
    }
  }
  return k2;
}

double bulk_density(double c, double c0) {
  const double d = c * (1.0 - c);
  return c0 * d * d;
}

// f'(c) for f = c0 c^2 (1-c)^2
double bulk_derivative(double c, double c0) { return c0 * (4.0 * c * c * c - 6.0 * c * c + 2.0 * c); }

}  // namespace

ChSolver::ChSolver(const ChParams& params)
    : params_(params),
      fft_(params.size),
      k2_(wavenumbers_squared(params.size, params.length)),
      work_(static_cast<std::size_t>(params.size) * params.size),
      c_hat_(fft_.half_size()),
      f_hat_(fft_.half_size()) {
  params_.validate();
}

double ChSolver::energy(const ConcentrationField& field) {
  const int n = params_.size;
  if (field.size() != n) throw Error(Errc::InvalidArgument, "field does not match solver grid");
  double bulk = 0.0;
  for (double c : field.values()) bulk += bulk_density(c, params_.c0);

  fft_.forward_half(field.values(), c_hat_);
  const int half = n / 2 + 1;
  double grad2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < half; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * half + j;
      const double weight = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      grad2 += weight * k2_[q] * std::norm(c_hat_[q]);
    }
  }
  // Parseval for the unnormalized DFT: sum_x |g|^2 = (1/N^2) sum_k |g_hat|^2.
  grad2 /= static_cast<double>(n) * n;
  const double cell = field.spacing() * field.spacing();
  return cell * (bulk + 0.5 * params_.kc * grad2);
}

void ChSolver::step(ConcentrationField& field, double dt) {
  const int n = params_.size;
  if (field.size() != n) throw Error(Errc::InvalidArgument, "field does not match solver grid");
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "dt must be positive");
  const double s = params_.stabilization_constant();
  const double m = params_.mobility;
  const double kc = params_.kc;

  auto& c = field.values();
  for (std::size_t p = 0; p < c.size(); ++p) work_[p] = bulk_derivative(c[p], params_.c0) - s * c[p];
  fft_.forward_half(work_, f_hat_);
  fft_.forward_half(c, c_hat_);

  const double inv_nn = 1.0 / (static_cast<double>(n) * n);
  // q = 0 (the mean) is carried over unchanged.
  c_hat_[0] *= inv_nn;
  for (std::size_t q = 1; q < c_hat_.size(); ++q) {
    const double k2 = k2_[q];
    const double implicit = 1.0 + dt * m * k2 * (s + kc * k2);
    c_hat_[q] = (c_hat_[q] - dt * m * k2 * f_hat_[q]) / implicit * inv_nn;
  }
  fft_.inverse_half(c_hat_, c);

  for (double v : c)
    if (!std::isfinite(v)) throw Error(Errc::StepUnstable, "non-finite concentration (dt too large?)");
}

double free_energy(const ConcentrationField& field, const ChParams& params) {
  ChParams grid = params;
  grid.size = field.size();
  grid.length = field.length();
  ChSolver solver(grid);
  return solver.energy(field);
}

ConcentrationField ch_step(const ConcentrationField& field, double dt, const ChParams& params) {
  ChParams grid = params;
  grid.size = field.size();
  grid.length = field.length();
  ChSolver solver(grid);
  ConcentrationField next = field;
  solver.step(next, dt);
  return next;
}

void run_ch(const ChParams& params, const SnapshotSink& sink) {
  params.validate();
  Rng rng(params.seed);
  auto field = ConcentrationField::random(params.size, params.length, rng);
  ChSolver solver(params);
  const auto dts = params.schedule.steps();
  double time = 0.0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const auto step = static_cast<std::int64_t>(i) + 1;
    try {
      solver.step(field, dts[i]);
    } catch (const Error& e) {
      if (e.code() != Errc::StepUnstable) throw;
      throw Error(Errc::StepUnstable, "step " + std::to_string(step) + " (dt=" + std::to_string(dts[i]) + ")");
    }
    time += dts[i];
    if (params.schedule.exported(step))
      sink(ChSnapshot{step, time, solver.energy(field), field.mean(), field_to_image(field)});
  }
}

std::vector<ChSnapshot> run_ch(const ChParams& params) {
  std::vector<ChSnapshot> out;
  out.reserve(static_cast<std::size_t>(params.schedule.snapshot_count()));
  run_ch(params, [&](const ChSnapshot& s) { out.push_back(s); });
  return out;
}

Image8 field_to_image(const ConcentrationField& field) {
  Image8 image(field.size(), field.size());
  for (std::size_t i = 0; i < field.values().size(); ++i) {
    const double v = std::clamp(field.values()[i], 0.0, 1.0) * 255.0;
    image.pixels[i] = static_cast<std::uint8_t>(std::nearbyint(v));  // FE_TONEAREST: half to even
  }
  return image;
}

}  // namespace microprop::ch
