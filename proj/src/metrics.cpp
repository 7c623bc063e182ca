#include "microprop/metrics.hpp"

#include <cmath>

#include "microprop/error.hpp"

namespace microprop::regress {

namespace {

void check(std::span<const double> prediction, std::span<const double> truth) {
  if (prediction.empty()) throw Error(Errc::InvalidArgument, "metrics need at least one sample");
  if (prediction.size() != truth.size()) throw Error(Errc::InvalidArgument, "prediction and truth differ in length");
}

double squared_residuals(std::span<const double> prediction, std::span<const double> truth) {
  double ss = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = prediction[i] - truth[i];
    ss += d * d;
  }
  return ss;
}

}  // namespace

double rmse(std::span<const double> prediction, std::span<const double> truth) {
  check(prediction, truth);
  return std::sqrt(squared_residuals(prediction, truth) / static_cast<double>(truth.size()));
}

double r2(std::span<const double> prediction, std::span<const double> truth) {
  check(prediction, truth);
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0.0;
  for (double t : truth) ss_tot += (t - mean) * (t - mean);
  if (ss_tot == 0.0) throw Error(Errc::ConstantTruth, "r2 is undefined for constant truth");
  return 1.0 - squared_residuals(prediction, truth) / ss_tot;
}

EvalReport evaluate(std::vector<double> truth, std::vector<double> prediction, double train_seconds,
                    double predict_seconds) {
  EvalReport report;
  report.rmse = rmse(prediction, truth);
  report.r2 = r2(prediction, truth);
  report.truth = std::move(truth);
  report.prediction = std::move(prediction);
  report.train_seconds = train_seconds;
  report.predict_seconds = predict_seconds;
  return report;
}

}  // namespace microprop::regress
