#pragma once

#include <span>
#include <vector>

namespace microprop::regress {

/// sqrt(mean((p - t)^2)). Throws InvalidArgument on empty or mismatched input.
double rmse(std::span<const double> prediction, std::span<const double> truth);

/// 1 - SS_res / SS_tot. Throws ConstantTruth when the truth has zero spread.
double r2(std::span<const double> prediction, std::span<const double> truth);

struct EvalReport {
  std::vector<double> truth;
  std::vector<double> prediction;
  double rmse = 0.0;
  double r2 = 0.0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

/// Fills rmse and r2 from the stored pairs.
EvalReport evaluate(std::vector<double> truth, std::vector<double> prediction, double train_seconds = 0.0,
                    double predict_seconds = 0.0);

}  // namespace microprop::regress
