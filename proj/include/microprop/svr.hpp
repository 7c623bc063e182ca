#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "microprop/matrix.hpp"

namespace microprop::regress {

enum class WorkingSetSelection {
  MaximalViolatingPair,  ///< first-order: most violating (i, j)
  SecondOrder,           ///< i as above, j by largest guaranteed objective decrease
};

struct SvrParams {
  double C = 1.0;
  double gamma = 1.0;
  double epsilon = 0.1;
  /// Stop once the maximal KKT violation m(a) - M(a) drops below this.
  double tolerance = 1e-3;
  /// 0 selects max(10^7, 100 * n).
  std::int64_t max_iterations = 0;
  /// Kernel-row cache budget.
  std::size_t cache_megabytes = 1024;
  WorkingSetSelection selection = WorkingSetSelection::SecondOrder;
  /// Temporarily drop bounded variables that cannot re-enter the working
  /// set; the gradient is rebuilt before the final optimality check.
  bool shrinking = true;

  void validate() const;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// 1 / (n_features * Var(X)) over all entries; 1.0 if X has zero variance.
double gamma_scale(const RowMatrix& x);

/// Trained epsilon-SVR with RBF kernel: f(x) = sum_j coef_j K(sv_j, x) + bias.
class SvrModel {
 public:
  SvrModel(RowMatrix support_vectors, std::vector<double> coefficients, double bias, SvrParams params);

  const RowMatrix& support_vectors() const { return support_vectors_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double bias() const { return bias_; }
  const SvrParams& params() const { return params_; }
  std::size_t support_count() const { return coefficients_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(support_vectors_.cols()); }

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const RowMatrix& x) const;

 private:
  RowMatrix support_vectors_;
  std::vector<double> coefficients_;
  double bias_;
  SvrParams params_;
};

/// Model plus the full dual solution, for diagnostics and tests.
struct SvrFit {
  SvrModel model;
  std::vector<double> alpha;       ///< multipliers of the upper tube constraints
  std::vector<double> alpha_star;  ///< multipliers of the lower tube constraints
  /// 1/2 b'Kb + eps sum|b| - y'b at b = alpha - alpha_star.
  double objective = 0.0;
  std::int64_t iterations = 0;
  /// False when max_iterations was reached; the model is then the last iterate.
  bool converged = true;
};

/// Sequential minimal optimization on the 2n-variable dual
///   min 1/2 a'Qa + p'a,  y'a = 0,  0 <= a <= C
/// with Q = [K -K; -K K], p = [eps - y; eps + y], y = [1..1, -1..-1].
/// Throws InvalidArgument on bad parameters or fewer than two samples.
SvrFit svr_fit(const RowMatrix& x, std::span<const double> y, const SvrParams& params);

}  // namespace microprop::regress
