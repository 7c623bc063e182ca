#include "microprop/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>

#include "microprop/error.hpp"

namespace microprop::regress {

void SvrParams::validate() const {
  if (!(C > 0.0)) throw Error(Errc::InvalidArgument, "C must be positive");
  if (!(gamma > 0.0)) throw Error(Errc::InvalidArgument, "gamma must be positive");
  if (!(epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be non-negative");
  if (!(tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  if (max_iterations < 0) throw Error(Errc::InvalidArgument, "max_iterations must be non-negative");
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double gamma_scale(const RowMatrix& x) {
  if (x.size() == 0) return 1.0;
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

SvrModel::SvrModel(RowMatrix support_vectors, std::vector<double> coefficients, double bias, SvrParams params)
    : support_vectors_(std::move(support_vectors)), coefficients_(std::move(coefficients)), bias_(bias),
      params_(params) {
  if (static_cast<std::size_t>(support_vectors_.rows()) != coefficients_.size())
    throw Error(Errc::InvalidArgument, "support vector count does not match coefficients");
}

double SvrModel::predict(std::span<const double> x) const {
  if (!coefficients_.empty() && x.size() != dimension())
    throw Error(Errc::InvalidArgument, "feature dimension mismatch");
  double sum = 0.0;
  const auto d = static_cast<std::size_t>(support_vectors_.cols());
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    const std::span<const double> sv(support_vectors_.data() + j * d, d);
    sum += coefficients_[j] * rbf_kernel(sv, x, params_.gamma);
  }
  return sum + bias_;
}

std::vector<double> SvrModel::predict(const RowMatrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  const auto d = static_cast<std::size_t>(x.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict(std::span<const double>(x.data() + i * d, d));
  return out;
}

namespace {

/// LRU cache of kernel rows K(i, .) over the training samples.
class KernelCache {
 public:
  KernelCache(const RowMatrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma), n_(static_cast<std::size_t>(x.rows())), slots_(n_, entries_.end()) {
    const std::size_t row_bytes = std::max<std::size_t>(n_ * sizeof(double), 1);
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const double* row(std::size_t i) {
    auto slot = slots_[i];
    if (slot != entries_.end()) {
      entries_.splice(entries_.begin(), entries_, slot);
      return slot->values.data();
    }
    std::vector<double> values;
    if (entries_.size() >= capacity_) {
      auto& victim = entries_.back();
      slots_[victim.index] = entries_.end();
      values = std::move(victim.values);
      entries_.pop_back();
    }
    values.resize(n_);
    const auto d = static_cast<std::size_t>(x_.cols());
    const std::span<const double> xi(x_.data() + i * d, d);
    for (std::size_t t = 0; t < n_; ++t) values[t] = rbf_kernel(xi, std::span<const double>(x_.data() + t * d, d), gamma_);
    entries_.push_front(Entry{i, std::move(values)});
    slots_[i] = entries_.begin();
    return entries_.front().values.data();
  }

 private:
  struct Entry {
    std::size_t index;
    std::vector<double> values;
  };

  const RowMatrix& x_;
  double gamma_;
  std::size_t n_;
  std::size_t capacity_ = 2;
  std::list<Entry> entries_;
  std::vector<std::list<Entry>::iterator> slots_;
};

constexpr double kTau = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum : std::uint8_t { kLower, kFree, kUpper };

// The 2n dual variables are alpha_k (sign +1) and alpha*_k (sign -1) for each
// sample k, stored as two halves indexed by k. With a = [alpha; alpha*],
// Q(s, t) = sign_s sign_t K(k_s, k_t) and Q(t, t) = 1 for RBF.
//
// For the selection rules, "up" variables may increase sign*alpha and carry
// the value -sign*G; "down" variables may decrease it and carry sign*G.
class Solver {
 public:
  Solver(const RowMatrix& x, std::span<const double> y, const SvrParams& params)
      : params_(params), n_(static_cast<std::size_t>(x.rows())), cache_(x, params.gamma, params.cache_megabytes << 20) {
    for (Half& h : half_) {
      h.alpha.assign(n_, 0.0);
      h.status.assign(n_, kLower);
      h.grad_bar.assign(n_, 0.0);
      h.p.resize(n_);
      h.active.resize(n_);
      for (std::size_t k = 0; k < n_; ++k) h.active[k] = static_cast<std::uint32_t>(k);
    }
    for (std::size_t k = 0; k < n_; ++k) {
      half_[0].p[k] = params.epsilon - y[k];
      half_[1].p[k] = params.epsilon + y[k];
    }
    for (Half& h : half_) h.grad = h.p;  // alpha = 0
  }

  void solve() {
    const std::int64_t max_iter =
        params_.max_iterations > 0 ? params_.max_iterations
                                   : std::max<std::int64_t>(10'000'000, 100 * static_cast<std::int64_t>(n_));
    const std::int64_t period = std::min<std::int64_t>(static_cast<std::int64_t>(2 * n_), 1000);
    std::int64_t counter = period + 1;
    converged_ = false;
    Candidate up = scan_up();
    while (iterations_ < max_iter) {
      if (--counter == 0) {
        counter = period;
        if (params_.shrinking && shrink()) up = scan_up();
      }
      Var j;
      if (!select(up, j)) {
        if (!full()) {
          reactivate();
          up = scan_up();
        }
        if (!select(up, j)) {
          converged_ = true;
          break;
        }
        counter = 1;
      }
      ++iterations_;
      up = update(up.var, j);
    }
    reactivate();
  }

  double bias() const {
    // Average of sign*G over free variables, else midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = kNegInf;
    double sum_free = 0.0;
    std::size_t free = 0;
    for (int h = 0; h < 2; ++h) {
      const double sgn = h == 0 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < n_; ++k) {
        const double yg = sgn * half_[h].grad[k];
        const auto st = half_[h].status[k];
        if (st == kFree) {
          ++free;
          sum_free += yg;
        } else if ((st == kUpper) == (h == 1)) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      }
    }
    const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
    return -rho;
  }

  double objective() const {
    double sum = 0.0;
    for (const Half& h : half_)
      for (std::size_t k = 0; k < n_; ++k) sum += h.alpha[k] * (h.grad[k] + h.p[k]);
    return 0.5 * sum;
  }

  std::vector<double> alpha(int h) const { return half_[h].alpha; }
  std::int64_t iterations() const { return iterations_; }
  bool converged() const { return converged_; }

 private:
  struct Half {
    std::vector<double> alpha;
    std::vector<std::uint8_t> status;
    std::vector<double> p;
    std::vector<double> grad;
    std::vector<double> grad_bar;  // sum over upper-bounded v of C Q(t, v)
    std::vector<std::uint32_t> active;
  };

  struct Var {
    int half = 0;
    std::size_t k = 0;
    double sign() const { return half == 0 ? 1.0 : -1.0; }
  };

  struct Candidate {
    Var var;
    double value = kNegInf;
    bool found = false;
  };

  // Blocking status for "up" is kUpper on the alpha half and kLower on alpha*.
  static constexpr std::uint8_t kNoUp[2] = {kUpper, kLower};
  static constexpr std::uint8_t kNoDown[2] = {kLower, kUpper};

  bool full() const { return half_[0].active.size() == n_ && half_[1].active.size() == n_; }

  void set_status(Var v) {
    const double a = half_[v.half].alpha[v.k];
    half_[v.half].status[v.k] = a >= params_.C ? kUpper : a <= 0.0 ? kLower : kFree;
  }

  // Ties go to the later variable in [alpha; alpha*] order.
  static void offer(Candidate& c, int h, std::size_t k, double value) {
    if (value >= c.value) {
      c.value = value;
      c.var = {h, k};
      c.found = true;
    }
  }

  Candidate scan_up() const {
    Candidate c;
    for (int h = 0; h < 2; ++h) {
      const Half& hf = half_[h];
      const double neg_sign = h == 0 ? -1.0 : 1.0;
      for (const std::uint32_t k : hf.active)
        if (hf.status[k] != kNoUp[h]) offer(c, h, k, neg_sign * hf.grad[k]);
    }
    return c;
  }

  bool select(const Candidate& up, Var& out_j) const {
    if (!up.found) return false;
    const double gmax = up.value;
    double gmax2 = kNegInf;
    bool found = false;
    Var j;
    if (params_.selection == WorkingSetSelection::MaximalViolatingPair) {
      Candidate down;
      for (int h = 0; h < 2; ++h) {
        const Half& hf = half_[h];
        const double sgn = h == 0 ? 1.0 : -1.0;
        for (const std::uint32_t k : hf.active)
          if (hf.status[k] != kNoDown[h]) offer(down, h, k, sgn * hf.grad[k]);
      }
      gmax2 = down.value;
      found = down.found;
      j = down.var;
    } else {
      // Maximize diff^2 / quad, compared by cross-multiplication.
      const double* ki = cache_.row(up.var.k);
      const double si = up.var.sign();
      double best_num = 0.0;
      double best_den = 1.0;
      for (int h = 0; h < 2; ++h) {
        const Half& hf = half_[h];
        const double sgn = h == 0 ? 1.0 : -1.0;
        const double two_ss = 2.0 * si * sgn;
        const std::uint8_t blocked = kNoDown[h];
        for (const std::uint32_t k : hf.active) {
          if (hf.status[k] == blocked) continue;
          const double v = sgn * hf.grad[k];
          gmax2 = std::max(gmax2, v);
          const double diff = gmax + v;
          if (diff > 0.0) {
            // Q_ii + Q_tt - 2 s_i s_t K_it
            const double quad = std::max(2.0 - two_ss * ki[k], kTau);
            const double num = diff * diff;
            if (num * best_den >= best_num * quad) {
              best_num = num;
              best_den = quad;
              j = {h, k};
              found = true;
            }
          }
        }
      }
    }
    if (gmax + gmax2 < params_.tolerance || !found) return false;
    out_j = j;
    return true;
  }

  // Applies the pair step and returns the next "up" candidate, found while
  // the gradient is being updated.
  Candidate update(Var vi, Var vj) {
    const double c = params_.C;
    const double* ki = cache_.row(vi.k);
    const double* kj = cache_.row(vj.k);
    const double qij = vi.sign() * vj.sign() * ki[vj.k];
    double& ai = half_[vi.half].alpha[vi.k];
    double& aj = half_[vj.half].alpha[vj.k];
    const double gi = half_[vi.half].grad[vi.k];
    const double gj = half_[vj.half].grad[vj.k];
    const double old_i = ai;
    const double old_j = aj;
    if (vi.half != vj.half) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-gi - gj) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (gi - gj) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const bool was_upper_i = half_[vi.half].status[vi.k] == kUpper;
    const bool was_upper_j = half_[vj.half].status[vj.k] == kUpper;
    set_status(vi);
    set_status(vj);
    if (was_upper_i != (half_[vi.half].status[vi.k] == kUpper)) shift_grad_bar(ki, vi.sign() * (was_upper_i ? -c : c));
    if (was_upper_j != (half_[vj.half].status[vj.k] == kUpper)) shift_grad_bar(kj, vj.sign() * (was_upper_j ? -c : c));

    // G_t += s_t (K_ti s_i di + K_tj s_j dj).
    const double si = vi.sign() * (ai - old_i);
    const double sj = vj.sign() * (aj - old_j);
    Candidate up;
    Half& pos = half_[0];
    Half& neg = half_[1];
    if (full()) {
      double* gp = pos.grad.data();
      double* gn = neg.grad.data();
      for (std::size_t k = 0; k < n_; ++k) {
        const double d = ki[k] * si + kj[k] * sj;
        gp[k] += d;
        gn[k] -= d;
      }
      for (std::size_t k = 0; k < n_; ++k)
        if (pos.status[k] != kUpper) offer(up, 0, k, -gp[k]);
      for (std::size_t k = 0; k < n_; ++k)
        if (neg.status[k] != kLower) offer(up, 1, k, gn[k]);
    } else {
      for (const std::uint32_t k : pos.active) {
        pos.grad[k] += ki[k] * si + kj[k] * sj;
        if (pos.status[k] != kUpper) offer(up, 0, k, -pos.grad[k]);
      }
      for (const std::uint32_t k : neg.active) {
        neg.grad[k] -= ki[k] * si + kj[k] * sj;
        if (neg.status[k] != kLower) offer(up, 1, k, neg.grad[k]);
      }
    }
    return up;
  }

  void shift_grad_bar(const double* krow, double scaled) {
    double* bp = half_[0].grad_bar.data();
    double* bn = half_[1].grad_bar.data();
    for (std::size_t k = 0; k < n_; ++k) {
      bp[k] += scaled * krow[k];
      bn[k] -= scaled * krow[k];
    }
  }

  // Drops bounded variables that no partner can pair with into a violation.
  // Returns whether the active set changed.
  bool shrink() {
    double gmax_up = kNegInf;
    double gmax_down = kNegInf;
    for (int h = 0; h < 2; ++h) {
      const Half& hf = half_[h];
      const double sgn = h == 0 ? 1.0 : -1.0;
      for (const std::uint32_t k : hf.active) {
        const double v = sgn * hf.grad[k];
        if (hf.status[k] != kNoUp[h]) gmax_up = std::max(gmax_up, -v);
        if (hf.status[k] != kNoDown[h]) gmax_down = std::max(gmax_down, v);
      }
    }
    bool changed = false;
    if (!unshrunk_ && gmax_up + gmax_down <= 10.0 * params_.tolerance) {
      unshrunk_ = true;
      changed = !full();
      reactivate();
    }
    for (int h = 0; h < 2; ++h) {
      Half& hf = half_[h];
      const double sgn = h == 0 ? 1.0 : -1.0;
      const std::size_t before = hf.active.size();
      std::erase_if(hf.active, [&](std::uint32_t k) {
        const auto st = hf.status[k];
        if (st == kFree) return false;
        const double v = sgn * hf.grad[k];
        if (st == kNoUp[h]) return -v > gmax_up;  // down-only
        return v > gmax_down;                     // up-only
      });
      changed = changed || hf.active.size() != before;
    }
    return changed;
  }

  // Rebuilds the gradient of inactive variables and makes every variable active.
  void reactivate() {
    if (full()) return;
    std::vector<std::uint32_t> inactive[2];
    for (int h = 0; h < 2; ++h) {
      Half& hf = half_[h];
      std::vector<std::uint8_t> is_active(n_, 0);
      for (const std::uint32_t k : hf.active) is_active[k] = 1;
      for (std::size_t k = 0; k < n_; ++k)
        if (!is_active[k]) {
          inactive[h].push_back(static_cast<std::uint32_t>(k));
          hf.grad[k] = hf.grad_bar[k] + hf.p[k];
        }
    }
    for (int hv = 0; hv < 2; ++hv) {
      const Half& src = half_[hv];
      for (std::size_t v = 0; v < n_; ++v) {
        if (src.status[v] != kFree) continue;
        const double* kv = cache_.row(v);
        const double sv = (hv == 0 ? 1.0 : -1.0) * src.alpha[v];
        for (const std::uint32_t k : inactive[0]) half_[0].grad[k] += sv * kv[k];
        for (const std::uint32_t k : inactive[1]) half_[1].grad[k] -= sv * kv[k];
      }
    }
    for (Half& hf : half_) {
      hf.active.resize(n_);
      for (std::size_t k = 0; k < n_; ++k) hf.active[k] = static_cast<std::uint32_t>(k);
    }
  }

  SvrParams params_;
  std::size_t n_;
  mutable KernelCache cache_;
  Half half_[2];
  bool unshrunk_ = false;
  std::int64_t iterations_ = 0;
  bool converged_ = true;
};

}  // namespace

SvrFit svr_fit(const RowMatrix& x, std::span<const double> y, const SvrParams& params) {
  params.validate();
  if (x.rows() < 2) throw Error(Errc::InvalidArgument, "SVR needs at least two samples");
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(Errc::InvalidArgument, "feature rows and targets differ in count");

  Solver solver(x, y, params);
  solver.solve();

  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> alpha = solver.alpha(0);
  std::vector<double> alpha_star = solver.alpha(1);
  // Cancel any overlap between alpha_i and alpha*_i. The expansion is
  // unchanged and the objective drops by 2 eps min(alpha_i, alpha*_i).
  double objective = solver.objective();
  for (std::size_t t = 0; t < n; ++t) {
    const double overlap = std::min(alpha[t], alpha_star[t]);
    if (overlap > 0.0) {
      const double coef = alpha[t] - alpha_star[t];
      alpha[t] = std::max(coef, 0.0);
      alpha_star[t] = std::max(-coef, 0.0);
      objective -= 2.0 * params.epsilon * overlap;
    }
  }

  std::vector<Eigen::Index> support;
  std::vector<double> coefficients;
  for (std::size_t t = 0; t < n; ++t) {
    const double coef = alpha[t] - alpha_star[t];
    if (coef != 0.0) {
      support.push_back(static_cast<Eigen::Index>(t));
      coefficients.push_back(coef);
    }
  }
  RowMatrix sv(static_cast<Eigen::Index>(support.size()), x.cols());
  for (std::size_t k = 0; k < support.size(); ++k) sv.row(static_cast<Eigen::Index>(k)) = x.row(support[k]);

  SvrModel model(std::move(sv), std::move(coefficients), solver.bias(), params);
  return SvrFit{std::move(model), std::move(alpha), std::move(alpha_star), objective, solver.iterations(),
                solver.converged()};
}

}  // namespace microprop::regress
