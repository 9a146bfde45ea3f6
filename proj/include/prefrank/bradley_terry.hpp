// Copyright 2026 The prefrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PREFRANK_BRADLEY_TERRY_HPP_
#define PREFRANK_BRADLEY_TERRY_HPP_

// Penalized maximum-likelihood Bradley-Terry fits over log-strengths
//
//   maximize  sum_{i,j} w_ij log sigmoid(xi_i - xi_j)  -  (l2 / 2) |xi|^2
//
// where w_ij is the (weighted) number of times model i beat model j. A tie
// contributes half a win in each direction. The solution is pinned to
// sum(xi) = 0 over the observed models.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prefrank/battle.hpp"
#include "prefrank/error.hpp"
#include "prefrank/matrix.hpp"
#include "prefrank/ratings.hpp"

namespace prefrank {

enum class TiePolicy { kHalfWinEach };

struct BtConfig {
  double l2_penalty = 1e-4;
  int max_iterations = 500;
  double tolerance = 1e-10;
  TiePolicy tie_policy = TiePolicy::kHalfWinEach;
  double scale = 400.0;
  double anchor = 1000.0;
};

struct BtModelFit {
  // Indexed by ModelId; NaN for models the subject never battled.
  std::vector<double> log_strength;
  std::vector<bool> observed;
  double log_likelihood = 0.0;  // unpenalized
  double objective = 0.0;       // penalized
  bool converged = false;
  int iterations = 0;

  double strength(std::size_t m) const { return std::exp(log_strength[m]); }
};

// Thrown when the iteration budget runs out; the partial fit is attached.
class BtNotConverged : public Error {
 public:
  explicit BtNotConverged(BtModelFit fit)
      : Error(Errc::kNotConverged,
              "no convergence after " + std::to_string(fit.iterations) + " iterations"),
        fit_(std::move(fit)) {}
  const BtModelFit& fit() const noexcept { return fit_; }

 private:
  BtModelFit fit_;
};

// Weighted win counts among the models a subject observed.
struct PairwiseWins {
  std::size_t model_count = 0;        // size of the log's model universe
  std::vector<std::size_t> models;    // compact index -> ModelId index
  Matrix wins;                        // wins(i, j): weight of i beating j

  std::size_t size() const { return models.size(); }
};

inline PairwiseWins tally_pairwise(const BattleLog& log, const Subject& subject,
                                   TiePolicy = TiePolicy::kHalfWinEach) {
  const auto records = detail::subject_records(log, subject);
  std::vector<std::ptrdiff_t> compact(log.model_count(), -1);
  PairwiseWins out;
  out.model_count = log.model_count();
  for (std::size_t i : records) {
    for (ModelId m : {log.key(i).model_a, log.key(i).model_b}) {
      compact[index_of(m)] = 0;
    }
  }
  for (std::size_t m = 0; m < compact.size(); ++m) {
    if (compact[m] == 0) {
      compact[m] = static_cast<std::ptrdiff_t>(out.models.size());
      out.models.push_back(m);
    }
  }
  out.wins = Matrix(out.models.size(), out.models.size());
  for (std::size_t i : records) {
    const auto& key = log.key(i);
    const auto a = static_cast<std::size_t>(compact[index_of(key.model_a)]);
    const auto b = static_cast<std::size_t>(compact[index_of(key.model_b)]);
    switch (collapse_both_bad(key.outcome)) {
      case Outcome::kAWins: out.wins(a, b) += 1.0; break;
      case Outcome::kBWins: out.wins(b, a) += 1.0; break;
      default:
        out.wins(a, b) += 0.5;
        out.wins(b, a) += 0.5;
        break;
    }
  }
  return out;
}

namespace detail {

inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct BtValue {
  double log_likelihood;
  double objective;
};

inline BtValue bt_value(const PairwiseWins& w, std::span<const double> xi, double l2) {
  const std::size_t n = w.size();
  double ll = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sq += xi[i] * xi[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (w.wins(i, j) > 0.0) ll += w.wins(i, j) * log_sigmoid(xi[i] - xi[j]);
    }
  }
  return {ll, ll - 0.5 * l2 * sq};
}

// Gradient and negated Hessian of the penalized objective.
inline void bt_derivatives(const PairwiseWins& w, std::span<const double> xi,
                           double l2, std::vector<double>& grad, Matrix& neg_hess) {
  const std::size_t n = w.size();
  grad.assign(n, 0.0);
  neg_hess = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = -l2 * xi[i];
    neg_hess(i, i) = l2;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double games = w.wins(i, j) + w.wins(j, i);
      if (games == 0.0) continue;
      const double p = sigmoid(xi[i] - xi[j]);
      grad[i] += w.wins(i, j) - games * p;
      const double curv = games * p * (1.0 - p);
      neg_hess(i, i) += curv;
      neg_hess(i, j) -= curv;
    }
  }
}

// Solves A x = b for symmetric positive-definite A. Returns false when a
// pivot is not clearly positive.
inline bool cholesky_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double floor = 1e-13 * std::max(1.0, max_diag);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > floor)) return false;
    d = std::sqrt(d);
    a(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
    b[i] = s / a(i, i);
  }
  x = std::move(b);
  return true;
}

inline void center(std::vector<double>& xi) {
  if (xi.empty()) return;
  double mean = 0.0;
  for (double v : xi) mean += v;
  mean /= static_cast<double>(xi.size());
  for (double& v : xi) v -= mean;
}

// Without a penalty the MLE exists only when every model both wins and loses
// and the "beats" graph is strongly connected.
inline void check_identifiable(const PairwiseWins& w, std::span<const std::string> names) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    double won = 0.0, lost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      won += w.wins(i, j);
      lost += w.wins(j, i);
    }
    if (won == 0.0 || lost == 0.0) {
      throw Error(Errc::kDegenerate,
                  names.empty() ? std::to_string(w.models[i]) : names[w.models[i]]);
    }
  }
  auto reach = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double edge = forward ? w.wins(i, j) : w.wins(j, i);
        if (!seen[j] && edge > 0.0) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    return seen;
  };
  const auto fwd = reach(true);
  const auto bwd = reach(false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fwd[i] || !bwd[i]) {
      throw Error(Errc::kDegenerate,
                  names.empty() ? std::to_string(w.models[i]) : names[w.models[i]]);
    }
  }
}

// Minorize-maximize step of the unpenalized likelihood.
inline std::vector<double> mm_step(const PairwiseWins& w, std::span<const double> xi) {
  const std::size_t n = w.size();
  std::vector<double> next(xi.begin(), xi.end());
  for (std::size_t i = 0; i < n; ++i) {
    double won = 0.0, denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      won += w.wins(i, j);
      const double games = w.wins(i, j) + w.wins(j, i);
      if (games > 0.0) denom += games / (1.0 + std::exp(xi[j] - xi[i]));
    }
    if (won > 0.0 && denom > 0.0) next[i] = xi[i] + std::log(won / denom);
  }
  center(next);
  return next;
}

}  // namespace detail

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Damped Newton on the centered log-strengths. The singular all-ones direction
// of the unpenalized Hessian is filled by a rank-one term, which leaves the
// step unchanged whenever it is already mean-zero. Falls back to an MM step
// if the system is not positive definite.
inline BtModelFit fit_bt_counts(const PairwiseWins& w, const BtConfig& cfg,
                                std::span<const std::string> names = {}) {
  if (cfg.l2_penalty < 0.0) throw Error(Errc::kInvalidArgument, "l2_penalty < 0");
  if (cfg.tolerance <= 0.0) throw Error(Errc::kInvalidArgument, "tolerance <= 0");
  const std::size_t n = w.size();
  if (n < 2) throw Error(Errc::kTooFewModels, std::to_string(n) + " observed models");
  if (cfg.l2_penalty == 0.0) detail::check_identifiable(w, names);

  constexpr double kGradTol = 1e-9;
  std::vector<double> xi(n, 0.0);
  auto value = detail::bt_value(w, xi, cfg.l2_penalty);
  std::vector<double> grad;
  Matrix neg_hess;
  std::vector<double> step;
  bool converged = false;
  int iter = 0;
  const double inv_n = 1.0 / static_cast<double>(n);

  while (iter < cfg.max_iterations) {
    ++iter;
    detail::bt_derivatives(w, xi, cfg.l2_penalty, grad, neg_hess);
    if (max_abs(grad) == 0.0) {
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) neg_hess(i, j) += inv_n;
    }
    std::vector<double> trial;
    if (detail::cholesky_solve(neg_hess, grad, step)) {
      detail::center(step);
      trial.resize(n);
      double t = 1.0;
      auto next = value;
      for (; t > 1e-12; t *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = xi[i] + t * step[i];
        next = detail::bt_value(w, trial, cfg.l2_penalty);
        if (next.objective >= value.objective) break;
      }
      if (t <= 1e-12) {
        trial = xi;
        next = value;
      }
      const double improvement = next.objective - value.objective;
      xi = std::move(trial);
      value = next;
      if (improvement < cfg.tolerance) {
        detail::bt_derivatives(w, xi, cfg.l2_penalty, grad, neg_hess);
        if (max_abs(grad) <= kGradTol || improvement <= 0.0) {
          converged = true;
          break;
        }
      }
    } else {
      trial = detail::mm_step(w, xi);
      auto next = detail::bt_value(w, trial, cfg.l2_penalty);
      const double improvement = next.objective - value.objective;
      if (improvement > 0.0) {
        xi = std::move(trial);
        value = next;
      }
      if (improvement < cfg.tolerance) {
        converged = true;
        break;
      }
    }
  }

  BtModelFit fit;
  fit.log_strength.assign(w.model_count, std::numeric_limits<double>::quiet_NaN());
  fit.observed.assign(w.model_count, false);
  for (std::size_t i = 0; i < n; ++i) {
    fit.log_strength[w.models[i]] = xi[i];
    fit.observed[w.models[i]] = true;
  }
  fit.log_likelihood = value.log_likelihood;
  fit.objective = value.objective;
  fit.converged = converged;
  fit.iterations = iter;
  if (!converged) throw BtNotConverged(std::move(fit));
  return fit;
}

inline BtModelFit compute_bt_fit(const BattleLog& log, const Subject& subject,
                                 const BtConfig& cfg = {}) {
  const PairwiseWins w = tally_pairwise(log, subject, cfg.tie_policy);
  if (w.size() == 0) {
    throw Error(Errc::kTooFewModels, "subject " + subject.label() + " has no battles");
  }
  return fit_bt_counts(w, cfg, log.models());
}

// Gradient of the penalized objective at a fit, over its observed models.
inline std::vector<double> bt_gradient(const PairwiseWins& w, const BtModelFit& fit,
                                       double l2_penalty) {
  std::vector<double> xi(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) xi[i] = fit.log_strength[w.models[i]];
  std::vector<double> grad;
  Matrix unused;
  detail::bt_derivatives(w, xi, l2_penalty, grad, unused);
  return grad;
}

// anchor + scale * log10(beta) for observed models; NaN elsewhere.
inline RatingVector bt_display_scale(const BtModelFit& fit, const BtConfig& cfg = {}) {
  RatingVector out;
  out.system = RatingSystem::kBradleyTerry;
  out.observed = fit.observed;
  out.scores.assign(fit.log_strength.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < fit.log_strength.size(); ++m) {
    if (fit.observed[m]) {
      out.scores[m] = cfg.anchor + cfg.scale * fit.log_strength[m] / std::numbers::ln10;
    }
  }
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_BRADLEY_TERRY_HPP_
