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

#ifndef PREFRANK_MLP_HPP_
#define PREFRANK_MLP_HPP_

// Dense feed-forward regressor trained with mini-batch Adam and early
// stopping, plus a finite-difference gradient check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "prefrank/error.hpp"
#include "prefrank/matrix.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

enum class Activation { kSelu, kGelu, kIdentity };
enum class LossKind { kHuber, kMse };

struct MlpConfig {
  std::vector<std::size_t> hidden;
  Activation activation = Activation::kSelu;
  LossKind loss = LossKind::kHuber;
  double huber_delta = 0.1;
  double dropout = 0.0;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  std::size_t batch_size = 8;
  int max_epochs = 500;
  int patience = 15;
  std::uint64_t seed = 7;

  void validate() const {
    for (std::size_t w : hidden) {
      if (w == 0) throw Error(Errc::kInvalidArgument, "hidden width must be positive");
    }
    if (dropout < 0.0 || dropout >= 1.0) throw Error(Errc::kInvalidArgument, "dropout in [0, 1)");
    if (learning_rate <= 0.0) throw Error(Errc::kInvalidArgument, "learning rate must be > 0");
    if (batch_size == 0) throw Error(Errc::kInvalidArgument, "batch size must be > 0");
  }
};

namespace detail {

inline constexpr double kSeluScale = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::kSelu:
      return z > 0.0 ? kSeluScale * z : kSeluScale * kSeluAlpha * std::expm1(z);
    case Activation::kGelu:
      return 0.5 * z * std::erfc(-z / std::numbers::sqrt2);
    case Activation::kIdentity:
      return z;
  }
  return z;
}

inline double activate_grad(Activation a, double z) {
  switch (a) {
    case Activation::kSelu:
      return z > 0.0 ? kSeluScale : kSeluScale * kSeluAlpha * std::exp(z);
    case Activation::kGelu: {
      const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
      const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      return cdf + z * pdf;
    }
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

}  // namespace detail

// Huber loss of one residual: r^2 / 2 inside [-delta, delta], linear beyond.
inline double huber(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

inline double huber_grad(double r, double delta) {
  return std::abs(r) <= delta ? r : (r > 0.0 ? delta : -delta);
}

inline double element_loss(LossKind kind, double delta, double r) {
  return kind == LossKind::kHuber ? huber(r, delta) : r * r;
}

inline double element_loss_grad(LossKind kind, double delta, double r) {
  return kind == LossKind::kHuber ? huber_grad(r, delta) : 2.0 * r;
}

class Mlp {
 public:
  Mlp() = default;

  // LeCun-normal weights (std = 1 / sqrt(fan_in)), zero biases.
  Mlp(std::size_t inputs, std::size_t outputs, const MlpConfig& cfg, std::uint64_t seed)
      : activation_(cfg.activation), dropout_(cfg.dropout) {
    widths_.push_back(inputs);
    for (std::size_t w : cfg.hidden) widths_.push_back(w);
    widths_.push_back(outputs);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      weight_offset_.push_back(total);
      total += widths_[l] * widths_[l + 1];
      bias_offset_.push_back(total);
      total += widths_[l + 1];
    }
    params_.assign(total, 0.0);
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      const double sd = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
      double* w = &params_[weight_offset_[l]];
      for (std::size_t i = 0; i < widths_[l] * widths_[l + 1]; ++i) w[i] = sd * rng.normal();
    }
  }

  std::size_t inputs() const { return widths_.front(); }
  std::size_t outputs() const { return widths_.back(); }
  std::size_t layers() const { return widths_.size() - 1; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  Activation activation() const { return activation_; }
  double dropout() const { return dropout_; }
  void set_dropout(double p) { dropout_ = p; }
  // Hidden pre-activations of the last forward() call, one matrix per layer.
  const std::vector<Matrix>& preactivations() const { return pre_; }

  // Forward pass over a batch of rows. With a dropout generator the pass is
  // in training mode. Caches what backward() needs.
  Matrix forward(const Matrix& x, std::span<const std::size_t> rows, Rng* dropout_rng) {
    const std::size_t batch = rows.size();
    pre_.resize(layers());
    post_.resize(layers() + 1);
    masks_.resize(layers());
    post_[0] = Matrix(batch, inputs());
    for (std::size_t s = 0; s < batch; ++s) {
      std::copy(x.row(rows[s]).begin(), x.row(rows[s]).end(), post_[0].row(s).begin());
    }
    for (std::size_t l = 0; l < layers(); ++l) {
      const std::size_t in = widths_[l], out = widths_[l + 1];
      const double* w = &params_[weight_offset_[l]];
      const double* b = &params_[bias_offset_[l]];
      Matrix& z = pre_[l];
      z = Matrix(batch, out);
      for (std::size_t s = 0; s < batch; ++s) {
        const double* h = post_[l].row(s).data();
        double* zs = z.row(s).data();
        for (std::size_t o = 0; o < out; ++o) {
          const double* wo = w + o * in;
          double acc = b[o];
          for (std::size_t i = 0; i < in; ++i) acc += wo[i] * h[i];
          zs[o] = acc;
        }
      }
      const bool hidden = l + 1 < layers();
      Matrix& h = post_[l + 1];
      h = Matrix(batch, out);
      const bool drop = hidden && dropout_rng != nullptr && dropout_ > 0.0;
      masks_[l] = drop ? Matrix(batch, out) : Matrix();
      const double keep_scale = 1.0 / (1.0 - dropout_);
      for (std::size_t s = 0; s < batch; ++s) {
        for (std::size_t o = 0; o < out; ++o) {
          double v = hidden ? detail::activate(activation_, z(s, o)) : z(s, o);
          if (drop) {
            const double m = dropout_rng->uniform() < dropout_ ? 0.0 : keep_scale;
            masks_[l](s, o) = m;
            v *= m;
          }
          h(s, o) = v;
        }
      }
    }
    return post_.back();
  }

  // Accumulates parameter gradients for d(loss)/d(output) of the last
  // forward() call into grad (same layout as params()).
  void backward(const Matrix& output_grad, std::vector<double>& grad) const {
    grad.assign(params_.size(), 0.0);
    const std::size_t batch = output_grad.rows();
    Matrix delta = output_grad;
    for (std::size_t l = layers(); l-- > 0;) {
      const std::size_t in = widths_[l], out = widths_[l + 1];
      const double* w = &params_[weight_offset_[l]];
      double* gw = &grad[weight_offset_[l]];
      double* gb = &grad[bias_offset_[l]];
      Matrix prev(batch, in);
      for (std::size_t s = 0; s < batch; ++s) {
        const double* h = post_[l].row(s).data();
        const double* d = delta.row(s).data();
        double* p = prev.row(s).data();
        for (std::size_t o = 0; o < out; ++o) {
          const double dv = d[o];
          if (dv == 0.0) continue;
          gb[o] += dv;
          double* gwo = gw + o * in;
          const double* wo = w + o * in;
          for (std::size_t i = 0; i < in; ++i) {
            gwo[i] += dv * h[i];
            p[i] += dv * wo[i];
          }
        }
      }
      if (l == 0) break;
      const Matrix& z = pre_[l - 1];
      const Matrix& mask = masks_[l - 1];
      for (std::size_t s = 0; s < batch; ++s) {
        for (std::size_t i = 0; i < in; ++i) {
          double g = prev(s, i) * detail::activate_grad(activation_, z(s, i));
          if (!mask.empty()) g *= mask(s, i);
          prev(s, i) = g;
        }
      }
      delta = std::move(prev);
    }
  }

  // Evaluation-mode prediction for every row.
  Matrix predict(const Matrix& x) const {
    Matrix h = x;
    for (std::size_t l = 0; l < layers(); ++l) {
      const std::size_t in = widths_[l], out = widths_[l + 1];
      const double* w = &params_[weight_offset_[l]];
      const double* b = &params_[bias_offset_[l]];
      const bool hidden = l + 1 < layers();
      Matrix next(h.rows(), out);
      for (std::size_t s = 0; s < h.rows(); ++s) {
        const double* hs = h.row(s).data();
        for (std::size_t o = 0; o < out; ++o) {
          const double* wo = w + o * in;
          double acc = b[o];
          for (std::size_t i = 0; i < in; ++i) acc += wo[i] * hs[i];
          next(s, o) = hidden ? detail::activate(activation_, acc) : acc;
        }
      }
      h = std::move(next);
    }
    return h;
  }

  std::vector<double> predict_one(std::span<const double> x) const {
    Matrix m(1, x.size());
    std::copy(x.begin(), x.end(), m.row(0).begin());
    const Matrix out = predict(m);
    return {out.row(0).begin(), out.row(0).end()};
  }

 private:
  Activation activation_ = Activation::kSelu;
  double dropout_ = 0.0;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
  std::vector<double> params_;
  std::vector<Matrix> pre_, post_, masks_;
};

// Mean element loss of predictions against targets, and its gradient.
inline double batch_loss(const Matrix& pred, const Matrix& target, std::span<const std::size_t> rows,
                         LossKind kind, double delta, Matrix* grad) {
  const double count = static_cast<double>(pred.rows() * pred.cols());
  double total = 0.0;
  if (grad) *grad = Matrix(pred.rows(), pred.cols());
  for (std::size_t s = 0; s < pred.rows(); ++s) {
    const auto t = target.row(rows[s]);
    for (std::size_t o = 0; o < pred.cols(); ++o) {
      const double r = pred(s, o) - t[o];
      total += element_loss(kind, delta, r);
      if (grad) (*grad)(s, o) = element_loss_grad(kind, delta, r) / count;
    }
  }
  return total / count;
}

inline double dataset_loss(const Mlp& net, const Matrix& x, const Matrix& y, LossKind kind,
                           double delta) {
  const Matrix pred = net.predict(x);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return batch_loss(pred, y, rows, kind, delta, nullptr);
}

class Adam {
 public:
  Adam(std::size_t n, double lr, double weight_decay)
      : lr_(lr), wd_(weight_decay), m_(n, 0.0), v_(n, 0.0) {}

  // Weight decay is added to the gradient (L2), not decoupled.
  void step(std::vector<double>& params, const std::vector<double>& grad) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(b1, t_);
    const double c2 = 1.0 - std::pow(b2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i] + wd_ * params[i];
      m_[i] = b1 * m_[i] + (1.0 - b1) * g;
      v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
    }
  }

 private:
  double lr_, wd_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

struct TrainingCurve {
  std::vector<double> train_loss;    // mean mini-batch loss per epoch
  std::vector<double> monitor_loss;  // evaluation-mode loss on the monitor set
  int best_epoch = -1;               // 0-based
  int epochs_run = 0;
};

struct TrainedMlp {
  Mlp net;
  TrainingCurve curve;
};

// Mini-batch Adam with rows reshuffled every epoch. When a monitor set is
// given, training stops `patience` epochs after the best monitor loss and
// the best weights are restored.
inline TrainedMlp train_mlp(const Matrix& x, const Matrix& y, const Matrix& x_monitor,
                            const Matrix& y_monitor, const MlpConfig& cfg) {
  cfg.validate();
  if (x.rows() == 0 || x.rows() != y.rows()) {
    throw Error(Errc::kInvalidShape, "training rows do not match targets");
  }
  TrainedMlp out{Mlp(x.cols(), y.cols(), cfg, mix_seed(cfg.seed, 0)), {}};
  Mlp& net = out.net;
  Rng order_rng(mix_seed(cfg.seed, 1));
  Rng dropout_rng(mix_seed(cfg.seed, 2));
  Adam adam(net.params().size(), cfg.learning_rate, cfg.weight_decay);
  const bool monitored = x_monitor.rows() > 0;
  std::vector<double> best_params = net.params();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;
  Matrix loss_grad;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> rows(order.data() + start, end - start);
      const Matrix pred = net.forward(x, rows, cfg.dropout > 0.0 ? &dropout_rng : nullptr);
      epoch_loss += batch_loss(pred, y, rows, cfg.loss, cfg.huber_delta, &loss_grad);
      ++batches;
      net.backward(loss_grad, grad);
      adam.step(net.params(), grad);
    }
    epoch_loss /= static_cast<double>(batches);
    if (!std::isfinite(epoch_loss)) {
      throw Error(Errc::kNonFiniteLoss, "epoch " + std::to_string(epoch));
    }
    out.curve.train_loss.push_back(epoch_loss);
    out.curve.epochs_run = epoch + 1;
    const double score = monitored ? dataset_loss(net, x_monitor, y_monitor, cfg.loss,
                                                  cfg.huber_delta)
                                   : epoch_loss;
    if (!std::isfinite(score)) throw Error(Errc::kNonFiniteLoss, "epoch " + std::to_string(epoch));
    out.curve.monitor_loss.push_back(score);
    if (score < best) {
      best = score;
      best_params = net.params();
      out.curve.best_epoch = epoch;
    } else if (monitored && epoch - out.curve.best_epoch >= cfg.patience) {
      break;
    }
  }
  if (monitored) net.params() = best_params;
  return out;
}

// Largest relative difference between backprop gradients and central
// differences of the batch loss. Dropout is disabled for the check.
// Coordinates whose +-h perturbation moves a SELU pre-activation across 0 or
// a Huber residual across delta straddle a kink, where the central
// difference is meaningless; they are skipped and counted in *skipped.
inline double gradient_check(Mlp net, const Matrix& x, const Matrix& y, LossKind kind,
                             double delta, double h = 1e-4, std::size_t* skipped = nullptr) {
  net.set_dropout(0.0);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  // Which side of every kink each unit sits on.
  auto pieces = [&](const Matrix& pred) {
    std::vector<bool> side;
    if (net.activation() == Activation::kSelu) {
      const auto& pre = net.preactivations();
      for (std::size_t l = 0; l + 1 < pre.size(); ++l) {
        for (double z : pre[l].data()) side.push_back(z > 0.0);
      }
    }
    if (kind == LossKind::kHuber) {
      for (std::size_t i = 0; i < pred.data().size(); ++i) {
        side.push_back(std::abs(pred.data()[i] - y.data()[i]) <= delta);
      }
    }
    return side;
  };
  Matrix loss_grad;
  const Matrix pred = net.forward(x, rows, nullptr);
  const std::vector<bool> base = pieces(pred);
  batch_loss(pred, y, rows, kind, delta, &loss_grad);
  std::vector<double> analytic;
  net.backward(loss_grad, analytic);
  bool crossed = false;
  auto loss_at = [&](Mlp& n) {
    const Matrix p = n.forward(x, rows, nullptr);
    crossed = crossed || pieces(p) != base;
    return batch_loss(p, y, rows, kind, delta, nullptr);
  };
  double worst = 0.0;
  std::size_t skip = 0;
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    const double saved = net.params()[i];
    crossed = false;
    net.params()[i] = saved + h;
    const double up = loss_at(net);
    net.params()[i] = saved - h;
    const double down = loss_at(net);
    net.params()[i] = saved;
    if (crossed) {
      ++skip;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  if (skipped) *skipped = skip;
  return worst;
}

// Sum with a fixed evaluation order that does not depend on input order:
// values are sorted, then added pairwise.
inline double canonical_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  while (values.size() > 1) {
    std::vector<double> next;
    next.reserve((values.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < values.size(); i += 2) next.push_back(values[i] + values[i + 1]);
    if (values.size() % 2 == 1) next.push_back(values.back());
    values = std::move(next);
  }
  return values.empty() ? 0.0 : values.front();
}

// Arithmetic mean of member outputs, bit-identical under member reordering.
inline Matrix predict_ensemble(std::span<const Mlp> members, const Matrix& x) {
  if (members.empty()) throw Error(Errc::kEmptyEnsemble, "no ensemble members");
  std::vector<Matrix> outs;
  outs.reserve(members.size());
  for (const auto& m : members) {
    if (m.inputs() != members.front().inputs() || m.outputs() != members.front().outputs()) {
      throw Error(Errc::kInvalidShape, "ensemble members disagree on shape");
    }
    outs.push_back(m.predict(x));
  }
  Matrix mean(x.rows(), members.front().outputs());
  std::vector<double> column(members.size());
  for (std::size_t r = 0; r < mean.rows(); ++r) {
    for (std::size_t c = 0; c < mean.cols(); ++c) {
      for (std::size_t k = 0; k < outs.size(); ++k) column[k] = outs[k](r, c);
      mean(r, c) = canonical_sum(column) / static_cast<double>(members.size());
    }
  }
  return mean;
}

}  // namespace prefrank

#endif  // PREFRANK_MLP_HPP_
