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

#ifndef PREFRANK_REGRESSION_HPP_
#define PREFRANK_REGRESSION_HPP_

// Predicting a user's rating vector over the most-battled models from their
// topic and style profile.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "prefrank/error.hpp"
#include "prefrank/matrix.hpp"
#include "prefrank/mlp.hpp"
#include "prefrank/parallel.hpp"
#include "prefrank/profile.hpp"
#include "prefrank/ratings.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

inline constexpr std::size_t kTargetModels = 20;

struct RegressionDataset {
  RatingSystem system = RatingSystem::kElo;
  std::vector<std::string> users;
  std::vector<std::string> target_models;
  Matrix x;                            // users x features, raw
  Matrix y;                            // users x target models, imputed
  std::vector<std::uint8_t> imputed;   // users x target models
  std::vector<bool> fully_imputed;
  std::vector<bool> validation;
  std::vector<std::string> warnings;

  bool is_imputed(std::size_t row, std::size_t col) const {
    return imputed[row * y.cols() + col] != 0;
  }
  std::vector<std::size_t> rows(bool want_validation) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < validation.size(); ++i) {
      if (validation[i] == want_validation) out.push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> train_rows() const { return rows(false); }
  std::vector<std::size_t> validation_rows() const { return rows(true); }
};

// Validation share of the split: 18 of 115 users.
inline std::size_t validation_size(std::size_t users) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(users) * 18.0 / 115.0));
}

// Targets are the `target_dim` models with the most battles overall (ties to
// the smaller model id). Entries a user never rated are filled with the
// training users' mean for that model; users with nothing observed stay in
// the training split.
inline RegressionDataset build_dataset(std::span<const UserProfile> profiles,
                                       std::span<const RatingVector> ratings,
                                       std::span<const std::string> model_names,
                                       std::span<const std::size_t> model_battle_counts,
                                       RatingSystem system, std::uint64_t split_seed,
                                       std::size_t target_dim = kTargetModels) {
  if (profiles.size() != ratings.size()) {
    throw Error(Errc::kLengthMismatch, "profiles and ratings cover different users");
  }
  if (profiles.size() < 20) {
    throw Error(Errc::kTooFewUsers, std::to_string(profiles.size()) + " users");
  }
  RegressionDataset ds;
  ds.system = system;
  std::vector<std::size_t> models(model_names.size());
  std::iota(models.begin(), models.end(), 0);
  std::stable_sort(models.begin(), models.end(), [&](std::size_t a, std::size_t b) {
    return model_battle_counts[a] > model_battle_counts[b];
  });
  if (models.size() < target_dim) {
    ds.warnings.push_back("only " + std::to_string(models.size()) +
                          " models available; using all of them as targets");
    target_dim = models.size();
  }
  models.resize(target_dim);

  const std::size_t n = profiles.size();
  const std::size_t features = profiles.front().regression_input().size();
  ds.x = Matrix(n, features);
  ds.y = Matrix(n, target_dim);
  ds.imputed.assign(n * target_dim, 0);
  ds.fully_imputed.assign(n, false);
  for (std::size_t m : models) ds.target_models.push_back(model_names[m]);
  for (std::size_t i = 0; i < n; ++i) {
    ds.users.push_back(profiles[i].user_id);
    const auto xi = profiles[i].regression_input();
    if (xi.size() != features) throw Error(Errc::kInvalidShape, "profile dimension mismatch");
    std::copy(xi.begin(), xi.end(), ds.x.row(i).begin());
    std::size_t missing = 0;
    for (std::size_t c = 0; c < target_dim; ++c) {
      const std::size_t m = models[c];
      if (ratings[i].observed[m] && ratings[i].defined(m)) {
        ds.y(i, c) = ratings[i].scores[m];
      } else {
        ds.imputed[i * target_dim + c] = 1;
        ++missing;
      }
    }
    ds.fully_imputed[i] = missing == target_dim;
  }

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ds.fully_imputed[i]) eligible.push_back(i);
  }
  Rng rng(split_seed);
  rng.shuffle(eligible);
  const std::size_t n_val = std::min(validation_size(n), eligible.size());
  ds.validation.assign(n, false);
  for (std::size_t k = 0; k < n_val; ++k) ds.validation[eligible[k]] = true;

  // Imputation uses training rows only.
  double pooled = 0.0;
  std::size_t pooled_n = 0;
  std::vector<double> fill(target_dim, 0.0);
  std::vector<std::size_t> fill_n(target_dim, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (ds.validation[i]) continue;
    for (std::size_t c = 0; c < target_dim; ++c) {
      if (ds.is_imputed(i, c)) continue;
      fill[c] += ds.y(i, c);
      ++fill_n[c];
      pooled += ds.y(i, c);
      ++pooled_n;
    }
  }
  if (pooled_n == 0) throw Error(Errc::kTooFewUsers, "no observed training targets");
  for (std::size_t c = 0; c < target_dim; ++c) {
    if (fill_n[c] > 0) {
      fill[c] /= static_cast<double>(fill_n[c]);
    } else {
      fill[c] = pooled / static_cast<double>(pooled_n);
      ds.warnings.push_back("no training user rated " + ds.target_models[c]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < target_dim; ++c) {
      if (ds.is_imputed(i, c)) ds.y(i, c) = fill[c];
    }
  }
  return ds;
}

// Per-column affine scaling fitted on a subset of rows.
struct ColumnScaler {
  static constexpr double kSdFloor = 1e-8;

  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<std::size_t> degenerate;  // columns whose sd was floored

  static ColumnScaler fit(const Matrix& m, std::span<const std::size_t> rows) {
    if (rows.size() < 2) throw Error(Errc::kTooFewItems, "scaler needs two rows");
    ColumnScaler s;
    s.mean.assign(m.cols(), 0.0);
    s.sd.assign(m.cols(), 0.0);
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < m.cols(); ++c) s.mean[c] += m(r, c);
    }
    for (double& v : s.mean) v /= static_cast<double>(rows.size());
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        const double d = m(r, c) - s.mean[c];
        s.sd[c] += d * d;
      }
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      s.sd[c] = std::sqrt(s.sd[c] / static_cast<double>(rows.size() - 1));
      if (s.sd[c] < kSdFloor) {
        s.sd[c] = kSdFloor;
        s.degenerate.push_back(c);
      }
    }
    return s;
  }

  Matrix apply(const Matrix& m, std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), m.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (std::size_t c = 0; c < m.cols(); ++c) out(k, c) = (m(rows[k], c) - mean[c]) / sd[c];
    }
    return out;
  }

  Matrix invert(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) * sd[c] + mean[c];
    }
    return out;
  }
};

// Feature and target scaling fitted on the training split only.
struct Standardizer {
  ColumnScaler x;
  ColumnScaler y;

  static Standardizer fit(const RegressionDataset& ds) {
    const auto train = ds.train_rows();
    return {ColumnScaler::fit(ds.x, train), ColumnScaler::fit(ds.y, train)};
  }
};

struct StandardizedSplit {
  Standardizer scaler;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
  Matrix x_train, y_train, x_val, y_val;
};

inline StandardizedSplit standardize(const RegressionDataset& ds) {
  StandardizedSplit s;
  s.scaler = Standardizer::fit(ds);
  s.train_rows = ds.train_rows();
  s.validation_rows = ds.validation_rows();
  s.x_train = s.scaler.x.apply(ds.x, s.train_rows);
  s.y_train = s.scaler.y.apply(ds.y, s.train_rows);
  s.x_val = s.scaler.x.apply(ds.x, s.validation_rows);
  s.y_val = s.scaler.y.apply(ds.y, s.validation_rows);
  return s;
}

// Mean absolute error over every entry, optionally skipping masked ones.
inline double scaled_mae(const Matrix& predicted, const Matrix& truth,
                         const std::vector<bool>* skip = nullptr) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < truth.rows(); ++r) {
    for (std::size_t c = 0; c < truth.cols(); ++c) {
      if (skip && (*skip)[r * truth.cols() + c]) continue;
      total += std::abs(truth(r, c) - predicted(r, c));
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

struct EvalReport {
  double mae = 0.0;
  std::vector<double> per_model_mae;
  double baseline_mae = 0.0;
  double improvement = 0.0;             // (baseline - model) / baseline
  double mae_observed = 0.0;            // imputed entries skipped
  double baseline_mae_observed = 0.0;
  std::size_t validation_users = 0;
  std::size_t outputs = 0;
};

// Training-target mean for every validation row; the zero vector once
// targets are standardized with training statistics.
inline Matrix mean_predictor_baseline(const StandardizedSplit& split) {
  return Matrix(split.validation_rows.size(), split.y_val.cols(), 0.0);
}

inline EvalReport evaluate(const Matrix& predicted_std, const StandardizedSplit& split,
                           const RegressionDataset& ds) {
  if (split.validation_rows.empty()) throw Error(Errc::kEmptyValidation, "no validation users");
  EvalReport r;
  r.validation_users = split.validation_rows.size();
  r.outputs = split.y_val.cols();
  std::vector<bool> skip(r.validation_users * r.outputs);
  for (std::size_t k = 0; k < r.validation_users; ++k) {
    for (std::size_t c = 0; c < r.outputs; ++c) {
      skip[k * r.outputs + c] = ds.is_imputed(split.validation_rows[k], c);
    }
  }
  const Matrix baseline = mean_predictor_baseline(split);
  r.mae = scaled_mae(predicted_std, split.y_val);
  r.baseline_mae = scaled_mae(baseline, split.y_val);
  r.mae_observed = scaled_mae(predicted_std, split.y_val, &skip);
  r.baseline_mae_observed = scaled_mae(baseline, split.y_val, &skip);
  r.improvement = r.baseline_mae > 0.0 ? (r.baseline_mae - r.mae) / r.baseline_mae : 0.0;
  r.per_model_mae.assign(r.outputs, 0.0);
  for (std::size_t k = 0; k < r.validation_users; ++k) {
    for (std::size_t c = 0; c < r.outputs; ++c) {
      r.per_model_mae[c] += std::abs(split.y_val(k, c) - predicted_std(k, c));
    }
  }
  for (double& v : r.per_model_mae) v /= static_cast<double>(r.validation_users);
  return r;
}

struct RankPredictorConfig {
  MlpConfig net;
  std::size_t ensemble_size = 1;
};

// Ensemble of 50 SELU networks with Huber(0.1) loss for ELO targets.
inline RankPredictorConfig elo_predictor_config() {
  RankPredictorConfig c;
  c.net.hidden = {512, 512, 256, 128, 64, 32};
  c.net.activation = Activation::kSelu;
  c.net.loss = LossKind::kHuber;
  c.net.huber_delta = 0.1;
  c.net.dropout = 0.0;
  c.net.learning_rate = 0.03;
  c.net.weight_decay = 0.0;
  c.net.batch_size = 8;
  c.net.max_epochs = 500;
  c.net.patience = 15;
  c.ensemble_size = 50;
  return c;
}

// Single GELU network with dropout for Bradley-Terry targets.
inline RankPredictorConfig bt_predictor_config() {
  RankPredictorConfig c;
  c.net.hidden = {1024, 256, 512, 128, 512};
  c.net.activation = Activation::kGelu;
  c.net.loss = LossKind::kMse;
  c.net.dropout = 0.28;
  c.net.learning_rate = 0.001;
  c.net.weight_decay = 6.007e-6;
  c.net.batch_size = 8;
  c.net.max_epochs = 500;
  c.net.patience = 15;
  c.ensemble_size = 1;
  return c;
}

struct PredictionRun {
  EvalReport report;
  StandardizedSplit split;
  Matrix predicted_std;  // validation rows, standardized
  Matrix predicted;      // validation rows, rating units
  std::vector<TrainingCurve> curves;
};

// Trains the members (in parallel, member s seeded by mix_seed(seed, s)),
// averages them and scores the validation split. Early stopping monitors the
// validation split.
inline PredictionRun fit_and_evaluate(const RegressionDataset& ds, const RankPredictorConfig& cfg,
                                      std::uint64_t seed, unsigned workers = default_workers()) {
  if (cfg.ensemble_size == 0) throw Error(Errc::kEmptyEnsemble, "ensemble size 0");
  PredictionRun run;
  run.split = standardize(ds);
  if (run.split.validation_rows.empty()) throw Error(Errc::kEmptyValidation, "no validation users");
  std::vector<Mlp> members(cfg.ensemble_size);
  run.curves.resize(cfg.ensemble_size);
  parallel_for(cfg.ensemble_size, [&](std::size_t s) {
    MlpConfig net = cfg.net;
    net.seed = mix_seed(seed, s);
    TrainedMlp t = train_mlp(run.split.x_train, run.split.y_train, run.split.x_val,
                             run.split.y_val, net);
    members[s] = std::move(t.net);
    run.curves[s] = std::move(t.curve);
  }, workers);
  run.predicted_std = predict_ensemble(members, run.split.x_val);
  run.predicted = run.split.scaler.y.invert(run.predicted_std);
  run.report = evaluate(run.predicted_std, run.split, ds);
  return run;
}

}  // namespace prefrank

#endif  // PREFRANK_REGRESSION_HPP_
