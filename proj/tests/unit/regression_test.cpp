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

#include "prefrank/regression.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "planted.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {
namespace {

using testing::build;
using testing::planted;
using testing::small_config;

TEST(BuildDataset, SplitSizesAndCoverage) {
  EXPECT_EQ(validation_size(115), 18u);
  const auto p = planted(115, 25, 0.1, 1);
  const auto ds = build(p, 3);
  EXPECT_EQ(ds.train_rows().size(), 97u);
  EXPECT_EQ(ds.validation_rows().size(), 18u);
  std::set<std::size_t> all;
  for (auto r : ds.train_rows()) all.insert(r);
  for (auto r : ds.validation_rows()) EXPECT_TRUE(all.insert(r).second);
  EXPECT_EQ(all.size(), 115u);
  EXPECT_EQ(build(p, 3).validation, ds.validation);
  EXPECT_NE(build(p, 4).validation, ds.validation);
  EXPECT_EQ(ds.x.cols(), 4 + kStyleDims);
  EXPECT_EQ(ds.y.cols(), 20u);
}

TEST(BuildDataset, TopModelsByBattleCount) {
  auto p = planted(30, 25, 0.1, 2);
  // Make m24 the busiest and tie m3 with m2.
  p.counts[24] = 5000;
  p.counts[3] = p.counts[2];
  const auto ds = build(p, 1);
  EXPECT_EQ(ds.target_models.front(), "m24");
  EXPECT_EQ(ds.target_models[3], "m2");
  EXPECT_EQ(ds.target_models[4], "m3");
  EXPECT_EQ(ds.target_models.size(), 20u);
  EXPECT_TRUE(ds.warnings.empty());

  const auto few = planted(30, 12, 0.1, 2);
  const auto small = build(few, 1);
  EXPECT_EQ(small.y.cols(), 12u);
  EXPECT_FALSE(small.warnings.empty());
}

TEST(BuildDataset, ImputesWithTrainingMeans) {
  auto p = planted(40, 20, 0.1, 3);
  for (std::size_t u = 0; u < 40; ++u) {
    if (u % 3 == 0) p.ratings[u].observed[5] = false;  // model m5 missing for some users
  }
  p.ratings[7].scores[9] = std::nan("");
  for (std::size_t m = 0; m < 20; ++m) p.ratings[11].observed[m] = false;
  const auto ds = build(p, 9);
  EXPECT_TRUE(ds.fully_imputed[11]);
  EXPECT_FALSE(ds.validation[11]);
  EXPECT_TRUE(ds.is_imputed(7, 9));
  EXPECT_FALSE(ds.is_imputed(1, 5));
  for (std::size_t c = 0; c < 20; ++c) EXPECT_FALSE(ds.is_imputed(2, c));
  // Hand mean of observed training entries for m5.
  double sum = 0;
  int n = 0;
  for (std::size_t u = 0; u < 40; ++u) {
    if (ds.validation[u] || u % 3 == 0 || u == 11) continue;
    sum += p.ratings[u].scores[5];
    ++n;
  }
  for (std::size_t u = 0; u < 40; u += 3) EXPECT_NEAR(ds.y(u, 5), sum / n, 1e-12);
  for (double v : ds.y.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(BuildDataset, Errors) {
  const auto p = planted(19, 20, 0.1, 4);
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInvalidArgument;
  };
  EXPECT_EQ(code([&] { build(p, 1); }), Errc::kTooFewUsers);
  auto q = planted(25, 20, 0.1, 4);
  q.ratings.pop_back();
  EXPECT_EQ(code([&] { build(q, 1); }), Errc::kLengthMismatch);
}

TEST(Standardizer, TrainingStatisticsOnly) {
  auto p = planted(60, 20, 0.1, 5);
  for (auto& prof : p.profiles) prof.style.values[3] = 0.25;  // constant feature
  const auto ds = build(p, 2);
  const auto s = standardize(ds);
  for (std::size_t c = 0; c < s.x_train.cols(); ++c) {
    double mean = 0, ss = 0;
    for (std::size_t r = 0; r < s.x_train.rows(); ++r) mean += s.x_train(r, c);
    mean /= static_cast<double>(s.x_train.rows());
    for (std::size_t r = 0; r < s.x_train.rows(); ++r) ss += std::pow(s.x_train(r, c) - mean, 2);
    const double sd = std::sqrt(ss / static_cast<double>(s.x_train.rows() - 1));
    EXPECT_NEAR(mean, 0.0, 1e-9);
    if (c == 4 + 3) {
      EXPECT_EQ(sd, 0.0);
    } else {
      EXPECT_NEAR(sd, 1.0, 1e-6);
    }
  }
  ASSERT_EQ(s.scaler.x.degenerate, (std::vector<std::size_t>{7}));
  // Round trip.
  const Matrix back = s.scaler.y.invert(s.y_val);
  for (std::size_t k = 0; k < s.validation_rows.size(); ++k)
    for (std::size_t c = 0; c < 20; ++c) EXPECT_NEAR(back(k, c), ds.y(s.validation_rows[k], c), 1e-9);
}

TEST(Standardizer, ShiftedValidationKeepsItsOffset) {
  auto p = planted(50, 20, 0.1, 6);
  auto ds = build(p, 8);
  for (auto r : ds.validation_rows()) ds.x(r, 0) += 10.0;
  const auto s = standardize(ds);
  double mean = 0;
  for (std::size_t k = 0; k < s.x_val.rows(); ++k) mean += s.x_val(k, 0);
  mean /= static_cast<double>(s.x_val.rows());
  EXPECT_GT(mean, 5.0);
  EXPECT_THROW(ColumnScaler::fit(ds.x, std::vector<std::size_t>{0}), Error);
}

TEST(Evaluate, BaselineIdentityAndPerfectPredictor) {
  const auto p = planted(40, 20, 0.1, 7);
  const auto ds = build(p, 1);
  const auto s = standardize(ds);
  const Matrix zero = mean_predictor_baseline(s);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);
  double abs_sum = 0;
  for (double v : s.y_val.data()) abs_sum += std::abs(v);
  const auto perfect = evaluate(s.y_val, s, ds);
  EXPECT_EQ(perfect.mae, 0.0);
  EXPECT_NEAR(perfect.baseline_mae, abs_sum / static_cast<double>(s.y_val.data().size()), 1e-12);
  EXPECT_DOUBLE_EQ(perfect.improvement, 1.0);
  Matrix half = s.y_val;
  for (double& v : half.data()) v *= 0.5;
  const auto r = evaluate(half, s, ds);
  EXPECT_NEAR(r.mae, 0.5 * r.baseline_mae, 1e-12);
  EXPECT_NEAR(r.improvement, 0.5, 1e-12);
  double per_model = 0;
  for (double v : r.per_model_mae) per_model += v;
  EXPECT_NEAR(per_model / 20, r.mae, 1e-12);
}

TEST(Evaluate, IdenticalTargetsGiveZeroBaseline) {
  auto p = planted(30, 20, 0.1, 8);
  for (auto& r : p.ratings)
    for (std::size_t m = 0; m < 20; ++m) r.scores[m] = 1000.0 + static_cast<double>(m);
  const auto ds = build(p, 1);
  const auto s = standardize(ds);
  EXPECT_EQ(evaluate(mean_predictor_baseline(s), s, ds).baseline_mae, 0.0);
}

TEST(Evaluate, EmptyValidationRejected) {
  const auto p = planted(30, 20, 0.1, 9);
  auto ds = build(p, 1);
  std::fill(ds.validation.begin(), ds.validation.end(), false);
  const auto s = standardize(ds);
  EXPECT_THROW(evaluate(Matrix(0, 20), s, ds), Error);
}

TEST(FitAndEvaluate, PlantedSignalBeatsBaseline) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto p = planted(115, 25, 0.1, 100 + seed);
    const auto ds = build(p, seed);
    const auto run = fit_and_evaluate(ds, small_config(), seed, 1);
    wins += run.report.improvement >= 0.30 ? 1 : 0;
  }
  EXPECT_GE(wins, 19);
}

TEST(FitAndEvaluate, WorkerCountDoesNotChangeResult) {
  const auto p = planted(40, 20, 0.1, 10);
  const auto ds = build(p, 2);
  auto cfg = small_config();
  cfg.ensemble_size = 3;
  cfg.net.max_epochs = 20;
  const auto a = fit_and_evaluate(ds, cfg, 5, 1);
  const auto b = fit_and_evaluate(ds, cfg, 5, 3);
  EXPECT_EQ(a.predicted_std, b.predicted_std);
  EXPECT_EQ(a.report.mae, b.report.mae);
  EXPECT_EQ(a.curves.size(), 3u);
  EXPECT_EQ(a.predicted.rows(), ds.validation_rows().size());
}

TEST(PredictorConfigs, PublishedShapes) {
  const auto e = elo_predictor_config();
  EXPECT_EQ(e.net.hidden, (std::vector<std::size_t>{512, 512, 256, 128, 64, 32}));
  EXPECT_EQ(e.ensemble_size, 50u);
  EXPECT_EQ(e.net.activation, Activation::kSelu);
  EXPECT_DOUBLE_EQ(e.net.huber_delta, 0.1);
  const auto b = bt_predictor_config();
  EXPECT_EQ(b.ensemble_size, 1u);
  EXPECT_DOUBLE_EQ(b.net.dropout, 0.28);
  EXPECT_DOUBLE_EQ(b.net.weight_decay, 6.007e-6);
}

}  // namespace
}  // namespace prefrank
