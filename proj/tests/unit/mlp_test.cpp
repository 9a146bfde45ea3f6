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

#include "prefrank/mlp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "prefrank/rng.hpp"

namespace prefrank {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

TEST(Huber, Pointwise) {
  const double d = 0.1;
  EXPECT_DOUBLE_EQ(huber(0.0, d), 0.0);
  EXPECT_DOUBLE_EQ(huber(d / 2, d), (d / 2) * (d / 2) / 2);
  EXPECT_DOUBLE_EQ(huber(d, d), d * d / 2);
  EXPECT_DOUBLE_EQ(huber(2 * d, d), 1.5 * d * d);
  EXPECT_DOUBLE_EQ(huber(-2 * d, d), 1.5 * d * d);
  // Linear beyond delta with slope delta.
  EXPECT_NEAR(huber(5 * d, d) - huber(4 * d, d), d * d, 1e-15);
  EXPECT_DOUBLE_EQ(huber_grad(0.05, d), 0.05);
  EXPECT_DOUBLE_EQ(huber_grad(-3.0, d), -d);
}

TEST(GradientCheck, LinearMse) {
  Rng rng(1);
  const Matrix x = random_matrix(6, 4, rng), y = random_matrix(6, 3, rng);
  const Mlp net(4, 3, {.hidden = {}, .activation = Activation::kIdentity}, 5);
  EXPECT_LT(gradient_check(net, x, y, LossKind::kMse, 0.1), 1e-7);
}

TEST(GradientCheck, GeluHuber) {
  Rng rng(2);
  const Matrix x = random_matrix(4, 5, rng), y = random_matrix(4, 3, rng);
  const Mlp net(5, 3, {.hidden = {8, 6}, .activation = Activation::kGelu}, 6);
  EXPECT_LT(gradient_check(net, x, y, LossKind::kHuber, 0.1), 1e-4);
  EXPECT_LT(gradient_check(net, x, y, LossKind::kMse, 0.1), 1e-4);
}

TEST(GradientCheck, SeluHuberAndMse) {
  Rng rng(3);
  const Matrix x = random_matrix(5, 4, rng), y = random_matrix(5, 2, rng);
  const Mlp net(4, 2, {.hidden = {16, 8}, .activation = Activation::kSelu}, 7);
  EXPECT_LT(gradient_check(net, x, y, LossKind::kHuber, 0.1), 1e-4);
  EXPECT_LT(gradient_check(net, x, y, LossKind::kMse, 0.1), 1e-4);
}

// A residual sitting exactly on the Huber threshold straddles the kink for
// every coordinate; one well inside does not.
TEST(GradientCheck, SkipsCoordinatesThatStraddleAKink) {
  Mlp net(2, 1, {.hidden = {}, .activation = Activation::kIdentity}, 1);
  std::fill(net.params().begin(), net.params().end(), 0.0);
  const Matrix x = Matrix::from_rows({{1.0, -2.0}, {0.5, 0.25}});
  std::size_t skipped = 99;
  gradient_check(net, x, Matrix::from_rows({{-0.1}, {0.5}}), LossKind::kHuber, 0.1, 1e-4, &skipped);
  EXPECT_EQ(skipped, 3u);
  EXPECT_LT(gradient_check(net, x, Matrix::from_rows({{-0.3}, {0.5}}), LossKind::kHuber, 0.1, 1e-4,
                           &skipped),
            1e-7);
  EXPECT_EQ(skipped, 0u);
}

TEST(Mlp, LeCunInitScale) {
  const Mlp net(400, 300, {}, 9);
  double ss = 0;
  for (std::size_t i = 0; i < 400 * 300; ++i) ss += net.params()[i] * net.params()[i];
  EXPECT_NEAR(ss / (400 * 300), 1.0 / 400, 0.05 / 400);
  for (std::size_t i = 400 * 300; i < net.params().size(); ++i) EXPECT_EQ(net.params()[i], 0.0);
}

TEST(Mlp, DropoutOnlyInTrainingMode) {
  Rng rng(4);
  const Matrix x = random_matrix(5, 6, rng);
  Mlp net(6, 2, {.hidden = {32}, .dropout = 0.28}, 3);
  std::vector<std::size_t> rows{0, 1, 2, 3, 4};
  Rng drop(1);
  const Matrix a = net.forward(x, rows, &drop);
  const Matrix b = net.forward(x, rows, &drop);
  EXPECT_NE(a, b);
  const Matrix e1 = net.predict(x), e2 = net.predict(x);
  EXPECT_EQ(e1, e2);
  const Matrix plain = net.forward(x, rows, nullptr);
  for (std::size_t i = 0; i < plain.data().size(); ++i) {
    EXPECT_NEAR(plain.data()[i], e1.data()[i], 1e-15);
  }
}

TEST(TrainMlp, LinearTeacherIsLearned) {
  Rng rng(5);
  const Matrix a = random_matrix(3, 2, rng);
  auto teach = [&](const Matrix& x) {
    Matrix y(x.rows(), 2);
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t o = 0; o < 2; ++o) {
        y(i, o) = 0.5 * static_cast<double>(o);
        for (std::size_t j = 0; j < 3; ++j) y(i, o) += x(i, j) * a(j, o);
      }
    return y;
  };
  const Matrix x = random_matrix(200, 3, rng), xv = random_matrix(50, 3, rng);
  const Matrix y = teach(x), yv = teach(xv);
  const MlpConfig cfg{.hidden = {}, .activation = Activation::kIdentity, .loss = LossKind::kMse,
                      .learning_rate = 0.01, .max_epochs = 300, .patience = 30, .seed = 2};
  const auto trained = train_mlp(x, y, xv, yv, cfg);
  const Matrix pred = trained.net.predict(xv);
  double mae = 0;
  for (std::size_t i = 0; i < pred.data().size(); ++i) mae += std::abs(pred.data()[i] - yv.data()[i]);
  mae /= static_cast<double>(pred.data().size());
  EXPECT_LT(mae, 0.05);
}

TEST(TrainMlp, EarlyStoppingContract) {
  Rng rng(6);
  // Pure noise targets: the monitor loss bottoms out early.
  const Matrix x = random_matrix(40, 4, rng), y = random_matrix(40, 2, rng);
  const Matrix xv = random_matrix(20, 4, rng), yv = random_matrix(20, 2, rng);
  const MlpConfig cfg{.hidden = {32, 32}, .learning_rate = 0.01, .max_epochs = 400,
                      .patience = 15, .seed = 3};
  const auto t = train_mlp(x, y, xv, yv, cfg);
  const auto& c = t.curve;
  ASSERT_LT(c.epochs_run, 400);
  EXPECT_EQ(c.epochs_run - 1 - c.best_epoch, 15);
  const double best = *std::min_element(c.monitor_loss.begin(), c.monitor_loss.end());
  EXPECT_EQ(c.monitor_loss[static_cast<std::size_t>(c.best_epoch)], best);
  EXPECT_DOUBLE_EQ(dataset_loss(t.net, xv, yv, cfg.loss, cfg.huber_delta), best);
  EXPECT_EQ(c.train_loss.size(), static_cast<std::size_t>(c.epochs_run));
}

TEST(TrainMlp, DeterministicForSeed) {
  Rng rng(7);
  const Matrix x = random_matrix(30, 3, rng), y = random_matrix(30, 2, rng);
  const Matrix xv = random_matrix(10, 3, rng), yv = random_matrix(10, 2, rng);
  const MlpConfig cfg{.hidden = {8}, .dropout = 0.2, .max_epochs = 20, .seed = 11};
  const auto a = train_mlp(x, y, xv, yv, cfg);
  const auto b = train_mlp(x, y, xv, yv, cfg);
  EXPECT_EQ(a.net.params(), b.net.params());
  EXPECT_EQ(a.curve.train_loss, b.curve.train_loss);
  auto other = cfg;
  other.seed = 12;
  EXPECT_NE(train_mlp(x, y, xv, yv, other).net.params(), a.net.params());
}

TEST(TrainMlp, Errors) {
  Rng rng(8);
  const Matrix x = random_matrix(10, 2, rng);
  Matrix huge(10, 1, 1e300);
  EXPECT_THROW(train_mlp(x, huge, {}, {}, {.hidden = {}, .loss = LossKind::kMse, .max_epochs = 3}), Error);
  try {
    train_mlp(x, huge, {}, {}, {.hidden = {}, .loss = LossKind::kMse, .max_epochs = 3});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonFiniteLoss);
  }
  EXPECT_THROW(train_mlp(x, Matrix(9, 1), {}, {}, {}), Error);
  EXPECT_THROW((MlpConfig{.hidden = {}, .dropout = 1.0}.validate()), Error);
  EXPECT_THROW((MlpConfig{.hidden = {}, .learning_rate = 0.0}.validate()), Error);
  EXPECT_THROW((MlpConfig{.hidden = {4, 0}}.validate()), Error);
}

TEST(PredictEnsemble, MeanSemantics) {
  Rng rng(9);
  const Matrix x = random_matrix(7, 3, rng);
  const MlpConfig cfg{.hidden = {5}};
  const Mlp one(3, 2, cfg, 1);
  const std::vector<Mlp> same(4, one);
  EXPECT_EQ(predict_ensemble(same, x), one.predict(x));

  Mlp pos(3, 2, {.hidden = {}, .activation = Activation::kIdentity}, 2);
  for (std::size_t i = 6; i < pos.params().size(); ++i) pos.params()[i] = 0.3;  // biases
  Mlp neg = pos;
  for (double& p : neg.params()) p = -p;
  const std::vector<Mlp> pair{pos, neg};
  const Matrix zero = predict_ensemble(pair, x);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);

  std::vector<Mlp> members;
  for (std::uint64_t s = 0; s < 7; ++s) members.emplace_back(3, 2, cfg, s);
  const Matrix forward = predict_ensemble(members, x);
  std::reverse(members.begin(), members.end());
  std::swap(members[1], members[4]);
  EXPECT_EQ(predict_ensemble(members, x), forward);
}

TEST(PredictEnsemble, Errors) {
  const std::vector<Mlp> none;
  try {
    predict_ensemble(none, Matrix(1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyEnsemble);
  }
  const std::vector<Mlp> mixed{Mlp(3, 2, {}, 1), Mlp(3, 1, {}, 1)};
  EXPECT_THROW(predict_ensemble(mixed, Matrix(1, 3)), Error);
}

}  // namespace
}  // namespace prefrank
