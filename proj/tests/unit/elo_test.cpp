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


#include "prefrank/elo.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "prefrank/rng.hpp"
#include "prefrank/stats.hpp"
#include "test_util.hpp"

namespace prefrank {
namespace {

using testing::make_log;

TEST(EloExpectedScore, Fixtures) {
  EXPECT_DOUBLE_EQ(elo_expected_score(1000, 1000), 0.5);
  EXPECT_NEAR(elo_expected_score(1400, 1000), 10.0 / 11.0, 1e-12);
  EXPECT_NEAR(elo_expected_score(600, 1000), 1.0 / 11.0, 1e-12);
}

TEST(EloExpectedScore, ComplementsToOne) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double a = 800 + 800 * rng.uniform(), b = 800 + 800 * rng.uniform();
    EXPECT_NEAR(elo_expected_score(a, b) + elo_expected_score(b, a), 1.0, 1e-12);
  }
}

TEST(EloExpectedScore, NonFinite) {
  EXPECT_THROW(elo_expected_score(NAN, 1000), Error);
  EXPECT_THROW(elo_expected_score(1000, INFINITY), Error);
}

TEST(EloUpdate, Fixtures) {
  const EloConfig cfg;
  auto [a, b] = elo_update({1000, 1000}, Outcome::kAWins, cfg);
  EXPECT_NEAR(a, 1016.0, 1e-9);
  EXPECT_NEAR(b, 984.0, 1e-9);
  auto [c, d] = elo_update({1000, 1000}, Outcome::kTie, cfg);
  EXPECT_EQ(c, 1000.0);
  EXPECT_EQ(d, 1000.0);
  auto [e, f] = elo_update({1400, 1000}, Outcome::kBWins, cfg);
  EXPECT_NEAR(1400 - e, 32.0 * 10.0 / 11.0, 1e-9);
  EXPECT_NEAR(f - 1000, 32.0 * 10.0 / 11.0, 1e-9);
}

TEST(EloUpdate, BothBadActsAsTie) {
  const EloConfig cfg;
  EXPECT_EQ(elo_update({1100, 1000}, Outcome::kBothBad, cfg),
            elo_update({1100, 1000}, Outcome::kTie, cfg));
}

TEST(EloUpdate, TransferConservesSum) {
  Rng rng(11);
  const EloConfig cfg;
  const Outcome outcomes[] = {Outcome::kAWins, Outcome::kBWins, Outcome::kTie};
  for (int i = 0; i < 2000; ++i) {
    const double a = 500 + 1000 * rng.uniform(), b = 500 + 1000 * rng.uniform();
    const auto [a2, b2] = elo_update({a, b}, outcomes[rng.below(3)], cfg);
    EXPECT_NEAR(a2 + b2, a + b, 1e-9);
  }
}

TEST(EloTable, SingleBattle) {
  const BattleLog log = make_log({{"u", "A", "B", Outcome::kAWins},
                                  {"v", "C", "D", Outcome::kTie}});
  const RatingVector r = compute_elo_table(log, Subject::of_user("u"));
  EXPECT_NEAR(r.scores[0], 1016, 1e-9);
  EXPECT_NEAR(r.scores[1], 984, 1e-9);
  EXPECT_EQ(r.scores[2], 1000.0);
  EXPECT_EQ(r.scores[3], 1000.0);
  EXPECT_TRUE(r.observed[0] && r.observed[1]);
  EXPECT_FALSE(r.observed[2] || r.observed[3]);
  EXPECT_THROW(compute_elo_table(log, Subject::of_user("w")), Error);
}

// Hand replay of A>B then B>A, once and twice.
TEST(EloTable, ReplayIsOrderAndMultiplicitySensitive) {
  auto expect = [](double ra, double rb) { return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0)); };
  double a = 1000, b = 1000;
  auto step = [&](bool a_wins) {
    const double d = 32.0 * ((a_wins ? 1.0 : 0.0) - expect(a, b));
    a += d;
    b -= d;
  };
  step(true);
  step(false);
  const double one_a = a;
  step(true);
  step(false);
  const double two_a = a;

  const BattleLog once = make_log({{"u", "A", "B", Outcome::kAWins},
                                   {"u", "A", "B", Outcome::kBWins}});
  const BattleLog twice = make_log({{"u", "A", "B", Outcome::kAWins},
                                    {"u", "A", "B", Outcome::kBWins},
                                    {"u", "A", "B", Outcome::kAWins},
                                    {"u", "A", "B", Outcome::kBWins}});
  const RatingVector r1 = compute_elo_table(once, Subject::global());
  const RatingVector r2 = compute_elo_table(twice, Subject::global());
  EXPECT_NEAR(r1.scores[0], one_a, 1e-9);
  EXPECT_NEAR(r2.scores[0], two_a, 1e-9);
  EXPECT_NE(r1.scores[0], r2.scores[0]);

  const BattleLog reversed = make_log({{"u", "A", "B", Outcome::kBWins},
                                       {"u", "A", "B", Outcome::kAWins}});
  EXPECT_NE(compute_elo_table(reversed, Subject::global()).scores[0], r1.scores[0]);
}

TEST(EloTable, Deterministic) {
  BattleLog log;
  Rng rng(5);
  const char* models[] = {"A", "B", "C", "D"};
  for (int i = 0; i < 500; ++i) {
    const auto a = rng.below(4);
    const auto b = (a + 1 + rng.below(3)) % 4;
    testing::add_battles(log, "u" + std::to_string(rng.below(5)), models[a], models[b],
                         static_cast<Outcome>(rng.below(4)), 1);
  }
  const RatingVector x = compute_elo_table(log, Subject::global());
  const RatingVector y = compute_elo_table(log, Subject::global());
  EXPECT_EQ(x.scores, y.scores);
}

TEST(RestrictToObserved, KeepsOnlyObservedModels) {
  BattleLog log;
  for (int m = 0; m < 20; ++m) testing::add_battles(log, "g", "M" + std::to_string(m),
                                                    "M" + std::to_string((m + 1) % 20),
                                                    Outcome::kAWins, 1);
  testing::add_battles(log, "u", "M0", "M1", Outcome::kAWins, 1);
  testing::add_battles(log, "u", "M1", "M2", Outcome::kBWins, 1);
  const RatingVector global = compute_elo_table(log, Subject::global());
  const RatingVector personal = compute_elo_table(log, Subject::of_user("u"));
  const RestrictedScores r = restrict_to_observed(personal, global);
  EXPECT_EQ(r.models.size(), 3u);
  for (ModelId m : r.models) EXPECT_TRUE(personal.observed[index_of(m)]);
  // M5 keeps the initial 1000 in the personal table but never appears.
  EXPECT_EQ(personal.scores[5], 1000.0);
  for (ModelId m : r.models) EXPECT_NE(index_of(m), 5u);

  BattleLog two;
  testing::add_battles(two, "u", "A", "B", Outcome::kAWins, 3);
  EXPECT_THROW(restrict_to_observed(compute_elo_table(two, Subject::of_user("u")),
                                    compute_elo_table(two, Subject::global())),
               Error);
}

TEST(EloTable, RankInvariantUnderMonotoneTransform) {
  BattleLog log;
  Rng rng(9);
  const char* models[] = {"A", "B", "C", "D", "E"};
  for (int i = 0; i < 300; ++i) {
    const auto a = rng.below(5);
    const auto b = (a + 1 + rng.below(4)) % 5;
    testing::add_battles(log, "u", models[a], models[b], rng.bernoulli(0.6) ? Outcome::kAWins
                                                                             : Outcome::kBWins, 1);
  }
  const RatingVector r = compute_elo_table(log, Subject::global());
  std::vector<double> transformed;
  for (double s : r.scores) transformed.push_back(std::exp(s / 100.0) + 3.0);
  EXPECT_DOUBLE_EQ(spearman_rho(r.scores, transformed), 1.0);
}

}  // namespace
}  // namespace prefrank
