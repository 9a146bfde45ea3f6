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

#include "prefrank/config.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <string>

namespace prefrank {
namespace {

TEST(Config, DefaultsRoundTrip) {
  const RunConfig cfg;
  const std::string text = config_to_text(cfg);
  EXPECT_EQ(config_to_text(parse_config_text(text)), text);
  EXPECT_NE(text.find("seed = 7\n"), std::string::npos);
  EXPECT_NE(text.find("elo.hidden = 512,512,256,128,64,32\n"), std::string::npos);
  EXPECT_NE(text.find("bt.activation = gelu\n"), std::string::npos);
}

TEST(Config, EditedValuesRoundTripExactly) {
  RunConfig cfg;
  cfg.input = "data/battles.jsonl";
  cfg.adapter = "arena";
  cfg.language = "English";
  cfg.min_battles = 40;
  cfg.seed = 123456789012345ULL;
  cfg.elo.k_factor = 0.1 + 0.2;  // not representable in a short decimal
  cfg.bt.l2_penalty = 1.0 / 3.0;
  cfg.confidence = 0.9;
  cfg.features.vocabulary.drop_stopwords = false;
  cfg.elo_predictor.net.hidden = {};
  cfg.elo_predictor.net.activation = Activation::kIdentity;
  cfg.bt_predictor.net.loss = LossKind::kHuber;
  cfg.bt_predictor.ensemble_size = 3;
  const RunConfig back = parse_config_text(config_to_text(cfg));
  EXPECT_EQ(back.input, cfg.input);
  EXPECT_EQ(back.adapter, "arena");
  EXPECT_EQ(back.language, "English");
  EXPECT_EQ(back.min_battles, 40u);
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.elo.k_factor, cfg.elo.k_factor);
  EXPECT_EQ(back.bt.l2_penalty, cfg.bt.l2_penalty);
  EXPECT_FALSE(back.features.vocabulary.drop_stopwords);
  EXPECT_TRUE(back.elo_predictor.net.hidden.empty());
  EXPECT_EQ(back.elo_predictor.net.activation, Activation::kIdentity);
  EXPECT_EQ(back.bt_predictor.net.loss, LossKind::kHuber);
  EXPECT_EQ(back.bt_predictor.ensemble_size, 3u);
  EXPECT_EQ(config_to_text(back), config_to_text(cfg));
  EXPECT_EQ(config_hash(back), config_hash(cfg));
  EXPECT_NE(config_hash(back), config_hash(RunConfig{}));
}

TEST(Config, CommentsBlankLinesAndOverlay) {
  RunConfig cfg;
  cfg.bootstrap = 99;
  std::istringstream in("# header\n\n  topics = 12   # trailing\nseed=3\n");
  apply_config_text(in, cfg);
  EXPECT_EQ(cfg.features.topics, 12u);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.bootstrap, 99u);  // untouched keys keep their value
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto line_of = [](const char* text) {
    try {
      parse_config_text(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kMalformedLine);
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("seed = 1\nbogus = 2\n"), 2u);
  EXPECT_EQ(line_of("\n\nno equals sign\n"), 3u);
  EXPECT_THROW(parse_config_text("seed = seven\n"), Error);
  EXPECT_THROW(parse_config_text("elo.activation = relu\n"), Error);
  EXPECT_THROW(parse_config_text("drop_stopwords = yes\n"), Error);
  EXPECT_THROW(parse_config_text("elo.hidden = 4,,8\n"), Error);
}

TEST(StageSeeds, DependOnlyOnSeedAndName) {
  const auto a = stage_seeds(7), b = stage_seeds(7), c = stage_seeds(8);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), kSeededStages.size());
  std::set<std::uint64_t> distinct;
  for (const auto& [stage, s] : a) {
    distinct.insert(s);
    EXPECT_EQ(s, derive_seed(7, stage));
    EXPECT_NE(s, c.at(stage));
  }
  EXPECT_EQ(distinct.size(), a.size());
}

}  // namespace
}  // namespace prefrank
