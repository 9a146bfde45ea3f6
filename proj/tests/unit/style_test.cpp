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

#include "prefrank/style.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "prefrank/rng.hpp"

namespace prefrank {
namespace {

TEST(StyleFeatures, PoliteRequest) {
  const auto v = extract_style_features("Please write a short poem.");
  EXPECT_FALSE(v.empty);
  // Five tokens, one complete capitalized sentence.
  EXPECT_DOUBLE_EQ(v[kSentenceCompleteness], 1.0);
  EXPECT_DOUBLE_EQ(v[kArticleRate], 1.0 / 5);
  EXPECT_DOUBLE_EQ(v[kPolitenessRate], 1.0 / 5);
  EXPECT_DOUBLE_EQ(v[kPeriodDensity], 1.0 / 5);
  EXPECT_DOUBLE_EQ(v[kCapitalizedStartRate], 1.0);
  EXPECT_DOUBLE_EQ(v[kLowercaseStartRate], 0.0);
  EXPECT_DOUBLE_EQ(v[kQuestionRate], 0.0);
  EXPECT_DOUBLE_EQ(v[kCommaDensity], 0.0);
  // (6 + 5 + 1 + 5 + 4) / 5 letters, scaled by 12.
  EXPECT_DOUBLE_EQ(v[kMeanTokenLength], 4.2 / 12);
  EXPECT_DOUBLE_EQ(v[kTypeTokenRatio], 1.0);
  EXPECT_DOUBLE_EQ(v[kMeanSentenceLength], 5.0 / 40);
  EXPECT_DOUBLE_EQ(v[kFirstPersonRate], 0.0);
  EXPECT_DOUBLE_EQ(v[kContractionRate], 0.0);
}

TEST(StyleFeatures, BareLowercaseFragment) {
  const auto v = extract_style_features("what is rust");
  EXPECT_DOUBLE_EQ(v[kCapitalizedStartRate], 0.0);
  EXPECT_DOUBLE_EQ(v[kSentenceCompleteness], 0.0);
  EXPECT_DOUBLE_EQ(v[kLowercaseStartRate], 1.0);
  EXPECT_DOUBLE_EQ(v[kMeanSentenceLength], 3.0 / 40);
}

TEST(StyleFeatures, ThreeSentenceMix) {
  const auto v = extract_style_features("I can't do it! Could you help? thanks 2 u");
  // Ten tokens; sentences end with '!', '?' and nothing.
  EXPECT_DOUBLE_EQ(v[kSentenceCompleteness], 2.0 / 3);
  EXPECT_DOUBLE_EQ(v[kQuestionRate], 1.0 / 3);
  EXPECT_DOUBLE_EQ(v[kExclamationRate], 1.0 / 3);
  EXPECT_DOUBLE_EQ(v[kCapitalizedStartRate], 2.0 / 3);
  EXPECT_DOUBLE_EQ(v[kLowercaseStartRate], 1.0 / 3);
  EXPECT_DOUBLE_EQ(v[kFirstPersonRate], 0.1);
  EXPECT_DOUBLE_EQ(v[kSecondPersonRate], 0.2);
  EXPECT_DOUBLE_EQ(v[kDigitTokenRate], 0.1);
  EXPECT_DOUBLE_EQ(v[kContractionRate], 0.1);
  // "thanks" and "could you".
  EXPECT_DOUBLE_EQ(v[kPolitenessRate], 0.2);
  EXPECT_DOUBLE_EQ(v[kMeanTokenLength], 3.0 / 12);
  EXPECT_DOUBLE_EQ(v[kMeanSentenceLength], 10.0 / 3 / 40);
}

TEST(StyleFeatures, DecimalPointDoesNotEndSentence) {
  const auto v = extract_style_features("3.14 is pi.");
  // Tokens 3, 14, is, pi; one sentence starting with a digit.
  EXPECT_DOUBLE_EQ(v[kSentenceCompleteness], 1.0);
  EXPECT_DOUBLE_EQ(v[kPeriodDensity], 0.5);
  EXPECT_DOUBLE_EQ(v[kDigitTokenRate], 0.5);
  EXPECT_DOUBLE_EQ(v[kCapitalizedStartRate], 0.0);
  EXPECT_DOUBLE_EQ(v[kLowercaseStartRate], 0.0);
  EXPECT_DOUBLE_EQ(v[kTypeTokenRatio], 1.0);
}

TEST(StyleFeatures, LineBreaksAndRepeatedWords) {
  const auto v = extract_style_features("the cat\nThe cat...");
  EXPECT_DOUBLE_EQ(v[kSentenceCompleteness], 0.5);
  EXPECT_DOUBLE_EQ(v[kTypeTokenRatio], 0.5);
  EXPECT_DOUBLE_EQ(v[kArticleRate], 0.5);
  EXPECT_DOUBLE_EQ(v[kPeriodDensity], 0.75);
}

TEST(StyleFeatures, EmptyTextFlagged) {
  for (const char* t : {"", "  ", "?!"}) {
    const auto v = extract_style_features(t);
    EXPECT_TRUE(v.empty);
    for (double x : v.values) EXPECT_EQ(x, 0.0);
  }
}

TEST(StyleFeatures, AllInUnitInterval) {
  Rng rng(1);
  const std::string alphabet = "abcXYZ019 ,.!?'\n";
  for (int rep = 0; rep < 500; ++rep) {
    std::string s;
    const auto len = rng.below(60);
    for (std::uint64_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
    const auto v = extract_style_features(s);
    for (double x : v.values) {
      EXPECT_GE(x, 0.0) << s;
      EXPECT_LE(x, 1.0) << s;
    }
  }
}

TEST(MeanStyle, SkipsEmptyQueries) {
  const std::vector<StyleVector> qs{extract_style_features("what is rust"),
                                    extract_style_features(""),
                                    extract_style_features("Please write a short poem.")};
  const auto m = mean_style(qs);
  EXPECT_FALSE(m.empty);
  EXPECT_DOUBLE_EQ(m[kCapitalizedStartRate], 0.5);
  const std::vector<StyleVector> none{extract_style_features("")};
  EXPECT_TRUE(mean_style(none).empty);
}

TEST(StylePseudoDocument, TopPositiveFeaturesInOrder) {
  StyleVector v;
  v.values[3] = 0.2;
  v.values[7] = 0.9;
  v.values[1] = 0.2;
  v.values[12] = 0.5;
  EXPECT_EQ(style_pseudo_document(v, 6), (Document{7, 12, 1, 3}));
  EXPECT_EQ(style_pseudo_document(v, 2), (Document{7, 12}));
  EXPECT_TRUE(style_pseudo_document(StyleVector{}, 6).empty());
}

std::string prose(Rng& rng) {
  static const char* subjects[] = {"the history of Rome", "a recipe for bread",
                                   "the theory of relativity", "an email to my landlord",
                                   "the causes of inflation", "a cover letter"};
  static const char* openers[] = {"Could you please explain ", "Please write ",
                                  "I would like to understand ", "Can you describe "};
  std::string s = openers[rng.below(4)];
  s += subjects[rng.below(6)];
  s += rng.bernoulli(0.5) ? ", in simple terms?" : ", with an example.";
  return s;
}

std::string fragment(Rng& rng) {
  static const char* words[] = {"rust", "borrow", "checker", "error", "python", "list",
                                "sort", "fast", "docker", "port", "fix", "bug"};
  std::string s;
  const auto n = 2 + rng.below(4);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += words[rng.below(12)];
  }
  return s;
}

TEST(StyleTopicMixture, ProseAndFragmentUsersSeparate) {
  Rng rng(5);
  std::vector<std::vector<StyleVector>> users(40);
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (int q = 0; q < 10; ++q) {
      users[u].push_back(extract_style_features(u < 20 ? prose(rng) : fragment(rng)));
    }
  }
  const auto st = style_topic_mixture(users, {.iterations = 300});
  std::vector<std::size_t> dominant;
  for (const auto& m : st.user_mixtures) {
    EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 1.0, 1e-9);
    dominant.push_back(static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin()));
  }
  auto majority = [&](std::size_t from, std::size_t to) {
    std::vector<int> votes(6, 0);
    for (std::size_t u = from; u < to; ++u) ++votes[dominant[u]];
    return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  };
  const std::size_t prose_topic = majority(0, 20), fragment_topic = majority(20, 40);
  EXPECT_NE(prose_topic, fragment_topic);
  std::size_t differs = 0;
  for (std::size_t u = 0; u < 40; ++u) {
    differs += dominant[u] != (u < 20 ? fragment_topic : prose_topic) ? 1 : 0;
  }
  EXPECT_GE(differs, 36u);
}

TEST(StyleTopicMixture, SingleQueryAndFallback) {
  const std::vector<std::vector<StyleVector>> one{{extract_style_features("Hello there.")}};
  const auto st = style_topic_mixture(one, {.iterations = 50});
  const auto doc = style_pseudo_document(one[0][0], 6);
  const auto direct = infer_topic_mixture(st.model, doc).theta;
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(st.user_mixtures[0][k], direct[k], 1e-15);

  const std::vector<std::vector<StyleVector>> with_empty{{extract_style_features("Hello there.")},
                                                         {extract_style_features("")}};
  const auto fb = style_topic_mixture(with_empty, {.iterations = 20});
  EXPECT_FALSE(fb.fallback[0]);
  EXPECT_TRUE(fb.fallback[1]);
  const std::vector<std::vector<StyleVector>> no_queries{{}};
  EXPECT_THROW(style_topic_mixture(no_queries), Error);
}

}  // namespace
}  // namespace prefrank
