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

#include "prefrank/lda.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "prefrank/rng.hpp"

namespace prefrank {
namespace {

// Group g of documents draws words only from ids [g*10, g*10+10).
std::vector<Document> disjoint_corpus(std::size_t docs_per_group, std::size_t length,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Document> corpus;
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t d = 0; d < docs_per_group; ++d) {
      Document doc;
      for (std::size_t i = 0; i < length; ++i) doc.push_back(g * 10 + rng.below(10));
      corpus.push_back(std::move(doc));
    }
  }
  return corpus;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

TEST(TrainLda, CountsConservedEverySweep) {
  const auto corpus = disjoint_corpus(30, 15, 1);
  std::vector<long> word_total(20, 0);
  long tokens = 0;
  for (const auto& d : corpus) {
    for (auto w : d) ++word_total[w];
    tokens += static_cast<long>(d.size());
  }
  int sweeps = 0;
  LdaConfig cfg{.topics = 3, .iterations = 25, .seed = 4};
  train_lda(corpus, 20, cfg, [&](int sweep, const TopicModel& m) {
    ++sweeps;
    EXPECT_EQ(sweep, sweeps);
    EXPECT_EQ(m.total_tokens(), tokens);
    for (std::size_t k = 0; k < m.topics; ++k) {
      long row = 0;
      for (std::size_t w = 0; w < 20; ++w) {
        EXPECT_GE(m.count(k, w), 0);
        row += m.count(k, w);
      }
      EXPECT_EQ(row, m.topic_total[k]);
    }
    for (std::size_t w = 0; w < 20; ++w) {
      long col = 0;
      for (std::size_t k = 0; k < m.topics; ++k) col += m.count(k, w);
      EXPECT_EQ(col, word_total[w]);
    }
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      long row = 0;
      for (std::size_t k = 0; k < m.topics; ++k) row += m.doc_topic[d * m.topics + k];
      EXPECT_EQ(row, m.doc_length[d]);
    }
  });
  EXPECT_EQ(sweeps, 25);
}

TEST(TrainLda, DisjointVocabulariesSeparate) {
  const auto corpus = disjoint_corpus(200, 20, 9);
  const auto m = train_lda(corpus, 20, {.topics = 2, .iterations = 200, .seed = 7});
  // Topic labels are arbitrary; fix them by the first group's majority.
  std::size_t votes = 0;
  for (std::size_t d = 0; d < 200; ++d) votes += argmax(m.training_mixture(d)) == 0 ? 1 : 0;
  const std::size_t first_topic = votes >= 100 ? 0 : 1;
  std::size_t correct = 0;
  for (std::size_t d = 0; d < 400; ++d) {
    const std::size_t want = d < 200 ? first_topic : 1 - first_topic;
    correct += argmax(m.training_mixture(d)) == want ? 1 : 0;
  }
  EXPECT_GE(correct, 380u);

  // A fresh document from one group folds in onto that group's topic.
  Document fresh;
  for (std::size_t i = 0; i < 100; ++i) fresh.push_back(10 + i % 10);
  const auto mix = infer_topic_mixture(m, fresh);
  EXPECT_FALSE(mix.fallback);
  EXPECT_EQ(argmax(mix.theta), 1 - first_topic);
  EXPECT_GT(mix.theta[1 - first_topic], 0.8);
  EXPECT_NEAR(std::accumulate(mix.theta.begin(), mix.theta.end(), 0.0), 1.0, 1e-12);
}

TEST(TrainLda, SingleTopicGivesUnitMixture) {
  const std::vector<Document> corpus(5, Document{0});
  const auto m = train_lda(corpus, 1, {.topics = 1, .iterations = 10});
  for (std::size_t d = 0; d < 5; ++d) EXPECT_DOUBLE_EQ(m.training_mixture(d)[0], 1.0);
  const Document one{0};
  EXPECT_DOUBLE_EQ(infer_topic_mixture(m, one).theta[0], 1.0);
  std::vector<Document> corpus_vec(corpus.begin(), corpus.end());
  EXPECT_DOUBLE_EQ(topic_quality(m, corpus_vec).diversity, 1.0);
}

TEST(TrainLda, MoreTopicsThanWords) {
  const std::vector<Document> corpus{{0, 1}, {1, 0}, {0}};
  const auto m = train_lda(corpus, 2, {.topics = 6, .iterations = 20});
  for (std::size_t k = 0; k < 6; ++k) {
    const auto phi = m.word_distribution(k);
    EXPECT_NEAR(phi[0] + phi[1], 1.0, 1e-12);
  }
}

TEST(TrainLda, DeterministicForSeed) {
  const auto corpus = disjoint_corpus(20, 10, 3);
  const LdaConfig cfg{.topics = 4, .iterations = 30, .seed = 11};
  const auto a = train_lda(corpus, 20, cfg);
  const auto b = train_lda(corpus, 20, cfg);
  EXPECT_EQ(a.topic_word, b.topic_word);
  EXPECT_EQ(a.doc_topic, b.doc_topic);
  auto c_cfg = cfg;
  c_cfg.seed = 12;
  EXPECT_NE(train_lda(corpus, 20, c_cfg).doc_topic, a.doc_topic);
  const Document q{1, 2, 15};
  EXPECT_EQ(infer_topic_mixture(a, q).theta, infer_topic_mixture(b, q).theta);
}

TEST(TrainLda, RejectsBadCorpora) {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInvalidArgument;
  };
  const std::vector<Document> empty;
  const std::vector<Document> hole{{0}, {}};
  EXPECT_EQ(code([&] { train_lda(empty, 3, {}); }), Errc::kEmptyCorpus);
  EXPECT_EQ(code([&] { train_lda(hole, 3, {}); }), Errc::kEmptyDocument);
}

TEST(InferTopicMixture, OutOfVocabularyFallsBackToUniform) {
  const std::vector<Document> corpus{{0, 1}, {1, 2}};
  const auto m = train_lda(corpus, 3, {.topics = 4, .iterations = 5});
  const Document empty;
  const auto mix = infer_topic_mixture(m, empty);
  EXPECT_TRUE(mix.fallback);
  for (double t : mix.theta) EXPECT_DOUBLE_EQ(t, 0.25);
  const Document oov{7, 9};
  EXPECT_TRUE(infer_topic_mixture(m, oov).fallback);
}

TEST(UserTopicProfile, MeanOfMixtures) {
  const std::vector<std::vector<double>> two{{1, 0}, {0, 1}};
  EXPECT_EQ(mean_mixture(two), (std::vector<double>{0.5, 0.5}));
  const std::vector<Document> corpus = disjoint_corpus(10, 10, 5);
  const auto m = train_lda(corpus, 20, {.topics = 3, .iterations = 20});
  const std::vector<Document> one{{3, 4, 5}};
  const auto single = user_topic_profile(m, one);
  const auto theta = infer_topic_mixture(m, one[0]).theta;
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(single[k], theta[k], 1e-15);
  const std::vector<Document> several{{3, 4}, {12, 13}, {1, 19, 2}};
  const auto p = user_topic_profile(m, several);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  for (double x : p) EXPECT_GE(x, 0.0);
  const std::vector<Document> none;
  EXPECT_THROW(user_topic_profile(m, none), Error);
}

TEST(Npmi, FourDocumentFixture) {
  // u and v both in docs 1 and 2 of 4: p(u) = p(v) = p(u,v) = 3/5.
  EXPECT_NEAR(npmi(2, 2, 2, 4), 1.0, 1e-12);
  // u in docs 1-2, v in docs 3-4: p(u,v) = 1/5.
  EXPECT_NEAR(npmi(2, 2, 0, 4), std::log((1.0 / 5) / (9.0 / 25)) / std::log(5.0), 1e-12);
  // Independent halves: u in {1,2}, v in {1,3}.
  EXPECT_NEAR(npmi(2, 2, 1, 4), std::log((2.0 / 5) / (9.0 / 25)) / -std::log(2.0 / 5), 1e-12);
}

TEST(TopicDiversity, Definition) {
  std::vector<std::size_t> a(25);
  std::iota(a.begin(), a.end(), 0);
  const std::vector<std::vector<std::size_t>> same{a, a};
  EXPECT_DOUBLE_EQ(topic_diversity(same), 0.5);
  auto b = a;
  for (auto& x : b) x += 25;
  const std::vector<std::vector<std::size_t>> apart{a, b};
  EXPECT_DOUBLE_EQ(topic_diversity(apart), 1.0);
}

TEST(TopicQuality, SeparatedTopicsAreCoherent) {
  const auto corpus = disjoint_corpus(100, 20, 2);
  const auto m = train_lda(corpus, 20, {.topics = 2, .iterations = 100});
  const auto q = topic_quality(m, corpus);
  // Top-25 lists cover all 20 words in each topic.
  EXPECT_DOUBLE_EQ(q.diversity, 0.5);
  ASSERT_EQ(q.per_topic_coherence.size(), 2u);
  EXPECT_GT(q.coherence, 0.0);
  EXPECT_LE(q.coherence, 1.0);
}

}  // namespace
}  // namespace prefrank
