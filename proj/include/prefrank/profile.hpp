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

#ifndef PREFRANK_PROFILE_HPP_
#define PREFRANK_PROFILE_HPP_

// Per-user topic and style profiles built from a battle log's prompts.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefrank/battle.hpp"
#include "prefrank/lda.hpp"
#include "prefrank/parallel.hpp"
#include "prefrank/rng.hpp"
#include "prefrank/style.hpp"
#include "prefrank/text.hpp"

namespace prefrank {

struct UserProfile {
  std::string user_id;
  std::vector<double> topic;         // K-simplex
  StyleVector style;                 // mean stylometric features
  std::vector<double> style_topics;  // style-topic simplex
  std::size_t query_count = 0;

  // Regression input: topic profile followed by style features.
  std::vector<double> regression_input() const {
    std::vector<double> x = topic;
    x.insert(x.end(), style.values.begin(), style.values.end());
    return x;
  }
};

struct FeatureConfig {
  std::size_t topics = 10;
  std::size_t style_topics = 6;
  std::size_t style_top_q = 6;
  int topic_iterations = 1000;
  int style_iterations = 1000;
  VocabularyConfig vocabulary;
  std::uint64_t seed = 7;
};

struct FeatureSet {
  std::vector<UserProfile> profiles;  // in log user order
  Vocabulary vocabulary;
  TopicModel topic_model;
  std::vector<Document> topic_corpus;
  StyleTopics style;
  std::size_t out_of_vocabulary_queries = 0;
};

inline FeatureSet build_user_profiles(const BattleLog& log, const FeatureConfig& cfg = {},
                                      unsigned workers = default_workers()) {
  // Distinct prompt texts, first appearance order.
  std::vector<std::string> texts;
  std::unordered_map<std::string, std::size_t> text_id;
  std::vector<std::vector<std::size_t>> user_queries(log.user_count());
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& prompt = log.record(i).prompt;
    auto [it, inserted] = text_id.try_emplace(prompt, texts.size());
    if (inserted) texts.push_back(prompt);
    user_queries[index_of(log.key(i).user)].push_back(it->second);
  }

  std::vector<std::vector<std::string>> terms(texts.size());
  std::vector<StyleVector> styles(texts.size());
  parallel_for(texts.size(), [&](std::size_t t) {
    terms[t] = topic_terms(texts[t]);
    styles[t] = extract_style_features(texts[t]);
  }, workers);

  FeatureSet out;
  out.vocabulary = Vocabulary::build(terms, cfg.vocabulary);
  std::vector<Document> encoded(texts.size());
  for (std::size_t t = 0; t < texts.size(); ++t) {
    encoded[t] = out.vocabulary.encode(terms[t]);
    if (!encoded[t].empty()) out.topic_corpus.push_back(encoded[t]);
  }

  std::vector<std::vector<StyleVector>> user_styles(log.user_count());
  for (std::size_t u = 0; u < log.user_count(); ++u) {
    for (std::size_t t : user_queries[u]) user_styles[u].push_back(styles[t]);
  }

  LdaConfig topic_cfg;
  topic_cfg.topics = cfg.topics;
  topic_cfg.iterations = cfg.topic_iterations;
  topic_cfg.seed = derive_seed(cfg.seed, "topic-lda");
  StyleTopicConfig style_cfg;
  style_cfg.topics = cfg.style_topics;
  style_cfg.top_q = cfg.style_top_q;
  style_cfg.iterations = cfg.style_iterations;
  style_cfg.seed = derive_seed(cfg.seed, "style-lda");
  parallel_for(2, [&](std::size_t job) {
    if (job == 0) {
      out.topic_model = train_lda(out.topic_corpus, out.vocabulary.size(), topic_cfg);
    } else {
      out.style = style_topic_mixture(user_styles, style_cfg);
    }
  }, workers);

  std::vector<std::vector<double>> mixtures(texts.size());
  std::vector<char> fallback(texts.size(), 0);
  parallel_for(texts.size(), [&](std::size_t t) {
    auto m = infer_topic_mixture(out.topic_model, encoded[t]);
    mixtures[t] = std::move(m.theta);
    fallback[t] = m.fallback ? 1 : 0;
  }, workers);

  out.profiles.resize(log.user_count());
  for (std::size_t u = 0; u < log.user_count(); ++u) {
    UserProfile& p = out.profiles[u];
    p.user_id = log.users()[u];
    p.query_count = user_queries[u].size();
    std::vector<std::vector<double>> user_mix;
    for (std::size_t t : user_queries[u]) {
      user_mix.push_back(mixtures[t]);
      out.out_of_vocabulary_queries += fallback[t];
    }
    p.topic = mean_mixture(user_mix);
    p.style = mean_style(user_styles[u]);
    p.style_topics = out.style.user_mixtures[u];
  }
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_PROFILE_HPP_
