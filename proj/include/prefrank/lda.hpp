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

#ifndef PREFRANK_LDA_HPP_
#define PREFRANK_LDA_HPP_

// Latent Dirichlet allocation by collapsed Gibbs sampling, fold-in inference
// for single documents, and NPMI coherence / top-word diversity scores.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <unordered_set>
#include <vector>

#include "prefrank/error.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

using Document = std::vector<std::size_t>;  // word ids

struct LdaConfig {
  std::size_t topics = 10;
  double alpha = 0.0;  // <= 0 selects 50 / topics
  double eta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 7;

  double effective_alpha() const {
    return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(topics);
  }
};

struct TopicModel {
  std::size_t topics = 0;
  std::size_t vocab_size = 0;
  double alpha = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<long> topic_word;      // topics x vocab_size
  std::vector<long> topic_total;     // topics
  std::vector<long> doc_topic;       // documents x topics
  std::vector<long> doc_length;      // documents

  long count(std::size_t k, std::size_t w) const { return topic_word[k * vocab_size + w]; }

  double word_probability(std::size_t k, std::size_t w) const {
    return (static_cast<double>(count(k, w)) + eta) /
           (static_cast<double>(topic_total[k]) + static_cast<double>(vocab_size) * eta);
  }

  std::vector<double> word_distribution(std::size_t k) const {
    std::vector<double> phi(vocab_size);
    for (std::size_t w = 0; w < vocab_size; ++w) phi[w] = word_probability(k, w);
    return phi;
  }

  std::size_t document_count() const { return doc_length.size(); }

  // Posterior-mean mixture of a training document.
  std::vector<double> training_mixture(std::size_t d) const {
    std::vector<double> theta(topics);
    const double denom = static_cast<double>(doc_length[d]) + static_cast<double>(topics) * alpha;
    for (std::size_t k = 0; k < topics; ++k) {
      theta[k] = (static_cast<double>(doc_topic[d * topics + k]) + alpha) / denom;
    }
    return theta;
  }

  long total_tokens() const {
    return std::accumulate(topic_total.begin(), topic_total.end(), 0L);
  }

  // Highest-probability word ids of topic k; ties go to the smaller id.
  std::vector<std::size_t> top_words(std::size_t k, std::size_t n) const {
    std::vector<std::size_t> ids(vocab_size);
    std::iota(ids.begin(), ids.end(), 0);
    n = std::min(n, vocab_size);
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](std::size_t a, std::size_t b) {
                        const long ca = count(k, a), cb = count(k, b);
                        return ca != cb ? ca > cb : a < b;
                      });
    ids.resize(n);
    return ids;
  }
};

// Called after every sweep with the sweep number (1-based).
using SweepObserver = std::function<void(int, const TopicModel&)>;

inline TopicModel train_lda(std::span<const Document> corpus, std::size_t vocab_size,
                            const LdaConfig& cfg, const SweepObserver& observer = {}) {
  if (corpus.empty()) throw Error(Errc::kEmptyCorpus, "no documents");
  if (cfg.topics < 1) throw Error(Errc::kInvalidArgument, "topics must be >= 1");
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    if (corpus[d].empty()) throw Error(Errc::kEmptyDocument, std::to_string(d));
    for (std::size_t w : corpus[d]) {
      if (w >= vocab_size) throw Error(Errc::kInvalidArgument, "word id out of range");
    }
  }
  const std::size_t K = cfg.topics;
  TopicModel m;
  m.topics = K;
  m.vocab_size = vocab_size;
  m.alpha = cfg.effective_alpha();
  m.eta = cfg.eta;
  m.seed = cfg.seed;
  m.iterations = cfg.iterations;
  m.topic_word.assign(K * vocab_size, 0);
  m.topic_total.assign(K, 0);
  m.doc_topic.assign(corpus.size() * K, 0);
  m.doc_length.resize(corpus.size());

  Rng rng(cfg.seed);
  std::vector<std::vector<std::uint32_t>> z(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    m.doc_length[d] = static_cast<long>(corpus[d].size());
    z[d].resize(corpus[d].size());
    for (std::size_t i = 0; i < corpus[d].size(); ++i) {
      const auto k = static_cast<std::uint32_t>(rng.below(K));
      z[d][i] = k;
      ++m.topic_word[k * vocab_size + corpus[d][i]];
      ++m.topic_total[k];
      ++m.doc_topic[d * K + k];
    }
  }

  const double v_eta = static_cast<double>(vocab_size) * m.eta;
  std::vector<double> weights(K);
  for (int sweep = 1; sweep <= cfg.iterations; ++sweep) {
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      long* dt = &m.doc_topic[d * K];
      for (std::size_t i = 0; i < corpus[d].size(); ++i) {
        const std::size_t w = corpus[d][i];
        const std::uint32_t old = z[d][i];
        --m.topic_word[old * vocab_size + w];
        --m.topic_total[old];
        --dt[old];
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          weights[k] = (static_cast<double>(dt[k]) + m.alpha) *
                       (static_cast<double>(m.topic_word[k * vocab_size + w]) + m.eta) /
                       (static_cast<double>(m.topic_total[k]) + v_eta);
          total += weights[k];
        }
        const auto k = static_cast<std::uint32_t>(rng.categorical(weights, total));
        z[d][i] = k;
        ++m.topic_word[k * vocab_size + w];
        ++m.topic_total[k];
        ++dt[k];
      }
    }
    if (observer) observer(sweep, m);
  }
  return m;
}

struct TopicMixture {
  std::vector<double> theta;
  bool fallback = false;  // no in-vocabulary token: uniform mixture
};

struct FoldInConfig {
  int burn_in = 50;
  int samples = 100;
};

// Fold-in Gibbs estimate of a new document's mixture with the trained topics
// held fixed. Seeded from the model seed and the document's contents, so the
// same document always gets the same mixture.
inline TopicMixture infer_topic_mixture(const TopicModel& model, std::span<const std::size_t> doc,
                                        const FoldInConfig& cfg = {}) {
  const std::size_t K = model.topics;
  TopicMixture out;
  std::vector<std::size_t> words;
  for (std::size_t w : doc) {
    if (w < model.vocab_size) words.push_back(w);
  }
  if (words.empty()) {
    out.theta.assign(K, 1.0 / static_cast<double>(K));
    out.fallback = true;
    return out;
  }
  std::uint64_t h = 0x51ed270b27a1c2d1ULL;
  for (std::size_t w : words) h = mix_seed(h, w);
  Rng rng(mix_seed(model.seed, h));

  std::vector<std::vector<double>> phi_w(words.size(), std::vector<double>(K));
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t k = 0; k < K; ++k) phi_w[i][k] = model.word_probability(k, words[i]);
  }
  std::vector<std::uint32_t> z(words.size());
  std::vector<long> counts(K, 0);
  for (auto& zi : z) {
    zi = static_cast<std::uint32_t>(rng.below(K));
    ++counts[zi];
  }
  std::vector<double> weights(K);
  std::vector<double> acc(K, 0.0);
  const double denom = static_cast<double>(words.size()) + static_cast<double>(K) * model.alpha;
  for (int sweep = 0; sweep < cfg.burn_in + cfg.samples; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --counts[z[i]];
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        weights[k] = (static_cast<double>(counts[k]) + model.alpha) * phi_w[i][k];
        total += weights[k];
      }
      z[i] = static_cast<std::uint32_t>(rng.categorical(weights, total));
      ++counts[z[i]];
    }
    if (sweep >= cfg.burn_in) {
      for (std::size_t k = 0; k < K; ++k) {
        acc[k] += (static_cast<double>(counts[k]) + model.alpha) / denom;
      }
    }
  }
  const double sum = std::accumulate(acc.begin(), acc.end(), 0.0);
  out.theta.resize(K);
  for (std::size_t k = 0; k < K; ++k) out.theta[k] = acc[k] / sum;
  return out;
}

// Mean of per-query mixtures.
inline std::vector<double> mean_mixture(std::span<const std::vector<double>> mixtures) {
  if (mixtures.empty()) throw Error(Errc::kNoQueries, "no queries to average");
  std::vector<double> mean(mixtures.front().size(), 0.0);
  for (const auto& theta : mixtures) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += theta[k];
  }
  double sum = 0.0;
  for (double& v : mean) {
    v /= static_cast<double>(mixtures.size());
    sum += v;
  }
  for (double& v : mean) v /= sum;
  return mean;
}

inline std::vector<double> user_topic_profile(const TopicModel& model,
                                              std::span<const Document> queries) {
  if (queries.empty()) throw Error(Errc::kNoQueries, "user has no queries");
  std::vector<std::vector<double>> mixtures;
  mixtures.reserve(queries.size());
  for (const auto& q : queries) mixtures.push_back(infer_topic_mixture(model, q).theta);
  return mean_mixture(mixtures);
}

// Document-level NPMI with one virtual document holding every word:
// p(w) = (D_w + 1) / (D + 1), p(u, v) = (D_uv + 1) / (D + 1).
inline double npmi(std::size_t df_u, std::size_t df_v, std::size_t df_uv, std::size_t docs) {
  const double n = static_cast<double>(docs) + 1.0;
  const double pu = (static_cast<double>(df_u) + 1.0) / n;
  const double pv = (static_cast<double>(df_v) + 1.0) / n;
  const double puv = (static_cast<double>(df_uv) + 1.0) / n;
  if (puv >= 1.0) return 1.0;
  return std::log(puv / (pu * pv)) / -std::log(puv);
}

struct TopicQuality {
  double coherence = 0.0;  // mean NPMI over top-10 word pairs
  double diversity = 0.0;  // unique share of all topics' top-25 words
  std::vector<double> per_topic_coherence;
};

inline double topic_diversity(std::span<const std::vector<std::size_t>> top_lists) {
  std::unordered_set<std::size_t> unique;
  std::size_t total = 0;
  for (const auto& list : top_lists) {
    total += list.size();
    unique.insert(list.begin(), list.end());
  }
  return total == 0 ? 0.0 : static_cast<double>(unique.size()) / static_cast<double>(total);
}

inline TopicQuality topic_quality(const TopicModel& model, std::span<const Document> corpus,
                                  std::size_t coherence_words = 10,
                                  std::size_t diversity_words = 25) {
  std::vector<std::unordered_set<std::size_t>> doc_sets;
  doc_sets.reserve(corpus.size());
  for (const auto& d : corpus) doc_sets.emplace_back(d.begin(), d.end());
  auto df = [&](std::size_t u) {
    std::size_t c = 0;
    for (const auto& s : doc_sets) c += s.contains(u) ? 1 : 0;
    return c;
  };
  auto co_df = [&](std::size_t u, std::size_t v) {
    std::size_t c = 0;
    for (const auto& s : doc_sets) c += (s.contains(u) && s.contains(v)) ? 1 : 0;
    return c;
  };
  TopicQuality q;
  std::vector<std::vector<std::size_t>> tops;
  for (std::size_t k = 0; k < model.topics; ++k) {
    const auto top = model.top_words(k, coherence_words);
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < top.size(); ++i) {
      for (std::size_t j = i + 1; j < top.size(); ++j) {
        sum += npmi(df(top[i]), df(top[j]), co_df(top[i], top[j]), corpus.size());
        ++pairs;
      }
    }
    q.per_topic_coherence.push_back(pairs ? sum / static_cast<double>(pairs) : 0.0);
    tops.push_back(model.top_words(k, diversity_words));
  }
  q.coherence = q.per_topic_coherence.empty()
                    ? 0.0
                    : std::accumulate(q.per_topic_coherence.begin(),
                                      q.per_topic_coherence.end(), 0.0) /
                          static_cast<double>(q.per_topic_coherence.size());
  q.diversity = topic_diversity(tops);
  return q;
}

}  // namespace prefrank

#endif  // PREFRANK_LDA_HPP_
