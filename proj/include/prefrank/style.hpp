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

#ifndef PREFRANK_STYLE_HPP_
#define PREFRANK_STYLE_HPP_

// Deterministic stylometric features of a query and style topics learned
// over each query's strongest features.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "prefrank/error.hpp"
#include "prefrank/lda.hpp"
#include "prefrank/text.hpp"

namespace prefrank {

inline constexpr std::size_t kStyleDims = 16;

enum StyleFeature : std::size_t {
  kSentenceCompleteness,
  kCommaDensity,
  kPeriodDensity,
  kQuestionRate,
  kExclamationRate,
  kCapitalizedStartRate,
  kLowercaseStartRate,
  kArticleRate,
  kFirstPersonRate,
  kSecondPersonRate,
  kDigitTokenRate,
  kMeanTokenLength,
  kTypeTokenRatio,
  kMeanSentenceLength,
  kContractionRate,
  kPolitenessRate,
};

inline constexpr std::array<std::string_view, kStyleDims> kStyleFeatureNames = {
    "sentence_completeness", "comma_density",     "period_density",
    "question_rate",         "exclamation_rate",  "capitalized_start_rate",
    "lowercase_start_rate",  "article_rate",      "first_person_rate",
    "second_person_rate",    "digit_token_rate",  "mean_token_length",
    "type_token_ratio",      "mean_sentence_length", "contraction_rate",
    "politeness_rate"};

struct StyleVector {
  std::array<double, kStyleDims> values{};
  bool empty = false;

  double operator[](std::size_t i) const { return values[i]; }
};

namespace detail {

enum class LetterCase { kUpper, kLower, kNone };

inline LetterCase letter_case(char32_t c) {
  if ((c >= 'A' && c <= 'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7)) return LetterCase::kUpper;
  if ((c >= 'a' && c <= 'z') || (c >= 0xDF && c <= 0xFF && c != 0xF7)) return LetterCase::kLower;
  return LetterCase::kNone;
}

struct Sentence {
  std::size_t words = 0;
  LetterCase start = LetterCase::kNone;
  char terminal = 0;  // first of '.', '!', '?' closing the sentence, or 0
};

// Sentences end at a run of '.', '!' or '?' (a '.' glued to a following word
// character, as in "3.14", does not end one) or at a line break. Segments
// without words are dropped.
inline std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  Sentence cur;
  bool in_word = false;
  auto close = [&](char terminal) {
    if (cur.words > 0) {
      cur.terminal = terminal;
      out.push_back(cur);
    }
    cur = Sentence{};
    in_word = false;
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t c = next_code_point(text, pos);
    if (is_word_code_point(c)) {
      if (!in_word) {
        if (cur.words == 0) cur.start = letter_case(c);
        ++cur.words;
        in_word = true;
      }
      continue;
    }
    if (is_apostrophe(c) && in_word) continue;
    in_word = false;
    if (c == '.' || c == '!' || c == '?') {
      if (c == '.' && pos < text.size()) {
        std::size_t peek = pos;
        if (is_word_code_point(next_code_point(text, peek))) continue;
      }
      const char terminal = static_cast<char>(c);
      while (pos < text.size() && (text[pos] == '.' || text[pos] == '!' || text[pos] == '?')) {
        ++pos;
      }
      close(terminal);
    } else if (c == '\n') {
      close(0);
    }
  }
  close(0);
  return out;
}

inline bool in_set(std::string_view word, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), word) != set.end();
}

}  // namespace detail

inline StyleVector extract_style_features(std::string_view text) {
  StyleVector v;
  const auto tokens = tokenize(text);
  if (tokens.empty()) {
    v.empty = true;
    return v;
  }
  const auto sentences = detail::split_sentences(text);
  const double n_tok = static_cast<double>(tokens.size());
  const double n_sent = static_cast<double>(std::max<std::size_t>(sentences.size(), 1));

  std::size_t commas = 0, periods = 0;
  for (char c : text) {
    commas += c == ',' ? 1 : 0;
    periods += c == '.' ? 1 : 0;
  }
  std::size_t terminal = 0, questions = 0, exclaims = 0, upper = 0, lower = 0;
  for (const auto& s : sentences) {
    terminal += s.terminal != 0 ? 1 : 0;
    questions += s.terminal == '?' ? 1 : 0;
    exclaims += s.terminal == '!' ? 1 : 0;
    upper += s.start == detail::LetterCase::kUpper ? 1 : 0;
    lower += s.start == detail::LetterCase::kLower ? 1 : 0;
  }

  std::size_t articles = 0, first = 0, second = 0, digits = 0, length = 0, contractions = 0,
              polite = 0;
  std::unordered_set<std::string> types;
  std::string prev;
  for (const auto& t : tokens) {
    const std::string w = fold_case(t.text);
    types.insert(w);
    length += t.length;
    if (detail::in_set(w, {"a", "an", "the"})) ++articles;
    if (detail::in_set(w, {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours",
                           "ourselves", "i'm", "i've", "i'd", "i'll"})) {
      ++first;
    }
    if (detail::in_set(w, {"you", "your", "yours", "yourself", "yourselves", "you're",
                           "you've", "you'll", "you'd", "u", "ur"})) {
      ++second;
    }
    if (std::any_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) ++digits;
    if (w.find('\'') != std::string::npos) ++contractions;
    if (detail::in_set(w, {"please", "pls", "plz", "thanks", "thank", "thx", "kindly"})) {
      ++polite;
    } else if (w == "you" && (prev == "could" || prev == "would")) {
      ++polite;
    }
    prev = w;
  }

  auto clip = [](double x) { return std::clamp(x, 0.0, 1.0); };
  auto& f = v.values;
  f[kSentenceCompleteness] = static_cast<double>(terminal) / n_sent;
  f[kCommaDensity] = clip(static_cast<double>(commas) / n_tok);
  f[kPeriodDensity] = clip(static_cast<double>(periods) / n_tok);
  f[kQuestionRate] = static_cast<double>(questions) / n_sent;
  f[kExclamationRate] = static_cast<double>(exclaims) / n_sent;
  f[kCapitalizedStartRate] = static_cast<double>(upper) / n_sent;
  f[kLowercaseStartRate] = static_cast<double>(lower) / n_sent;
  f[kArticleRate] = static_cast<double>(articles) / n_tok;
  f[kFirstPersonRate] = static_cast<double>(first) / n_tok;
  f[kSecondPersonRate] = static_cast<double>(second) / n_tok;
  f[kDigitTokenRate] = static_cast<double>(digits) / n_tok;
  f[kMeanTokenLength] = clip(static_cast<double>(length) / n_tok / 12.0);
  f[kTypeTokenRatio] = static_cast<double>(types.size()) / n_tok;
  f[kMeanSentenceLength] = clip(n_tok / n_sent / 40.0);
  f[kContractionRate] = static_cast<double>(contractions) / n_tok;
  f[kPolitenessRate] = clip(static_cast<double>(polite) / n_tok);
  return v;
}

// Mean feature vector over the non-empty queries; all-zero if none.
inline StyleVector mean_style(std::span<const StyleVector> queries) {
  StyleVector mean;
  std::size_t n = 0;
  for (const auto& q : queries) {
    if (q.empty) continue;
    for (std::size_t i = 0; i < kStyleDims; ++i) mean.values[i] += q.values[i];
    ++n;
  }
  if (n == 0) {
    mean.empty = true;
    return mean;
  }
  for (double& x : mean.values) x /= static_cast<double>(n);
  return mean;
}

// Indices of the q strongest strictly positive features, strongest first;
// equal activations keep feature order.
inline Document style_pseudo_document(const StyleVector& v, std::size_t q) {
  std::vector<std::size_t> idx(kStyleDims);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v.values[a] > v.values[b]; });
  Document doc;
  for (std::size_t i : idx) {
    if (doc.size() == q || v.values[i] <= 0.0) break;
    doc.push_back(i);
  }
  return doc;
}

struct StyleTopicConfig {
  std::size_t topics = 6;
  std::size_t top_q = 6;
  int iterations = 1000;
  double alpha = 0.0;  // <= 0 selects 50 / topics
  double eta = 0.01;
  std::uint64_t seed = 7;
};

struct StyleTopics {
  TopicModel model;
  std::vector<std::vector<double>> user_mixtures;
  std::vector<bool> fallback;  // user had no query with a positive feature
};

// Trains one shared style-topic model over every query's pseudo-document and
// averages each user's query mixtures.
inline StyleTopics style_topic_mixture(std::span<const std::vector<StyleVector>> users,
                                       const StyleTopicConfig& cfg = {}) {
  std::vector<std::vector<Document>> docs(users.size());
  std::vector<Document> corpus;
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (users[u].empty()) throw Error(Errc::kNoQueries, "user " + std::to_string(u));
    for (const auto& q : users[u]) {
      Document d = style_pseudo_document(q, cfg.top_q);
      if (d.empty()) continue;
      corpus.push_back(d);
      docs[u].push_back(std::move(d));
    }
  }
  StyleTopics out;
  out.model = train_lda(corpus, kStyleDims,
                        {cfg.topics, cfg.alpha, cfg.eta, cfg.iterations, cfg.seed});
  out.user_mixtures.resize(users.size());
  out.fallback.assign(users.size(), false);
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (docs[u].empty()) {
      out.user_mixtures[u].assign(cfg.topics, 1.0 / static_cast<double>(cfg.topics));
      out.fallback[u] = true;
      continue;
    }
    out.user_mixtures[u] = user_topic_profile(out.model, docs[u]);
  }
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_STYLE_HPP_
