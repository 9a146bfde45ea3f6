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

#ifndef PREFRANK_TEXT_HPP_
#define PREFRANK_TEXT_HPP_

// Word segmentation and the topic-model vocabulary.
//
// Words are maximal runs of letters, digits and non-ASCII letter-like code
// points, with inner apostrophes kept ("don't"). Punctuation, symbols,
// whitespace and emoji separate words. Case is preserved; topic modeling
// folds it, style features do not.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace prefrank {

struct Token {
  std::string text;
  std::size_t length = 0;  // code points
};

namespace detail {

// Decodes one UTF-8 code point at `pos`; invalid bytes decode to U+FFFD and
// advance by one.
inline char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) -> int {
    if (pos + i >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + i]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i < len; ++i) {
    const int c = cont(static_cast<std::size_t>(i));
    if (c < 0) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  pos += static_cast<std::size_t>(len);
  return cp;
}

inline bool is_word_code_point(char32_t c) {
  if (c < 0x80) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  }
  if (c < 0xC0) return false;                      // Latin-1 punctuation and symbols
  if (c == 0xD7 || c == 0xF7) return false;        // multiplication, division
  if (c >= 0x2000 && c <= 0x2BFF) return false;    // punctuation, symbols, arrows
  if (c >= 0x3000 && c <= 0x303F) return false;    // CJK punctuation
  if (c >= 0xFE30 && c <= 0xFE4F) return false;    // CJK compatibility forms
  if (c >= 0xFF00 && c <= 0xFF0F) return false;    // fullwidth punctuation
  if (c >= 0x1F000) return false;                  // emoji and pictographs
  if (c == 0xFFFD || c == 0xFEFF) return false;
  return true;
}

inline bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  Token current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t c = detail::next_code_point(text, pos);
    if (detail::is_word_code_point(c)) {
      current.text.append(text.substr(start, pos - start));
      ++current.length;
      continue;
    }
    if (detail::is_apostrophe(c) && current.length > 0 && pos < text.size()) {
      std::size_t peek = pos;
      if (detail::is_word_code_point(detail::next_code_point(text, peek))) {
        current.text.append(text.substr(start, pos - start));
        ++current.length;
        continue;
      }
    }
    if (current.length > 0) {
      tokens.push_back(std::move(current));
      current = Token{};
    }
  }
  if (current.length > 0) tokens.push_back(std::move(current));
  return tokens;
}

// Lowercases ASCII and Latin-1 capitals; other code points pass through.
inline std::string fold_case(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  std::size_t pos = 0;
  while (pos < word.size()) {
    const std::size_t start = pos;
    const char32_t c = detail::next_code_point(word, pos);
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c + 32));
    } else if (c >= 0xC0 && c <= 0xDE && c != 0xD7) {
      const char32_t lower = c + 0x20;
      out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
      out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
    } else if (c == 0x2019) {
      out.push_back('\'');
    } else {
      out.append(word.substr(start, pos - start));
    }
  }
  return out;
}

inline std::vector<std::string> topic_terms(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(fold_case(t.text));
  return out;
}

inline const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
      "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
      "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing",
      "down", "during", "each", "few", "for", "from", "further", "had", "has", "have",
      "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how",
      "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me", "more", "most",
      "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or",
      "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should",
      "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
      "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
      "too", "under", "until", "up", "very", "was", "we", "were", "what", "when",
      "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you",
      "your", "yours", "yourself", "yourselves", "i'm", "it's", "don't", "can't"};
  return words;
}

struct VocabularyConfig {
  std::size_t min_df = 2;
  bool drop_stopwords = true;
};

// Topic vocabulary: case-folded terms with document frequency >= min_df.
// Ids are dense and follow first appearance in the corpus.
class Vocabulary {
 public:
  static Vocabulary build(std::span<const std::vector<std::string>> docs,
                          const VocabularyConfig& cfg = {}) {
    std::unordered_map<std::string, std::size_t> df;
    std::vector<std::string> order;
    for (const auto& doc : docs) {
      std::unordered_set<std::string_view> seen;
      for (const auto& term : doc) {
        if (!seen.insert(term).second) continue;
        auto [it, inserted] = df.try_emplace(term, 0);
        if (inserted) order.push_back(term);
        ++it->second;
      }
    }
    Vocabulary vocab;
    for (const auto& term : order) {
      if (df[term] < cfg.min_df) continue;
      if (cfg.drop_stopwords && english_stopwords().contains(term)) continue;
      vocab.ids_.emplace(term, vocab.terms_.size());
      vocab.terms_.push_back(term);
      vocab.df_.push_back(df[term]);
    }
    return vocab;
  }

  std::size_t size() const { return terms_.size(); }
  const std::string& term(std::size_t id) const { return terms_[id]; }
  std::size_t document_frequency(std::size_t id) const { return df_[id]; }

  std::optional<std::size_t> find(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  // In-vocabulary ids of a term list, in order.
  std::vector<std::size_t> encode(std::span<const std::string> terms) const {
    std::vector<std::size_t> ids;
    for (const auto& t : terms) {
      if (auto id = find(t)) ids.push_back(*id);
    }
    return ids;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::size_t> ids_;
};

}  // namespace prefrank

#endif  // PREFRANK_TEXT_HPP_
