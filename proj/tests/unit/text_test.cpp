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

#include "prefrank/text.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace prefrank {
namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

TEST(Tokenize, SplitsOnPunctuationAndSpace) {
  EXPECT_EQ(texts(tokenize("Hello, world!  How are you?")),
            (std::vector<std::string>{"Hello", "world", "How", "are", "you"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" ,.;!? ").empty());
}

TEST(Tokenize, KeepsInnerApostrophes) {
  EXPECT_EQ(texts(tokenize("don't 'quote' it's")),
            (std::vector<std::string>{"don't", "quote", "it's"}));
  // Curly apostrophe is part of the word too.
  const auto t = tokenize("can’t");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].length, 5u);
}

TEST(Tokenize, DigitsAndNonLatinLetters) {
  EXPECT_EQ(texts(tokenize("gpt4 vs 3.5")), (std::vector<std::string>{"gpt4", "vs", "3", "5"}));
  const auto t = tokenize("naïve café — 東京");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].length, 5u);
  EXPECT_EQ(t[2].text, "東京");
  EXPECT_EQ(t[2].length, 2u);
  // Emoji are separators.
  EXPECT_EQ(tokenize("hi\U0001F600there").size(), 2u);
}

TEST(Tokenize, InvalidUtf8DoesNotThrow) {
  const std::string bad = std::string("ab") + char(0xC3) + "cd" + char(0xFF);
  EXPECT_NO_THROW(tokenize(bad));
}

TEST(FoldCase, AsciiAndLatin1) {
  EXPECT_EQ(fold_case("HeLLo"), "hello");
  EXPECT_EQ(fold_case("ÉCOLE"), "école");
  EXPECT_EQ(fold_case("it’s"), "it's");
  EXPECT_EQ(fold_case("東京"), "東京");
}

TEST(TopicTerms, FoldsEveryToken) {
  EXPECT_EQ(topic_terms("The Cat SAT."), (std::vector<std::string>{"the", "cat", "sat"}));
}

TEST(Vocabulary, MinDfAndStopwords) {
  const std::vector<std::vector<std::string>> docs{
      {"the", "cat", "sat", "cat"}, {"the", "cat", "ran"}, {"dog", "ran", "the"}};
  const auto v = Vocabulary::build(docs);
  // "the" is frequent but a stopword; "sat" and "dog" appear once.
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.term(0), "cat");
  EXPECT_EQ(v.term(1), "ran");
  EXPECT_EQ(v.document_frequency(0), 2u);
  EXPECT_FALSE(v.find("the"));
  const std::vector<std::string> q{"ran", "zebra", "cat", "cat"};
  EXPECT_EQ(v.encode(q), (std::vector<std::size_t>{1, 0, 0}));

  const auto all = Vocabulary::build(docs, {.min_df = 1, .drop_stopwords = false});
  EXPECT_EQ(all.size(), 5u);
  EXPECT_EQ(all.term(0), "the");
  EXPECT_EQ(all.document_frequency(0), 3u);
}

}  // namespace
}  // namespace prefrank
