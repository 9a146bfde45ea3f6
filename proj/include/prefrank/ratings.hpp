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

#ifndef PREFRANK_RATINGS_HPP_
#define PREFRANK_RATINGS_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prefrank/battle.hpp"
#include "prefrank/error.hpp"

namespace prefrank {

enum class RatingSystem { kElo, kBradleyTerry };

inline std::string_view system_label(RatingSystem s) {
  return s == RatingSystem::kElo ? "elo" : "bt";
}

inline RatingSystem parse_system_label(std::string_view label) {
  if (label == "elo") return RatingSystem::kElo;
  if (label == "bt") return RatingSystem::kBradleyTerry;
  throw Error(Errc::kInvalidArgument, "unknown rating system '" + std::string(label) + "'");
}

// Whose battles are rated: every battle in the log, or one user's.
struct Subject {
  std::optional<std::string> user;

  static Subject global() { return {}; }
  static Subject of_user(std::string id) { return {std::move(id)}; }
  bool is_global() const { return !user.has_value(); }
  std::string label() const { return user.value_or("global"); }
};

// Scores for every model of a log, indexed by ModelId. Unobserved ELO entries
// keep the initial rating; unobserved Bradley-Terry entries are NaN.
struct RatingVector {
  RatingSystem system = RatingSystem::kElo;
  std::vector<double> scores;
  std::vector<bool> observed;

  std::size_t size() const { return scores.size(); }
  std::size_t observed_count() const {
    std::size_t n = 0;
    for (bool b : observed) n += b ? 1 : 0;
    return n;
  }
  bool defined(std::size_t m) const { return !std::isnan(scores[m]); }
};

struct RestrictedScores {
  std::vector<ModelId> models;
  std::vector<double> personal;
  std::vector<double> global;
  std::size_t excluded_undefined = 0;
};

// Scores of the models the subject actually battled, in model-id order.
// Entries undefined in either vector are dropped and counted. Fewer than
// three remaining models leave a rank correlation meaningless.
inline RestrictedScores restrict_to_observed(const RatingVector& personal,
                                             const RatingVector& global) {
  if (personal.size() != global.size()) {
    throw Error(Errc::kLengthMismatch, "rating vectors cover different model sets");
  }
  RestrictedScores out;
  for (std::size_t m = 0; m < personal.size(); ++m) {
    if (!personal.observed[m]) continue;
    if (!personal.defined(m) || !global.defined(m)) {
      ++out.excluded_undefined;
      continue;
    }
    out.models.push_back(static_cast<ModelId>(m));
    out.personal.push_back(personal.scores[m]);
    out.global.push_back(global.scores[m]);
  }
  if (out.models.size() < 3) {
    throw Error(Errc::kTooFewModels,
                std::to_string(out.models.size()) + " observed models");
  }
  return out;
}

namespace detail {

// Indices of the records the subject rated, in source order.
inline std::vector<std::size_t> subject_records(const BattleLog& log,
                                                const Subject& subject) {
  std::vector<std::size_t> idx;
  if (subject.is_global()) {
    idx.resize(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) idx[i] = i;
    return idx;
  }
  const UserId user = log.require_user(*subject.user);
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log.key(i).user == user) idx.push_back(i);
  }
  return idx;
}

}  // namespace detail

}  // namespace prefrank

#endif  // PREFRANK_RATINGS_HPP_
