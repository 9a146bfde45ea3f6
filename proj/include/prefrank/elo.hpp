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

#ifndef PREFRANK_ELO_HPP_
#define PREFRANK_ELO_HPP_

#include <cmath>
#include <utility>

#include "prefrank/battle.hpp"
#include "prefrank/error.hpp"
#include "prefrank/ratings.hpp"

namespace prefrank {

struct EloConfig {
  double k_factor = 32.0;
  double initial_rating = 1000.0;
};

// Expected score of a against b on the 400-point logistic scale.
inline double elo_expected_score(double rating_a, double rating_b) {
  if (!std::isfinite(rating_a) || !std::isfinite(rating_b)) {
    throw Error(Errc::kNonFiniteRating, "elo_expected_score");
  }
  return 1.0 / (1.0 + std::pow(10.0, (rating_b - rating_a) / 400.0));
}

// One rating update. Ties score 0.5 for both sides. The loser's change is
// the exact negation of the winner's, so the pair's rating sum is conserved.
inline std::pair<double, double> elo_update(std::pair<double, double> ratings,
                                            Outcome outcome, const EloConfig& cfg) {
  if (cfg.k_factor <= 0.0) throw Error(Errc::kInvalidArgument, "k_factor must be > 0");
  const double expected_a = elo_expected_score(ratings.first, ratings.second);
  double score_a = 0.5;
  switch (collapse_both_bad(outcome)) {
    case Outcome::kAWins: score_a = 1.0; break;
    case Outcome::kBWins: score_a = 0.0; break;
    default: break;
  }
  const double delta = cfg.k_factor * (score_a - expected_a);
  return {ratings.first + delta, ratings.second - delta};
}

// Sequential replay of the subject's battles in source order.
inline RatingVector compute_elo_table(const BattleLog& log, const Subject& subject,
                                      const EloConfig& cfg = {}) {
  RatingVector out;
  out.system = RatingSystem::kElo;
  out.scores.assign(log.model_count(), cfg.initial_rating);
  out.observed.assign(log.model_count(), false);
  for (std::size_t i : detail::subject_records(log, subject)) {
    const auto& key = log.key(i);
    const std::size_t a = index_of(key.model_a);
    const std::size_t b = index_of(key.model_b);
    auto [ra, rb] = elo_update({out.scores[a], out.scores[b]}, key.outcome, cfg);
    out.scores[a] = ra;
    out.scores[b] = rb;
    out.observed[a] = true;
    out.observed[b] = true;
  }
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_ELO_HPP_
