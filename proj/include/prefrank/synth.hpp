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

#ifndef PREFRANK_SYNTH_HPP_
#define PREFRANK_SYNTH_HPP_

// Synthetic user populations with known Bradley-Terry ground truth, and a
// grid-search maximum-likelihood oracle for logs over at most three models.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "prefrank/battle.hpp"
#include "prefrank/error.hpp"
#include "prefrank/matrix.hpp"
#include "prefrank/ratings.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

inline constexpr std::size_t kSynthTopics = 4;

struct SynthConfig {
  std::size_t models = 8;
  std::size_t users = 50;
  std::size_t battles_per_user = 200;
  double heterogeneity = 1.5;
  std::uint64_t seed = 7;
  // kSynthTopics topical affinities followed by one formality coordinate.
  std::size_t feature_dims = kSynthTopics + 1;
  bool round_robin = false;
  double tie_rate = 0.0;
  // User offsets orthogonal to the global strengths, in antithetic pairs, so
  // the population shows no shared direction beyond the global one.
  bool orthogonal_features = false;
};

struct ScheduledBattle {
  std::size_t user = 0;
  std::size_t model_a = 0;
  std::size_t model_b = 0;
};

struct SyntheticPopulation {
  SynthConfig config;
  std::vector<double> global_log_strength;  // models
  Matrix coupling;                          // models x feature_dims
  Matrix features;                          // users x feature_dims
  Matrix user_log_strength;                 // users x models
  std::vector<ScheduledBattle> schedule;

  std::string model_name(std::size_t m) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "model-%02zu", m);
    return buf;
  }
  std::string user_name(std::size_t u) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "user-%03zu", u);
    return buf;
  }
};

inline SyntheticPopulation generate_population(const SynthConfig& cfg) {
  if (cfg.models < 2 || cfg.users < 1 || cfg.battles_per_user < 1 || cfg.heterogeneity < 0.0 ||
      cfg.feature_dims < 1 || cfg.tie_rate < 0.0 || cfg.tie_rate > 1.0) {
    throw Error(Errc::kInvalidShape, "invalid synthetic population parameters");
  }
  SyntheticPopulation pop;
  pop.config = cfg;
  const std::size_t M = cfg.models, U = cfg.users, F = cfg.feature_dims;
  Rng rng(derive_seed(cfg.seed, "population"));
  pop.global_log_strength.resize(M);
  for (double& g : pop.global_log_strength) g = rng.normal();
  pop.coupling = Matrix(M, F);
  const double c_scale = 1.0 / std::sqrt(static_cast<double>(F));
  for (double& c : pop.coupling.data()) c = c_scale * rng.normal();
  pop.features = Matrix(U, F);
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t f = 0; f < F; ++f) {
      pop.features(u, f) = (cfg.orthogonal_features && u % 2 == 1) ? -pop.features(u - 1, f)
                                                                    : rng.normal();
    }
  }

  // Unit vectors spanning {1, g} for the orthogonal projection.
  std::vector<double> e1(M, 1.0 / std::sqrt(static_cast<double>(M)));
  std::vector<double> e2 = pop.global_log_strength;
  {
    double dot = 0.0, norm = 0.0;
    for (std::size_t m = 0; m < M; ++m) dot += e2[m] * e1[m];
    for (std::size_t m = 0; m < M; ++m) {
      e2[m] -= dot * e1[m];
      norm += e2[m] * e2[m];
    }
    norm = std::sqrt(norm);
    for (double& v : e2) v = norm > 0.0 ? v / norm : 0.0;
  }

  pop.user_log_strength = Matrix(U, M);
  std::vector<double> offset(M);
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t m = 0; m < M; ++m) {
      double s = 0.0;
      for (std::size_t f = 0; f < F; ++f) s += pop.coupling(m, f) * pop.features(u, f);
      offset[m] = s;
    }
    if (cfg.orthogonal_features) {
      for (const auto* basis : {&e1, &e2}) {
        double dot = 0.0;
        for (std::size_t m = 0; m < M; ++m) dot += offset[m] * (*basis)[m];
        for (std::size_t m = 0; m < M; ++m) offset[m] -= dot * (*basis)[m];
      }
    }
    for (std::size_t m = 0; m < M; ++m) {
      pop.user_log_strength(u, m) = pop.global_log_strength[m] + cfg.heterogeneity * offset[m];
    }
  }

  Rng sched(derive_seed(cfg.seed, "schedule"));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = a + 1; b < M; ++b) pairs.emplace_back(a, b);
  }
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t i = 0; i < cfg.battles_per_user; ++i) {
      std::size_t a, b;
      if (cfg.round_robin) {
        std::tie(a, b) = pairs[i % pairs.size()];
      } else {
        a = sched.below(M);
        b = sched.below(M - 1);
        if (b >= a) ++b;
      }
      if (sched.bernoulli(0.5)) std::swap(a, b);
      pop.schedule.push_back({u, a, b});
    }
  }
  return pop;
}

namespace detail {

inline constexpr std::array<const char*, kSynthTopics> kTopicStems = {"astro", "bota", "chemi",
                                                                       "dramu"};
inline constexpr std::array<const char*, 12> kTopicEndings = {
    "lan", "mor", "tex", "vin", "dal", "pim", "sor", "kel", "nup", "rab", "tiv", "zen"};
inline constexpr std::array<const char*, 10> kFillers = {
    "explain", "write", "tell", "story", "help", "make", "give", "list", "show", "idea"};

inline std::string synth_prompt(std::span<const double> features, Rng& rng) {
  std::array<double, kSynthTopics> affinity{};
  double total = 0.0;
  for (std::size_t t = 0; t < kSynthTopics; ++t) {
    affinity[t] = std::exp(1.5 * (t < features.size() ? features[t] : 0.0));
    total += affinity[t];
  }
  const std::size_t topic =
      rng.categorical(std::vector<double>(affinity.begin(), affinity.end()), total);
  const double formality = features.size() > kSynthTopics ? features[kSynthTopics] : 0.0;
  const bool formal = rng.bernoulli(1.0 / (1.0 + std::exp(-2.0 * formality)));
  const std::size_t words = 6 + rng.below(8);
  std::string text;
  for (std::size_t i = 0; i < words; ++i) {
    std::string w;
    if (rng.bernoulli(0.7)) {
      w = std::string(kTopicStems[topic]) + kTopicEndings[rng.below(kTopicEndings.size())];
      if (formal && rng.bernoulli(0.4)) w = "the " + w;
    } else {
      w = kFillers[rng.below(kFillers.size())];
    }
    if (!text.empty()) text += (formal && i % 5 == 4) ? ", " : " ";
    text += w;
  }
  if (formal) {
    text[0] = static_cast<char>(text[0] - 'a' + 'A');
    text += rng.bernoulli(0.5) ? "." : "?";
  }
  return text;
}

}  // namespace detail

// Outcomes follow each user's ground-truth Bradley-Terry probabilities; a
// tie is drawn first with probability tie_rate. Prompts are sampled from the
// user's topical affinities and formality.
inline BattleLog sample_battles(const SyntheticPopulation& pop,
                                std::span<const ScheduledBattle> schedule) {
  std::vector<std::string> names;
  for (std::size_t m = 0; m < pop.config.models; ++m) names.push_back(pop.model_name(m));
  BattleLog log = BattleLog::with_models(names);
  Rng outcomes(derive_seed(pop.config.seed, "outcomes"));
  std::vector<Rng> prompt_rngs;
  for (std::size_t u = 0; u < pop.config.users; ++u) {
    prompt_rngs.emplace_back(mix_seed(derive_seed(pop.config.seed, "prompts"), u));
  }
  for (const auto& s : schedule) {
    const double xa = pop.user_log_strength(s.user, s.model_a);
    const double xb = pop.user_log_strength(s.user, s.model_b);
    const double p_a = 1.0 / (1.0 + std::exp(xb - xa));
    BattleRecord r;
    r.user_id = pop.user_name(s.user);
    r.model_a = names[s.model_a];
    r.model_b = names[s.model_b];
    if (pop.config.tie_rate > 0.0 && outcomes.bernoulli(pop.config.tie_rate)) {
      r.outcome = Outcome::kTie;
    } else {
      r.outcome = outcomes.uniform() < p_a ? Outcome::kAWins : Outcome::kBWins;
    }
    r.prompt = detail::synth_prompt(pop.features.row(s.user), prompt_rngs[s.user]);
    r.sequence_index = log.size();
    log.add(std::move(r));
  }
  return log;
}

inline BattleLog sample_battles(const SyntheticPopulation& pop) {
  return sample_battles(pop, pop.schedule);
}

inline nlohmann::ordered_json population_truth_json(const SyntheticPopulation& pop) {
  nlohmann::ordered_json j;
  j["seed"] = pop.config.seed;
  j["models"] = pop.config.models;
  j["users"] = pop.config.users;
  j["battles_per_user"] = pop.config.battles_per_user;
  j["heterogeneity"] = pop.config.heterogeneity;
  j["tie_rate"] = pop.config.tie_rate;
  std::vector<std::string> names;
  for (std::size_t m = 0; m < pop.config.models; ++m) names.push_back(pop.model_name(m));
  j["model_names"] = names;
  j["global_log_strength"] = pop.global_log_strength;
  auto rows = [](const Matrix& m) {
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
    return out;
  };
  j["coupling"] = rows(pop.coupling);
  nlohmann::ordered_json users = nlohmann::ordered_json::array();
  for (std::size_t u = 0; u < pop.config.users; ++u) {
    nlohmann::ordered_json ju;
    ju["user_id"] = pop.user_name(u);
    ju["features"] = std::vector<double>(pop.features.row(u).begin(), pop.features.row(u).end());
    ju["log_strength"] = std::vector<double>(pop.user_log_strength.row(u).begin(),
                                             pop.user_log_strength.row(u).end());
    users.push_back(std::move(ju));
  }
  j["users"] = std::move(users);
  return j;
}

struct BruteForceFit {
  std::vector<double> log_strength;  // by ModelId, NaN if unobserved
  double objective = 0.0;
};

// Grid-search maximizer of the penalized Bradley-Terry log-likelihood over
// mean-zero log-strengths on [-5, 5] with step 1e-3. Two models are scanned
// exhaustively. For three models the full range is scanned at step 0.05, then
// exhaustively at step 1e-3 in a window around the best coarse point,
// re-centred until the maximum is interior (the objective is concave).
inline BruteForceFit brute_force_bt(const BattleLog& log, const Subject& subject,
                                    double l2_penalty) {
  std::vector<std::size_t> observed;
  std::vector<std::array<double, 3>> wins(3, {0.0, 0.0, 0.0});
  auto slot = [&](std::size_t model) -> std::size_t {
    auto it = std::find(observed.begin(), observed.end(), model);
    if (it != observed.end()) return static_cast<std::size_t>(it - observed.begin());
    if (observed.size() == 3) throw Error(Errc::kTooManyModels, "grid oracle handles <= 3 models");
    observed.push_back(model);
    return observed.size() - 1;
  };
  std::optional<UserId> user;
  if (!subject.is_global()) user = log.require_user(*subject.user);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log.record(i);
    if (user && log.key(i).user != *user) continue;
    const std::size_t a = slot(index_of(*log.find_model(r.model_a)));
    const std::size_t b = slot(index_of(*log.find_model(r.model_b)));
    if (r.outcome == Outcome::kAWins) {
      wins[a][b] += 1.0;
    } else if (r.outcome == Outcome::kBWins) {
      wins[b][a] += 1.0;
    } else {
      wins[a][b] += 0.5;
      wins[b][a] += 0.5;
    }
  }
  const std::size_t n = observed.size();
  if (n < 2) throw Error(Errc::kTooFewModels, "grid oracle needs two models");

  auto objective = [&](const std::array<double, 3>& xi) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f -= 0.5 * l2_penalty * xi[i] * xi[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (wins[i][j] > 0.0) f -= wins[i][j] * std::log1p(std::exp(xi[j] - xi[i]));
      }
    }
    return f;
  };

  constexpr long kHalfRange = 5000;  // grid units of 1e-3
  constexpr double kStep = 1e-3;
  std::array<double, 3> best{0.0, 0.0, 0.0};
  double best_f = -std::numeric_limits<double>::infinity();
  if (n == 2) {
    for (long a = -kHalfRange; a <= kHalfRange; ++a) {
      const std::array<double, 3> xi{a * kStep, -a * kStep, 0.0};
      const double f = objective(xi);
      if (f > best_f) {
        best_f = f;
        best = xi;
      }
    }
  } else {
    auto in_range = [&](long a, long b) { return std::abs(a + b) <= kHalfRange; };
    long ca = 0, cb = 0;
    for (long a = -kHalfRange; a <= kHalfRange; a += 50) {
      for (long b = -kHalfRange; b <= kHalfRange; b += 50) {
        if (!in_range(a, b)) continue;
        const double f = objective({a * kStep, b * kStep, -(a + b) * kStep});
        if (f > best_f) {
          best_f = f;
          ca = a;
          cb = b;
        }
      }
    }
    constexpr long kWindow = 100;
    for (int round = 0; round < 200; ++round) {
      long ba = ca, bb = cb;
      best_f = -std::numeric_limits<double>::infinity();
      for (long a = std::max(-kHalfRange, ca - kWindow); a <= std::min(kHalfRange, ca + kWindow); ++a) {
        for (long b = std::max(-kHalfRange, cb - kWindow); b <= std::min(kHalfRange, cb + kWindow);
             ++b) {
          if (!in_range(a, b)) continue;
          const double f = objective({a * kStep, b * kStep, -(a + b) * kStep});
          if (f > best_f) {
            best_f = f;
            ba = a;
            bb = b;
          }
        }
      }
      const bool edge = (std::abs(ba - ca) == kWindow && std::abs(ba) != kHalfRange) ||
                        (std::abs(bb - cb) == kWindow && std::abs(bb) != kHalfRange);
      ca = ba;
      cb = bb;
      if (!edge) break;
    }
    best = {ca * kStep, cb * kStep, -(ca + cb) * kStep};
  }
  BruteForceFit out;
  out.objective = best_f;
  out.log_strength.assign(log.model_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) out.log_strength[observed[i]] = best[i];
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_SYNTH_HPP_
