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

#ifndef PREFRANK_TESTS_PLANTED_HPP_
#define PREFRANK_TESTS_PLANTED_HPP_

#include <string>
#include <vector>

#include "prefrank/profile.hpp"
#include "prefrank/ratings.hpp"
#include "prefrank/regression.hpp"
#include "prefrank/rng.hpp"

namespace prefrank::testing {

struct Population {
  std::vector<UserProfile> profiles;
  std::vector<RatingVector> ratings;
  std::vector<std::string> models;
  std::vector<std::size_t> counts;
};

// Ratings are a fixed linear map of the profile features plus noise.
inline Population planted(std::size_t users, std::size_t models, double noise, std::uint64_t seed) {
  Rng rng(seed);
  Population p;
  const std::size_t topics = 4, dims = topics + kStyleDims;
  std::vector<double> w(models * dims);
  Rng wrng(1234);
  for (double& v : w) v = wrng.normal();
  for (std::size_t m = 0; m < models; ++m) {
    p.models.push_back("m" + std::to_string(m));
    p.counts.push_back(1000 - m);
  }
  for (std::size_t u = 0; u < users; ++u) {
    UserProfile prof;
    prof.user_id = "u" + std::to_string(u);
    double total = 0;
    for (std::size_t k = 0; k < topics; ++k) {
      prof.topic.push_back(rng.uniform());
      total += prof.topic.back();
    }
    for (double& t : prof.topic) t /= total;
    for (double& s : prof.style.values) s = rng.uniform();
    const auto x = prof.regression_input();
    RatingVector r;
    for (std::size_t m = 0; m < models; ++m) {
      double y = noise * rng.normal();
      for (std::size_t j = 0; j < dims; ++j) y += w[m * dims + j] * x[j];
      r.scores.push_back(y);
      r.observed.push_back(true);
    }
    p.profiles.push_back(std::move(prof));
    p.ratings.push_back(std::move(r));
  }
  return p;
}

inline RegressionDataset build(const Population& p, std::uint64_t seed) {
  return build_dataset(p.profiles, p.ratings, p.models, p.counts, RatingSystem::kElo, seed);
}

inline RankPredictorConfig small_config() {
  RankPredictorConfig c;
  c.net.hidden = {16};
  c.net.activation = Activation::kSelu;
  c.net.loss = LossKind::kHuber;
  c.net.learning_rate = 0.01;
  c.net.max_epochs = 200;
  c.net.patience = 15;
  return c;
}

}  // namespace prefrank::testing

#endif  // PREFRANK_TESTS_PLANTED_HPP_
