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

#ifndef PREFRANK_CONFIG_HPP_
#define PREFRANK_CONFIG_HPP_

// Run configuration and its flat "key = value" file format.
//
// One setting per line; '#' starts a comment line; blank lines are ignored.
// Unknown keys are an error. Lists are comma separated without spaces.
//
//   input = battles.jsonl
//   adapter = canonical          # or arena
//   elo.hidden = 512,512,256,128,64,32
//   bt.loss = mse                # or huber

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "prefrank/bradley_terry.hpp"
#include "prefrank/elo.hpp"
#include "prefrank/error.hpp"
#include "prefrank/profile.hpp"
#include "prefrank/regression.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

struct RunConfig {
  std::string input;
  std::string adapter = "canonical";  // canonical | arena
  std::string language;               // arena rows only; empty keeps all
  std::size_t min_battles = 25;
  EloConfig elo;
  BtConfig bt;
  std::size_t bootstrap = 10000;
  double confidence = 0.95;
  FeatureConfig features;  // seed is derived from the global seed
  std::size_t k_min = 2;
  std::size_t k_max = 8;
  std::size_t restarts = 10;
  RankPredictorConfig elo_predictor = elo_predictor_config();
  RankPredictorConfig bt_predictor = bt_predictor_config();
  std::uint64_t seed = 7;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::kInvalidArgument, "bad value '" + std::string(text) + "' for " +
                                            std::string(key));
  }
  return value;
}

inline std::vector<std::size_t> parse_widths(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_number<std::size_t>(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_widths(const std::vector<std::size_t>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return s;
}

struct ConfigField {
  std::string key;
  std::function<std::string()> get;
  std::function<void(std::string_view)> set;
};

template <class T>
ConfigField number_field(std::string key, T& ref) {
  return {key,
          [&ref] {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(ref);
            } else {
              return std::to_string(ref);
            }
          },
          [&ref, key](std::string_view v) { ref = parse_number<T>(key, v); }};
}

inline ConfigField string_field(std::string key, std::string& ref) {
  return {key, [&ref] { return ref; }, [&ref](std::string_view v) { ref = std::string(v); }};
}

inline void add_predictor_fields(std::vector<ConfigField>& f, const std::string& prefix,
                                 RankPredictorConfig& p) {
  MlpConfig& n = p.net;
  f.push_back({prefix + ".hidden", [&n] { return format_widths(n.hidden); },
               [&n, prefix](std::string_view v) { n.hidden = parse_widths(prefix + ".hidden", v); }});
  f.push_back({prefix + ".activation",
               [&n] {
                 switch (n.activation) {
                   case Activation::kSelu: return std::string("selu");
                   case Activation::kGelu: return std::string("gelu");
                   default: return std::string("identity");
                 }
               },
               [&n](std::string_view v) {
                 if (v == "selu") {
                   n.activation = Activation::kSelu;
                 } else if (v == "gelu") {
                   n.activation = Activation::kGelu;
                 } else if (v == "identity") {
                   n.activation = Activation::kIdentity;
                 } else {
                   throw Error(Errc::kInvalidArgument, "unknown activation '" + std::string(v) + "'");
                 }
               }});
  f.push_back({prefix + ".loss",
               [&n] { return std::string(n.loss == LossKind::kHuber ? "huber" : "mse"); },
               [&n](std::string_view v) {
                 if (v == "huber") {
                   n.loss = LossKind::kHuber;
                 } else if (v == "mse") {
                   n.loss = LossKind::kMse;
                 } else {
                   throw Error(Errc::kInvalidArgument, "unknown loss '" + std::string(v) + "'");
                 }
               }});
  f.push_back(number_field(prefix + ".huber_delta", n.huber_delta));
  f.push_back(number_field(prefix + ".dropout", n.dropout));
  f.push_back(number_field(prefix + ".learning_rate", n.learning_rate));
  f.push_back(number_field(prefix + ".weight_decay", n.weight_decay));
  f.push_back(number_field(prefix + ".batch_size", n.batch_size));
  f.push_back(number_field(prefix + ".max_epochs", n.max_epochs));
  f.push_back(number_field(prefix + ".patience", n.patience));
  f.push_back(number_field(prefix + ".ensemble", p.ensemble_size));
}

inline std::vector<ConfigField> config_fields(RunConfig& c) {
  std::vector<ConfigField> f;
  f.push_back(string_field("input", c.input));
  f.push_back(string_field("adapter", c.adapter));
  f.push_back(string_field("language", c.language));
  f.push_back(number_field("min_battles", c.min_battles));
  f.push_back(number_field("seed", c.seed));
  f.push_back(number_field("elo.k_factor", c.elo.k_factor));
  f.push_back(number_field("elo.initial_rating", c.elo.initial_rating));
  f.push_back(number_field("bt.l2_penalty", c.bt.l2_penalty));
  f.push_back(number_field("bt.max_iterations", c.bt.max_iterations));
  f.push_back(number_field("bt.tolerance", c.bt.tolerance));
  f.push_back(number_field("bt.scale", c.bt.scale));
  f.push_back(number_field("bt.anchor", c.bt.anchor));
  f.push_back(number_field("bootstrap", c.bootstrap));
  f.push_back(number_field("confidence", c.confidence));
  f.push_back(number_field("topics", c.features.topics));
  f.push_back(number_field("style_topics", c.features.style_topics));
  f.push_back(number_field("style_top_q", c.features.style_top_q));
  f.push_back(number_field("topic_iterations", c.features.topic_iterations));
  f.push_back(number_field("style_iterations", c.features.style_iterations));
  f.push_back(number_field("min_df", c.features.vocabulary.min_df));
  f.push_back({"drop_stopwords",
               [&c] { return std::string(c.features.vocabulary.drop_stopwords ? "true" : "false"); },
               [&c](std::string_view v) {
                 if (v != "true" && v != "false") {
                   throw Error(Errc::kInvalidArgument, "drop_stopwords takes true or false");
                 }
                 c.features.vocabulary.drop_stopwords = v == "true";
               }});
  f.push_back(number_field("k_min", c.k_min));
  f.push_back(number_field("k_max", c.k_max));
  f.push_back(number_field("restarts", c.restarts));
  add_predictor_fields(f, "elo", c.elo_predictor);
  add_predictor_fields(f, "bt", c.bt_predictor);
  return f;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

// Every key, one per line, in a fixed order.
inline std::string config_to_text(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out;
  for (const auto& field : detail::config_fields(copy)) {
    out += field.key + " = " + field.get() + "\n";
  }
  return out;
}

// Applies the settings in `in` on top of `cfg`.
inline void apply_config_text(std::istream& in, RunConfig& cfg) {
  auto fields = detail::config_fields(cfg);
  std::map<std::string, detail::ConfigField*, std::less<>> by_key;
  for (auto& f : fields) by_key[f.key] = &f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::kMalformedLine, "expected key = value", line_no);
    }
    const std::string_view key = detail::trim(view.substr(0, eq));
    std::string_view value = view.substr(eq + 1);
    if (const auto hash = value.find(" #"); hash != std::string_view::npos) {
      value = value.substr(0, hash);
    }
    value = detail::trim(value);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw Error(Errc::kMalformedLine, "unknown key '" + std::string(key) + "'", line_no);
    }
    it->second->set(value);
  }
}

inline RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  apply_config_text(in, cfg);
  return cfg;
}

inline std::string config_hash(const RunConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(config_to_text(cfg))));
  return buf;
}

// Seed of every randomized stage; each depends only on the global seed and
// the stage name.
inline constexpr std::array<std::string_view, 8> kSeededStages = {
    "features", "cluster",   "bootstrap-elo", "bootstrap-bt",
    "split-elo", "train-elo", "split-bt",      "train-bt"};

inline std::map<std::string, std::uint64_t> stage_seeds(std::uint64_t seed) {
  std::map<std::string, std::uint64_t> out;
  for (auto stage : kSeededStages) out[std::string(stage)] = derive_seed(seed, stage);
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_CONFIG_HPP_
