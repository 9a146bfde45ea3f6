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

#ifndef PREFRANK_BATTLE_HPP_
#define PREFRANK_BATTLE_HPP_

// Pairwise battle logs: the canonical line format, the Chatbot Arena
// conversations adapter, active-user filtering and per-user query corpora.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "prefrank/error.hpp"

namespace prefrank {

enum class Outcome : std::uint8_t { kAWins, kBWins, kTie, kBothBad };

inline std::string_view outcome_label(Outcome o) {
  switch (o) {
    case Outcome::kAWins: return "a_wins";
    case Outcome::kBWins: return "b_wins";
    case Outcome::kTie: return "tie";
    case Outcome::kBothBad: return "both_bad";
  }
  return "tie";
}

inline std::optional<Outcome> parse_outcome_label(std::string_view label) {
  if (label == "a_wins") return Outcome::kAWins;
  if (label == "b_wins") return Outcome::kBWins;
  if (label == "tie") return Outcome::kTie;
  if (label == "both_bad") return Outcome::kBothBad;
  return std::nullopt;
}

// Rating engines have no use for "both bad"; it carries no preference
// between the two models.
constexpr Outcome collapse_both_bad(Outcome o) {
  return o == Outcome::kBothBad ? Outcome::kTie : o;
}

struct BattleRecord {
  std::string user_id;
  std::string model_a;
  std::string model_b;
  Outcome outcome = Outcome::kTie;
  std::string prompt;
  std::uint64_t sequence_index = 0;
  bool text_missing = false;

  bool operator==(const BattleRecord&) const = default;
};

enum class ModelId : std::uint32_t {};
enum class UserId : std::uint32_t {};

constexpr std::size_t index_of(ModelId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t index_of(UserId id) { return static_cast<std::size_t>(id); }

// Resolved integer ids of one record.
struct BattleKey {
  UserId user;
  ModelId model_a;
  ModelId model_b;
  Outcome outcome;
};

// Ordered battle log. Model and user ids are dense and assigned in order of
// first appearance; record order is source order (ELO replay depends on it).
class BattleLog {
 public:
  BattleLog() = default;

  // A log whose model universe starts with `models` in that id order.
  static BattleLog with_models(std::span<const std::string> models) {
    BattleLog log;
    for (const auto& m : models) log.intern_model(m);
    return log;
  }

  void add(BattleRecord record) {
    if (record.model_a == record.model_b) {
      throw Error(Errc::kDuplicateSameModels, record.model_a);
    }
    record.text_missing = record.prompt.empty();
    BattleKey key{intern_user(record.user_id), intern_model(record.model_a),
                  intern_model(record.model_b), record.outcome};
    keys_.push_back(key);
    records_.push_back(std::move(record));
  }

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::span<const BattleRecord> records() const noexcept { return records_; }
  std::span<const BattleKey> keys() const noexcept { return keys_; }
  const BattleRecord& record(std::size_t i) const { return records_[i]; }
  const BattleKey& key(std::size_t i) const { return keys_[i]; }

  std::span<const std::string> models() const noexcept { return models_; }
  std::span<const std::string> users() const noexcept { return users_; }
  std::size_t model_count() const noexcept { return models_.size(); }
  std::size_t user_count() const noexcept { return users_.size(); }

  const std::string& model_name(ModelId id) const { return models_[index_of(id)]; }
  const std::string& user_name(UserId id) const { return users_[index_of(id)]; }

  std::optional<ModelId> find_model(std::string_view name) const {
    auto it = model_ids_.find(std::string(name));
    if (it == model_ids_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<UserId> find_user(std::string_view name) const {
    auto it = user_ids_.find(std::string(name));
    if (it == user_ids_.end()) return std::nullopt;
    return it->second;
  }
  UserId require_user(std::string_view name) const {
    auto id = find_user(name);
    if (!id) throw Error(Errc::kUnknownUser, std::string(name));
    return *id;
  }

  // Number of battles each model took part in.
  std::vector<std::size_t> model_battle_counts() const {
    std::vector<std::size_t> counts(models_.size(), 0);
    for (const auto& k : keys_) {
      ++counts[index_of(k.model_a)];
      ++counts[index_of(k.model_b)];
    }
    return counts;
  }

  bool operator==(const BattleLog& other) const {
    return records_ == other.records_ && models_ == other.models_ &&
           users_ == other.users_;
  }

 private:
  ModelId intern_model(const std::string& name) {
    auto [it, inserted] =
        model_ids_.try_emplace(name, static_cast<ModelId>(models_.size()));
    if (inserted) models_.push_back(name);
    return it->second;
  }
  UserId intern_user(const std::string& name) {
    auto [it, inserted] =
        user_ids_.try_emplace(name, static_cast<UserId>(users_.size()));
    if (inserted) users_.push_back(name);
    return it->second;
  }

  std::vector<BattleRecord> records_;
  std::vector<BattleKey> keys_;
  std::vector<std::string> models_;
  std::vector<std::string> users_;
  std::unordered_map<std::string, ModelId> model_ids_;
  std::unordered_map<std::string, UserId> user_ids_;
};

namespace detail {

inline bool skippable_line(std::string_view line) {
  std::size_t i = line.find_first_not_of(" \t\r");
  return i == std::string_view::npos || line[i] == '#';
}

inline std::string require_string(const nlohmann::json& obj, const char* field,
                                  std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw Error(Errc::kMalformedLine, std::string("missing field ") + field,
                line_no);
  }
  if (!it->is_string()) {
    throw Error(Errc::kMalformedLine, std::string(field) + " is not a string",
                line_no);
  }
  return it->get<std::string>();
}

}  // namespace detail

// Parses canonical battle lines:
//   {"user_id": ..., "model_a": ..., "model_b": ..., "outcome": ..., "prompt": ...}
// with outcome one of a_wins, b_wins, tie, both_bad. Blank lines and lines
// starting with '#' are skipped.
inline BattleLog parse_canonical(std::istream& in) {
  BattleLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skippable_line(line)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::kMalformedLine, e.what(), line_no);
    }
    if (!obj.is_object()) {
      throw Error(Errc::kMalformedLine, "record is not an object", line_no);
    }
    BattleRecord r;
    r.user_id = detail::require_string(obj, "user_id", line_no);
    r.model_a = detail::require_string(obj, "model_a", line_no);
    r.model_b = detail::require_string(obj, "model_b", line_no);
    const std::string label = detail::require_string(obj, "outcome", line_no);
    auto outcome = parse_outcome_label(label);
    if (!outcome) {
      throw Error(Errc::kMalformedLine, "unknown outcome '" + label + "'", line_no);
    }
    r.outcome = *outcome;
    if (obj.contains("prompt")) r.prompt = detail::require_string(obj, "prompt", line_no);
    r.sequence_index = log.size();
    if (r.model_a == r.model_b) {
      throw Error(Errc::kDuplicateSameModels, r.model_a, line_no);
    }
    log.add(std::move(r));
  }
  if (log.empty()) throw Error(Errc::kEmptyInput, "no battle records");
  return log;
}

inline void write_canonical_line(std::ostream& out, const BattleRecord& r) {
  nlohmann::ordered_json obj;
  obj["user_id"] = r.user_id;
  obj["model_a"] = r.model_a;
  obj["model_b"] = r.model_b;
  obj["outcome"] = outcome_label(r.outcome);
  obj["prompt"] = r.prompt;
  out << obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

inline void write_canonical(std::ostream& out, const BattleLog& log) {
  for (const auto& r : log.records()) write_canonical_line(out, r);
}

struct ArenaOptions {
  // Keep only rows whose "language" column equals this value.
  std::optional<std::string> language;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& row,
                                           const char* name) {
  auto it = row.find(name);
  if (it == row.end() || it->is_null()) throw Error(Errc::kMissingField, name);
  return *it;
}

inline std::string first_user_turn(const nlohmann::json& conversation) {
  if (conversation.is_array()) {
    for (const auto& turn : conversation) {
      if (turn.is_object() && turn.value("role", "") == "user") {
        auto content = turn.find("content");
        if (content != turn.end() && content->is_string()) {
          return content->get<std::string>();
        }
      }
    }
  }
  return {};
}

inline void adapt_arena_row(const nlohmann::json& row, const ArenaOptions& opts,
                            BattleLog& log) {
  if (!row.is_object()) throw Error(Errc::kMissingField, "judge");
  if (opts.language) {
    auto it = row.find("language");
    if (it == row.end() || !it->is_string() || it->get<std::string>() != *opts.language) {
      return;
    }
  }
  BattleRecord r;
  r.user_id = require_field(row, "judge").get<std::string>();
  r.model_a = require_field(row, "model_a").get<std::string>();
  r.model_b = require_field(row, "model_b").get<std::string>();
  const std::string winner = require_field(row, "winner").get<std::string>();
  if (winner == "model_a") {
    r.outcome = Outcome::kAWins;
  } else if (winner == "model_b") {
    r.outcome = Outcome::kBWins;
  } else if (winner == "tie") {
    r.outcome = Outcome::kTie;
  } else if (winner == "tie (bothbad)") {
    r.outcome = Outcome::kBothBad;
  } else {
    throw Error(Errc::kUnknownWinnerLabel, winner);
  }
  r.prompt = first_user_turn(require_field(row, "conversation_a"));
  r.sequence_index = log.size();
  log.add(std::move(r));
}

}  // namespace detail

// Reads the public Chatbot Arena conversations rows, either as JSON lines or
// as one JSON array. judge -> user_id, winner -> outcome, first user turn of
// conversation_a -> prompt.
inline BattleLog adapt_arena_schema(std::istream& in, const ArenaOptions& opts = {}) {
  BattleLog log;
  in >> std::ws;
  if (in.peek() == '[') {
    nlohmann::json rows = nlohmann::json::parse(in, nullptr, false);
    if (rows.is_discarded()) throw Error(Errc::kMalformedLine, "invalid JSON array", 1);
    for (const auto& row : rows) detail::adapt_arena_row(row, opts, log);
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::skippable_line(line)) continue;
      nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
      if (row.is_discarded()) throw Error(Errc::kMalformedLine, "invalid JSON", line_no);
      detail::adapt_arena_row(row, opts, log);
    }
  }
  if (log.empty()) throw Error(Errc::kEmptyInput, "no arena rows");
  return log;
}

struct UserStats {
  std::string user_id;
  std::size_t battles = 0;
  std::size_t unique_prompts = 0;
  std::vector<std::size_t> record_indices;
};

// Per-user statistics of a log, indexed by UserId.
struct UserIndex {
  std::vector<UserStats> users;

  std::size_t total_battles() const {
    std::size_t total = 0;
    for (const auto& u : users) total += u.battles;
    return total;
  }
};

inline UserIndex build_user_index(const BattleLog& log) {
  UserIndex index;
  index.users.resize(log.user_count());
  std::vector<std::unordered_set<std::string_view>> prompts(log.user_count());
  for (std::size_t i = 0; i < log.size(); ++i) {
    const std::size_t u = index_of(log.key(i).user);
    auto& stats = index.users[u];
    stats.user_id = log.record(i).user_id;
    ++stats.battles;
    stats.record_indices.push_back(i);
    prompts[u].insert(log.record(i).prompt);
  }
  for (std::size_t u = 0; u < index.users.size(); ++u) {
    index.users[u].unique_prompts = prompts[u].size();
  }
  return index;
}

struct FilteredLog {
  BattleLog log;
  UserIndex index;
};

// Keeps the records of users with at least `min_battles` battles. The model
// universe (and its id order) of the input is preserved so that per-user
// ratings stay aligned with ratings computed on the unfiltered log.
inline FilteredLog filter_active_users(const BattleLog& log, std::size_t min_battles) {
  if (min_battles < 1) throw Error(Errc::kInvalidArgument, "min_battles must be >= 1");
  const UserIndex full = build_user_index(log);
  FilteredLog out{BattleLog::with_models(log.models()), {}};
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (full.users[index_of(log.key(i).user)].battles >= min_battles) {
      BattleRecord r = log.record(i);
      r.sequence_index = out.log.size();
      out.log.add(std::move(r));
    }
  }
  if (out.log.empty()) {
    throw Error(Errc::kNoQualifyingUsers,
                "no user has at least " + std::to_string(min_battles) + " battles");
  }
  out.index = build_user_index(out.log);
  return out;
}

struct UserQueries {
  std::vector<std::string> prompts;  // source order, duplicates kept
  std::vector<std::string> unique;   // first occurrences only
};

inline UserQueries collect_user_queries(const BattleLog& log, std::string_view user) {
  const UserId id = log.require_user(user);
  UserQueries q;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log.key(i).user != id) continue;
    const auto& prompt = log.record(i).prompt;
    q.prompts.push_back(prompt);
    if (seen.insert(prompt).second) q.unique.push_back(prompt);
  }
  return q;
}

}  // namespace prefrank

#endif  // PREFRANK_BATTLE_HPP_
