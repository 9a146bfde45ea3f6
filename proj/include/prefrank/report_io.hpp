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

#ifndef PREFRANK_REPORT_IO_HPP_
#define PREFRANK_REPORT_IO_HPP_

// CSV and JSON report tables. Floating-point values are written with six
// significant digits; NaN is written as "nan" in CSV and null in JSON.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "prefrank/error.hpp"
#include "prefrank/profile.hpp"
#include "prefrank/ratings.hpp"
#include "prefrank/style.hpp"

namespace prefrank {

using Json = nlohmann::ordered_json;

inline std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// The JSON value of `v` rounded to six significant digits.
inline Json num6(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(fmt6(v).c_str(), nullptr);
}

inline double json_number(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no = 0) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(Errc::kMalformedLine, "unterminated quote", line_no);
  return fields;
}

// A CSV table read whole: header plus rows of equal width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(Errc::kMissingField, std::string(name));
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line, line_no);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else if (fields.size() != t.header.size()) {
      throw Error(Errc::kMalformedLine,
                  "expected " + std::to_string(t.header.size()) + " fields", line_no);
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  if (t.header.empty()) throw Error(Errc::kEmptyInput, "CSV without header");
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return read_csv(in);
}

inline double parse_csv_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw Error(Errc::kMalformedLine, "not a number: '" + s + "'");
  return v;
}

// Global and per-user rating vectors for both systems, plus battle counts.
struct RatingTables {
  std::vector<std::string> models;
  std::vector<std::size_t> global_battles;  // per model
  RatingVector global_elo;
  RatingVector global_bt;
  std::vector<std::string> users;
  std::vector<std::vector<std::size_t>> user_battles;  // users x models
  std::vector<RatingVector> user_elo;
  std::vector<RatingVector> user_bt;
  std::vector<std::string> notes;
  bool has_elo = true;
  bool has_bt = true;

  const RatingVector& global(RatingSystem s) const {
    return s == RatingSystem::kElo ? global_elo : global_bt;
  }
  const std::vector<RatingVector>& personal(RatingSystem s) const {
    return s == RatingSystem::kElo ? user_elo : user_bt;
  }
};

inline constexpr std::string_view kRatingsHeader =
    "scope,subject_id,system,model,score,observed,battles";

// One row per (subject, system, model); the global subject has an empty id.
inline void write_ratings_csv(std::ostream& out, const RatingTables& t) {
  out << kRatingsHeader << '\n';
  auto emit = [&](std::string_view scope, const std::string& subject, const RatingVector& v,
                  const std::vector<std::size_t>& battles) {
    for (std::size_t m = 0; m < t.models.size(); ++m) {
      out << scope << ',' << csv_field(subject) << ',' << system_label(v.system) << ','
          << csv_field(t.models[m]) << ',' << fmt6(v.scores[m]) << ','
          << (v.observed[m] ? 1 : 0) << ',' << battles[m] << '\n';
    }
  };
  for (RatingSystem s : {RatingSystem::kElo, RatingSystem::kBradleyTerry}) {
    if ((s == RatingSystem::kElo && !t.has_elo) || (s == RatingSystem::kBradleyTerry && !t.has_bt)) {
      continue;
    }
    emit("global", "", t.global(s), t.global_battles);
    for (std::size_t u = 0; u < t.users.size(); ++u) {
      emit("user", t.users[u], t.personal(s)[u], t.user_battles[u]);
    }
  }
}

inline RatingTables read_ratings_csv(std::istream& in) {
  const CsvTable csv = read_csv(in);
  const std::size_t c_scope = csv.column("scope"), c_subject = csv.column("subject_id"),
                    c_system = csv.column("system"), c_model = csv.column("model"),
                    c_score = csv.column("score"), c_observed = csv.column("observed"),
                    c_battles = csv.column("battles");
  RatingTables t;
  t.has_elo = t.has_bt = false;
  std::map<std::string, std::size_t> model_ids, user_ids;
  for (const auto& row : csv.rows) {
    if (model_ids.try_emplace(row[c_model], t.models.size()).second) t.models.push_back(row[c_model]);
    if (row[c_scope] == "user" && user_ids.try_emplace(row[c_subject], t.users.size()).second) {
      t.users.push_back(row[c_subject]);
    }
  }
  const std::size_t M = t.models.size(), U = t.users.size();
  auto blank = [&](RatingSystem s) {
    RatingVector v;
    v.system = s;
    v.scores.assign(M, std::numeric_limits<double>::quiet_NaN());
    v.observed.assign(M, false);
    return v;
  };
  t.global_elo = blank(RatingSystem::kElo);
  t.global_bt = blank(RatingSystem::kBradleyTerry);
  t.global_battles.assign(M, 0);
  t.user_elo.assign(U, blank(RatingSystem::kElo));
  t.user_bt.assign(U, blank(RatingSystem::kBradleyTerry));
  t.user_battles.assign(U, std::vector<std::size_t>(M, 0));
  for (const auto& row : csv.rows) {
    const RatingSystem s = parse_system_label(row[c_system]);
    (s == RatingSystem::kElo ? t.has_elo : t.has_bt) = true;
    const std::size_t m = model_ids.at(row[c_model]);
    const std::size_t battles = std::stoul(row[c_battles]);
    RatingVector* v = nullptr;
    if (row[c_scope] == "global") {
      v = s == RatingSystem::kElo ? &t.global_elo : &t.global_bt;
      t.global_battles[m] = battles;
    } else if (row[c_scope] == "user") {
      const std::size_t u = user_ids.at(row[c_subject]);
      v = s == RatingSystem::kElo ? &t.user_elo[u] : &t.user_bt[u];
      t.user_battles[u][m] = battles;
    } else {
      throw Error(Errc::kMalformedLine, "unknown scope '" + row[c_scope] + "'");
    }
    v->scores[m] = parse_csv_double(row[c_score]);
    v->observed[m] = row[c_observed] == "1";
  }
  return t;
}

inline std::string profiles_header(std::size_t topics, std::size_t style_topics) {
  std::string h = "user_id";
  for (std::size_t k = 1; k <= topics; ++k) h += ",t_" + std::to_string(k);
  for (std::size_t k = 1; k <= kStyleDims; ++k) h += ",s_" + std::to_string(k);
  for (std::size_t k = 1; k <= style_topics; ++k) h += ",st_" + std::to_string(k);
  return h;
}

inline void write_profiles_csv(std::ostream& out, std::span<const UserProfile> profiles) {
  if (profiles.empty()) return;
  out << profiles_header(profiles.front().topic.size(), profiles.front().style_topics.size())
      << '\n';
  for (const auto& p : profiles) {
    out << csv_field(p.user_id);
    for (double v : p.topic) out << ',' << fmt6(v);
    for (double v : p.style.values) out << ',' << fmt6(v);
    for (double v : p.style_topics) out << ',' << fmt6(v);
    out << '\n';
  }
}

inline std::vector<UserProfile> read_profiles_csv(std::istream& in) {
  const CsvTable csv = read_csv(in);
  std::vector<std::size_t> t_cols, s_cols, st_cols;
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    const std::string& h = csv.header[i];
    if (h.starts_with("st_")) {
      st_cols.push_back(i);
    } else if (h.starts_with("s_")) {
      s_cols.push_back(i);
    } else if (h.starts_with("t_")) {
      t_cols.push_back(i);
    }
  }
  if (s_cols.size() != kStyleDims || t_cols.empty()) {
    throw Error(Errc::kInvalidShape, "profile table needs t_* columns and 16 s_* columns");
  }
  const std::size_t c_user = csv.column("user_id");
  std::vector<UserProfile> out;
  for (const auto& row : csv.rows) {
    UserProfile p;
    p.user_id = row[c_user];
    for (std::size_t c : t_cols) p.topic.push_back(parse_csv_double(row[c]));
    for (std::size_t k = 0; k < kStyleDims; ++k) p.style.values[k] = parse_csv_double(row[s_cols[k]]);
    for (std::size_t c : st_cols) p.style_topics.push_back(parse_csv_double(row[c]));
    out.push_back(std::move(p));
  }
  return out;
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::kIo, "write failed for " + path);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedLine, path + ": " + e.what());
  }
}

}  // namespace prefrank

#endif  // PREFRANK_REPORT_IO_HPP_
