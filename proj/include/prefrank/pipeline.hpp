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

#ifndef PREFRANK_PIPELINE_HPP_
#define PREFRANK_PIPELINE_HPP_

// The end-to-end run: ingest, rate, correlate, profile, cluster, predict.
// Each stage is also callable on its own; run_pipeline writes one directory
// per run with a manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prefrank/battle.hpp"
#include "prefrank/bradley_terry.hpp"
#include "prefrank/cluster.hpp"
#include "prefrank/config.hpp"
#include "prefrank/elo.hpp"
#include "prefrank/error.hpp"
#include "prefrank/lda.hpp"
#include "prefrank/parallel.hpp"
#include "prefrank/pca.hpp"
#include "prefrank/profile.hpp"
#include "prefrank/ratings.hpp"
#include "prefrank/regression.hpp"
#include "prefrank/report_io.hpp"
#include "prefrank/stats.hpp"

namespace prefrank {

inline BattleLog load_battles(const std::string& path, const std::string& adapter,
                              const std::string& language = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  if (adapter == "canonical") return parse_canonical(in);
  if (adapter == "arena") {
    ArenaOptions opts;
    if (!language.empty()) opts.language = language;
    return adapt_arena_schema(in, opts);
  }
  throw Error(Errc::kInvalidArgument, "unknown adapter '" + adapter + "'");
}

// ---------------------------------------------------------------------------
// Ratings

namespace detail {

inline RatingVector undefined_bt(const std::vector<std::size_t>& battles) {
  RatingVector v;
  v.system = RatingSystem::kBradleyTerry;
  v.scores.assign(battles.size(), std::numeric_limits<double>::quiet_NaN());
  v.observed.resize(battles.size());
  for (std::size_t m = 0; m < battles.size(); ++m) v.observed[m] = battles[m] > 0;
  return v;
}

// Display-scale BT vector for a subject. A fit that ran out of iterations is
// kept; a subject whose fit is undefined gets NaN scores. Either case is
// described in `note`.
inline RatingVector bt_vector(const BattleLog& log, const Subject& subject, const BtConfig& cfg,
                              const std::vector<std::size_t>& battles, std::string& note) {
  try {
    return bt_display_scale(compute_bt_fit(log, subject, cfg), cfg);
  } catch (const BtNotConverged& e) {
    note = subject.label() + ": Bradley-Terry fit stopped after " +
           std::to_string(e.fit().iterations) + " iterations";
    return bt_display_scale(e.fit(), cfg);
  } catch (const Error& e) {
    if (subject.is_global() || (e.code() != Errc::kDegenerate && e.code() != Errc::kTooFewModels)) {
      throw;
    }
    note = subject.label() + ": Bradley-Terry scores undefined (" + e.what() + ")";
    return undefined_bt(battles);
  }
}

}  // namespace detail

// Global tables come from `full`; personal tables from `active`, which must
// share the model universe of `full` (filter_active_users preserves it).
inline RatingTables compute_rating_tables(const BattleLog& full, const BattleLog& active,
                                          const EloConfig& elo, const BtConfig& bt,
                                          unsigned workers = default_workers(),
                                          bool want_elo = true, bool want_bt = true) {
  if (full.model_count() != active.model_count()) {
    throw Error(Errc::kInvalidShape, "active log has a different model universe");
  }
  RatingTables t;
  t.has_elo = want_elo;
  t.has_bt = want_bt;
  t.models.assign(full.models().begin(), full.models().end());
  t.global_battles = full.model_battle_counts();
  t.users.assign(active.users().begin(), active.users().end());
  const std::size_t U = t.users.size(), M = t.models.size();
  t.user_battles.assign(U, std::vector<std::size_t>(M, 0));
  for (const auto& k : active.keys()) {
    ++t.user_battles[index_of(k.user)][index_of(k.model_a)];
    ++t.user_battles[index_of(k.user)][index_of(k.model_b)];
  }
  if (want_elo) t.global_elo = compute_elo_table(full, Subject::global(), elo);
  if (want_bt) {
    std::string note;
    t.global_bt = detail::bt_vector(full, Subject::global(), bt, t.global_battles, note);
    if (!note.empty()) t.notes.push_back(note);
  }
  t.user_elo.resize(U);
  t.user_bt.resize(U);
  std::vector<std::string> notes(U);
  parallel_for(U, [&](std::size_t u) {
    const Subject subject = Subject::of_user(t.users[u]);
    if (want_elo) t.user_elo[u] = compute_elo_table(active, subject, elo);
    if (want_bt) t.user_bt[u] = detail::bt_vector(active, subject, bt, t.user_battles[u], notes[u]);
  }, workers);
  for (auto& n : notes) {
    if (!n.empty()) t.notes.push_back(std::move(n));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Correlations

struct CorrelationExclusion {
  std::string user_id;
  RatingSystem system = RatingSystem::kElo;
  std::string reason;
};

struct CorrelationTable {
  std::vector<CorrelationRecord> records;  // system-major, users in table order
  std::vector<CorrelationExclusion> exclusions;

  std::vector<CorrelationRecord> of(RatingSystem s) const {
    std::vector<CorrelationRecord> out;
    for (const auto& r : records) {
      if (r.system == s) out.push_back(r);
    }
    return out;
  }
};

// Spearman correlation of every user's ranking with the global one over the
// models the user battled. Users left with fewer than three models or a
// constant ranking are excluded and listed.
inline CorrelationTable correlate_users(const RatingTables& t,
                                        std::span<const RatingSystem> systems) {
  CorrelationTable out;
  for (RatingSystem s : systems) {
    if ((s == RatingSystem::kElo && !t.has_elo) || (s == RatingSystem::kBradleyTerry && !t.has_bt)) {
      throw Error(Errc::kInvalidArgument, std::string("no ") + std::string(system_label(s)) +
                                              " ratings available");
    }
    for (std::size_t u = 0; u < t.users.size(); ++u) {
      try {
        const RestrictedScores r = restrict_to_observed(t.personal(s)[u], t.global(s));
        const double rho = spearman_rho(r.personal, r.global);
        out.records.push_back({t.users[u], s, rho, spearman_p_value(rho, r.models.size()),
                               r.models.size()});
      } catch (const Error& e) {
        if (e.code() != Errc::kTooFewModels && e.code() != Errc::kZeroVariance) throw;
        out.exclusions.push_back({t.users[u], s, std::string(errc_name(e.code()))});
      }
    }
  }
  return out;
}

inline constexpr std::string_view kCorrelationsHeader = "user_id,system,rho,p_value,n_models";

inline void write_correlations_csv(std::ostream& out, const CorrelationTable& c) {
  out << kCorrelationsHeader << '\n';
  for (const auto& r : c.records) {
    out << csv_field(r.user_id) << ',' << system_label(r.system) << ',' << fmt6(r.rho) << ','
        << fmt6(r.p_value) << ',' << r.n_models << '\n';
  }
}

inline CorrelationTable read_correlations_csv(std::istream& in) {
  const CsvTable csv = read_csv(in);
  const std::size_t cu = csv.column("user_id"), cs = csv.column("system"), cr = csv.column("rho"),
                    cp = csv.column("p_value"), cn = csv.column("n_models");
  CorrelationTable out;
  for (const auto& row : csv.rows) {
    out.records.push_back({row[cu], parse_system_label(row[cs]), parse_csv_double(row[cr]),
                           parse_csv_double(row[cp]), std::stoul(row[cn])});
  }
  return out;
}

namespace detail {

inline Json wilcoxon_json(const WilcoxonResult& w) {
  return Json{{"statistic", num6(w.statistic)},
              {"p_value", num6(w.p_value)},
              {"n_effective", w.n_effective},
              {"method", w.method == WilcoxonMethod::kExact ? "exact" : "normal"}};
}

}  // namespace detail

struct SummaryOptions {
  std::size_t bootstrap = 10000;
  double confidence = 0.95;
  std::uint64_t seed = 7;  // stage seeds derive from this
  unsigned workers = default_workers();
};

// Population statistics per system: location and spread of rho, bootstrap CI
// of the mean, Wilcoxon and t tests of the mean against zero, and the paired
// Wilcoxon test of ELO against Bradley-Terry correlations.
inline Json population_summary_json(const CorrelationTable& c, const SummaryOptions& opt) {
  Json out;
  Json systems = Json::object();
  std::map<std::string, double> elo_rho, bt_rho;
  for (RatingSystem s : {RatingSystem::kElo, RatingSystem::kBradleyTerry}) {
    const auto records = c.of(s);
    const std::string label(system_label(s));
    Json j;
    j["n"] = records.size();
    if (!records.empty()) {
      const PopulationSummary p = summarize_population(records);
      j["mean"] = num6(p.mean);
      j["sd"] = num6(p.sd);
      j["median"] = num6(p.median);
      j["min"] = num6(p.min);
      j["max"] = num6(p.max);
      j["frac_below_0_1"] = num6(p.frac_below_0_1);
      j["count_below_0_1"] = p.count_below_0_1;
      j["frac_below_0_5"] = num6(p.frac_below_0_5);
      j["count_below_0_5"] = p.count_below_0_5;
      j["frac_significant"] = num6(p.frac_significant);
      j["count_significant"] = p.count_significant;
      std::vector<double> rhos;
      for (const auto& r : records) {
        rhos.push_back(r.rho);
        (s == RatingSystem::kElo ? elo_rho : bt_rho)[r.user_id] = r.rho;
      }
      const BootstrapSummary b = bootstrap_mean_ci(rhos, opt.bootstrap, opt.confidence,
                                                   derive_seed(opt.seed, "bootstrap-" + label),
                                                   opt.workers);
      j["bootstrap"] = Json{{"mean", num6(b.mean)},         {"ci_low", num6(b.ci_low)},
                            {"ci_high", num6(b.ci_high)},   {"confidence", num6(b.confidence)},
                            {"resamples", b.resamples},     {"seed", b.seed}};
      try {
        j["wilcoxon_vs_zero"] = detail::wilcoxon_json(wilcoxon_one_sample(rhos, 0.0));
      } catch (const Error& e) {
        j["wilcoxon_vs_zero"] = Json{{"error", errc_name(e.code())}};
      }
      if (rhos.size() >= 2) {
        const TTestResult t = t_test_one_sample(rhos, 0.0);
        j["t_test_vs_zero"] =
            Json{{"statistic", num6(t.statistic)}, {"p_value", num6(t.p_value)}, {"df", t.df}};
      }
    }
    systems[label] = std::move(j);
  }
  out["systems"] = std::move(systems);

  std::vector<double> a, b;
  for (const auto& [user, rho] : elo_rho) {
    auto it = bt_rho.find(user);
    if (it == bt_rho.end()) continue;
    a.push_back(rho);
    b.push_back(it->second);
  }
  Json paired{{"users", a.size()}};
  if (!a.empty()) {
    try {
      paired.update(detail::wilcoxon_json(wilcoxon_paired(a, b)));
    } catch (const Error& e) {
      paired["error"] = errc_name(e.code());
    }
  }
  out["paired_wilcoxon_elo_vs_bt"] = std::move(paired);

  Json excl = Json::array();
  for (const auto& e : c.exclusions) {
    excl.push_back(Json{{"user_id", e.user_id}, {"system", system_label(e.system)},
                        {"reason", e.reason}});
  }
  out["exclusions"] = std::move(excl);
  return out;
}

// ---------------------------------------------------------------------------
// Features and clusters

inline Json topics_report_json(const FeatureSet& f) {
  Json out;
  const TopicQuality q = topic_quality(f.topic_model, f.topic_corpus);
  out["vocabulary_size"] = f.vocabulary.size();
  out["documents"] = f.topic_corpus.size();
  out["out_of_vocabulary_queries"] = f.out_of_vocabulary_queries;
  out["coherence"] = num6(q.coherence);
  out["diversity"] = num6(q.diversity);
  Json topics = Json::array();
  for (std::size_t k = 0; k < f.topic_model.topics; ++k) {
    std::vector<std::string> words;
    for (std::size_t w : f.topic_model.top_words(k, 10)) words.push_back(f.vocabulary.term(w));
    topics.push_back(Json{{"topic", k + 1},
                          {"coherence", num6(q.per_topic_coherence[k])},
                          {"top_words", words}});
  }
  out["topics"] = std::move(topics);
  Json style = Json::array();
  for (std::size_t k = 0; k < f.style.model.topics; ++k) {
    std::vector<std::string> features;
    for (std::size_t w : f.style.model.top_words(k, 5)) {
      features.emplace_back(kStyleFeatureNames[w]);
    }
    style.push_back(Json{{"style_topic", k + 1}, {"top_features", features}});
  }
  out["style_topics"] = std::move(style);
  return out;
}

struct ClusterReport {
  std::vector<std::string> users;
  ClusterAssignment assignment;
  PcaProjection pca;
};

// k-means over the users' mean style vectors, k picked by silhouette over
// [k_min, min(k_max, users - 1)], plus a 2-D PCA projection of the same points.
inline ClusterReport cluster_users(std::span<const UserProfile> profiles, std::size_t k_min,
                                   std::size_t k_max, std::size_t restarts, std::uint64_t seed) {
  ClusterReport out;
  Matrix x(profiles.size(), kStyleDims);
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    out.users.push_back(profiles[u].user_id);
    std::copy(profiles[u].style.values.begin(), profiles[u].style.values.end(), x.row(u).begin());
  }
  if (profiles.size() >= 2) k_max = std::min(k_max, profiles.size() - 1);
  KMeansConfig kc;
  kc.restarts = restarts;
  kc.seed = seed;
  out.assignment = kmeans_cluster(x, k_min, k_max, kc);
  out.pca = pca_project(x, 2);
  return out;
}

inline void write_clusters_csv(std::ostream& out, const ClusterReport& c) {
  out << "user_id,cluster,pc1,pc2\n";
  for (std::size_t u = 0; u < c.users.size(); ++u) {
    out << csv_field(c.users[u]) << ',' << c.assignment.labels[u] << ','
        << fmt6(c.pca.coordinates(u, 0)) << ',' << fmt6(c.pca.coordinates(u, 1)) << '\n';
  }
}

inline void write_silhouettes_csv(std::ostream& out, const ClusterReport& c) {
  out << "k,silhouette,objective\n";
  for (const auto& s : c.assignment.scanned) {
    out << s.k << ',' << fmt6(s.silhouette) << ',' << fmt6(s.objective) << '\n';
  }
}

inline Json cluster_summary_json(const ClusterReport& c) {
  std::vector<std::size_t> sizes(c.assignment.k, 0);
  for (std::size_t l : c.assignment.labels) ++sizes[l];
  Json ratios = Json::array();
  for (double r : c.pca.explained_ratio) ratios.push_back(num6(r));
  return Json{{"users", c.users.size()},
              {"chosen_k", c.assignment.k},
              {"cluster_sizes", sizes},
              {"pca_explained_ratio", ratios}};
}

// ---------------------------------------------------------------------------
// Prediction

// Dataset of one system's personal ratings, rows in profile order.
inline RegressionDataset dataset_for(std::span<const UserProfile> profiles, const RatingTables& t,
                                     RatingSystem system, std::uint64_t split_seed) {
  std::map<std::string, std::size_t> row_of;
  for (std::size_t u = 0; u < t.users.size(); ++u) row_of[t.users[u]] = u;
  std::vector<RatingVector> ratings;
  for (const auto& p : profiles) {
    auto it = row_of.find(p.user_id);
    if (it == row_of.end()) throw Error(Errc::kUnknownUser, "no ratings for " + p.user_id);
    ratings.push_back(t.personal(system)[it->second]);
  }
  return build_dataset(profiles, ratings, t.models, t.global_battles, system, split_seed);
}

inline Json eval_report_json(const PredictionRun& run, const RegressionDataset& ds,
                             const RankPredictorConfig& cfg) {
  const EvalReport& r = run.report;
  Json per_model = Json::object();
  for (std::size_t c = 0; c < ds.target_models.size(); ++c) {
    per_model[ds.target_models[c]] = num6(r.per_model_mae[c]);
  }
  std::vector<int> best_epochs, epochs_run;
  for (const auto& c : run.curves) {
    best_epochs.push_back(c.best_epoch);
    epochs_run.push_back(c.epochs_run);
  }
  std::size_t fully_imputed = 0;
  for (bool b : ds.fully_imputed) fully_imputed += b ? 1 : 0;
  return Json{{"system", system_label(ds.system)},
              {"mae", num6(r.mae)},
              {"baseline_mae", num6(r.baseline_mae)},
              {"improvement", num6(r.improvement)},
              {"mae_observed_only", num6(r.mae_observed)},
              {"baseline_mae_observed_only", num6(r.baseline_mae_observed)},
              {"train_users", run.split.train_rows.size()},
              {"validation_users", r.validation_users},
              {"fully_imputed_users", fully_imputed},
              {"outputs", r.outputs},
              {"ensemble_size", cfg.ensemble_size},
              {"best_epochs", best_epochs},
              {"epochs_run", epochs_run},
              {"per_model_mae", per_model},
              {"warnings", ds.warnings}};
}

inline void write_predictions_csv(std::ostream& out, const PredictionRun& run,
                                  const RegressionDataset& ds) {
  out << "user_id,model,predicted,actual,imputed\n";
  for (std::size_t k = 0; k < run.split.validation_rows.size(); ++k) {
    const std::size_t row = run.split.validation_rows[k];
    for (std::size_t c = 0; c < ds.target_models.size(); ++c) {
      out << csv_field(ds.users[row]) << ',' << csv_field(ds.target_models[c]) << ','
          << fmt6(run.predicted(k, c)) << ',' << fmt6(ds.y(row, c)) << ','
          << (ds.is_imputed(row, c) ? 1 : 0) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Full run

struct PipelineResult {
  int exit_code = 0;  // 0 success, 2 bad input, 3 stage failure
  std::string failed_stage;
  std::string message;
};

inline constexpr int kExitBadInput = 2;
inline constexpr int kExitStageFailure = 3;

inline PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir,
                                   unsigned workers = default_workers()) {
  namespace fs = std::filesystem;
  PipelineResult result;
  BattleLog full;
  try {
    full = load_battles(cfg.input, cfg.adapter, cfg.language);
  } catch (const Error& e) {
    return {kExitBadInput, "ingest", e.what()};
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return {kExitStageFailure, "output", "cannot create " + out_dir.string()};

  const auto seeds = stage_seeds(cfg.seed);
  Json manifest;
  manifest["status"] = "running";
  manifest["config_hash"] = config_hash(cfg);
  manifest["seed"] = cfg.seed;
  Json seed_json = Json::object();
  for (const auto& [stage, s] : seeds) seed_json[stage] = s;
  manifest["stage_seeds"] = seed_json;
  manifest["counts"] = Json{{"battles", full.size()},
                            {"users", full.user_count()},
                            {"models", full.model_count()}};
  Json outputs = Json::array();
  Json notes = Json::array();
  auto path = [&](const char* name) { return (out_dir / name).string(); };
  auto emit = [&](const char* name, const std::string& text) {
    write_text_file(path(name), text);
    outputs.push_back(name);
  };
  auto emit_json = [&](const char* name, const Json& j) { emit(name, j.dump(2) + "\n"); };

  std::string stage;
  try {
    emit("config.txt", config_to_text(cfg));

    stage = "filter";
    const FilteredLog active = filter_active_users(full, cfg.min_battles);
    manifest["counts"]["active_users"] = active.log.user_count();
    manifest["counts"]["active_battles"] = active.log.size();

    stage = "rate";
    const RatingTables tables = compute_rating_tables(full, active.log, cfg.elo, cfg.bt, workers);
    for (const auto& n : tables.notes) notes.push_back(n);
    {
      std::ostringstream s;
      write_ratings_csv(s, tables);
      emit("ratings.csv", s.str());
    }

    stage = "correlate";
    const std::vector<RatingSystem> systems = {RatingSystem::kElo, RatingSystem::kBradleyTerry};
    const CorrelationTable corr = correlate_users(tables, systems);
    {
      std::ostringstream s;
      write_correlations_csv(s, corr);
      emit("correlations.csv", s.str());
    }
    emit_json("population_summary.json",
              population_summary_json(corr, {cfg.bootstrap, cfg.confidence, cfg.seed, workers}));

    stage = "features";
    FeatureConfig fcfg = cfg.features;
    fcfg.seed = seeds.at("features");
    const FeatureSet features = build_user_profiles(active.log, fcfg, workers);
    {
      std::ostringstream s;
      write_profiles_csv(s, features.profiles);
      emit("profiles.csv", s.str());
    }
    emit_json("topics.json", topics_report_json(features));

    stage = "cluster";
    if (features.profiles.size() > cfg.k_min) {
      const ClusterReport clusters = cluster_users(features.profiles, cfg.k_min, cfg.k_max,
                                                   cfg.restarts, seeds.at("cluster"));
      std::ostringstream a, b;
      write_clusters_csv(a, clusters);
      write_silhouettes_csv(b, clusters);
      emit("clusters.csv", a.str());
      emit("silhouettes.csv", b.str());
      emit_json("cluster_summary.json", cluster_summary_json(clusters));
    } else {
      notes.push_back("clustering skipped: too few users");
    }

    for (RatingSystem s : systems) {
      const std::string label(system_label(s));
      stage = "predict-" + label;
      const RankPredictorConfig& pcfg =
          s == RatingSystem::kElo ? cfg.elo_predictor : cfg.bt_predictor;
      const RegressionDataset ds =
          dataset_for(features.profiles, tables, s, seeds.at("split-" + label));
      const PredictionRun run = fit_and_evaluate(ds, pcfg, seeds.at("train-" + label), workers);
      const std::string eval_name = "eval_" + label + ".json";
      const std::string pred_name = "predictions_" + label + ".csv";
      emit_json(eval_name.c_str(), eval_report_json(run, ds, pcfg));
      std::ostringstream p;
      write_predictions_csv(p, run, ds);
      emit(pred_name.c_str(), p.str());
    }
    stage.clear();
    manifest["status"] = "ok";
  } catch (const std::exception& e) {
    manifest["status"] = "FAILED";
    manifest["failed_stage"] = stage;
    manifest["error"] = e.what();
    result = {kExitStageFailure, stage, e.what()};
  }
  manifest["notes"] = notes;
  outputs.push_back("manifest.json");
  manifest["outputs"] = outputs;
  try {
    write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
  } catch (const Error& e) {
    return {kExitStageFailure, "manifest", e.what()};
  }
  return result;
}

// ---------------------------------------------------------------------------
// Summary

namespace detail {

inline std::string pct(const Json& frac) {
  if (frac.is_null()) return "n/a";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.0f%%", 100.0 * frac.get<double>());
  return buf;
}

inline std::string num(const Json& j) {
  return j.is_null() ? "n/a" : fmt6(j.get<double>());
}

}  // namespace detail

// Text table of a finished bundle. Every number is read from the bundle's
// JSON files; nothing is recomputed.
inline std::string report_summary(const std::filesystem::path& bundle) {
  auto require = [&](const char* name) {
    const auto p = bundle / name;
    if (!std::filesystem::exists(p)) throw Error(Errc::kIncompleteBundle, "missing " + p.string());
    return read_json_file(p.string());
  };
  const Json manifest = require("manifest.json");
  if (manifest.value("status", "") != "ok") {
    throw Error(Errc::kIncompleteBundle, "run status is " + manifest.value("status", "unknown"));
  }
  const Json summary = require("population_summary.json");
  const auto& systems = summary.at("systems");
  std::size_t total = 0;
  for (const auto& [name, s] : systems.items()) total += s.at("n").get<std::size_t>();
  if (total == 0) throw Error(Errc::kIncompleteBundle, "no correlation records");

  std::ostringstream out;
  const auto& counts = manifest.at("counts");
  out << "users: " << counts.value("active_users", 0) << " active of "
      << counts.value("users", 0) << ", models: " << counts.value("models", 0)
      << ", battles: " << counts.value("battles", 0) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %5s %9s %9s %9s %9s %9s %12s %12s %9s\n", "system", "n",
                "mean", "sd", "median", "min", "max", "below 0.1", "below 0.5", "p<0.05");
  out << line;
  for (const auto& [name, s] : systems.items()) {
    if (s.at("n").get<std::size_t>() == 0) {
      out << name << ": no users\n";
      continue;
    }
    std::snprintf(line, sizeof line, "%-6s %5zu %9s %9s %9s %9s %9s %12s %12s %9s\n",
                  name.c_str(), s.at("n").get<std::size_t>(), detail::num(s["mean"]).c_str(),
                  detail::num(s["sd"]).c_str(), detail::num(s["median"]).c_str(),
                  detail::num(s["min"]).c_str(), detail::num(s["max"]).c_str(),
                  (detail::pct(s["frac_below_0_1"]) + " (" +
                   std::to_string(s["count_below_0_1"].get<std::size_t>()) + ")")
                      .c_str(),
                  (detail::pct(s["frac_below_0_5"]) + " (" +
                   std::to_string(s["count_below_0_5"].get<std::size_t>()) + ")")
                      .c_str(),
                  detail::pct(s["frac_significant"]).c_str());
    out << line;
  }
  out << '\n';
  for (const auto& [name, s] : systems.items()) {
    if (s.at("n").get<std::size_t>() == 0) continue;
    const auto& b = s.at("bootstrap");
    out << name << ": " << detail::pct(s["frac_below_0_1"]) << " below 0.1, mean rho "
        << detail::num(s["mean"]) << ", " << detail::pct(b["confidence"]) << " CI ["
        << detail::num(b["ci_low"]) << ", " << detail::num(b["ci_high"]) << "] ("
        << b["resamples"].get<std::size_t>() << " resamples)\n";
    const auto& w = s.at("wilcoxon_vs_zero");
    if (w.contains("p_value")) {
      out << "  wilcoxon vs 0: W=" << detail::num(w["statistic"])
          << " p=" << detail::num(w["p_value"]) << " (" << w["method"].get<std::string>()
          << ", n=" << w["n_effective"].get<std::size_t>() << ")\n";
    }
    if (s.contains("t_test_vs_zero")) {
      const auto& t = s["t_test_vs_zero"];
      out << "  t-test vs 0: t=" << detail::num(t["statistic"]) << " p=" << detail::num(t["p_value"])
          << " (df=" << t["df"].get<std::size_t>() << ")\n";
    }
  }
  const auto& paired = summary.at("paired_wilcoxon_elo_vs_bt");
  if (paired.contains("p_value")) {
    out << "paired wilcoxon elo vs bt: W=" << detail::num(paired["statistic"])
        << " p=" << detail::num(paired["p_value"])
        << " (users=" << paired["users"].get<std::size_t>() << ")\n";
  }
  out << "excluded user-system pairs: " << summary.at("exclusions").size() << '\n';

  for (const char* name : {"eval_elo.json", "eval_bt.json"}) {
    const auto p = bundle / name;
    if (!std::filesystem::exists(p)) continue;
    const Json e = read_json_file(p.string());
    out << "regression " << e.at("system").get<std::string>() << ": mae "
        << detail::num(e["mae"]) << ", baseline " << detail::num(e["baseline_mae"])
        << ", improvement " << detail::pct(e["improvement"]) << " (validation users "
        << e["validation_users"].get<std::size_t>() << ")\n";
  }
  return out.str();
}

}  // namespace prefrank

#endif  // PREFRANK_PIPELINE_HPP_
