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


// prefrank command-line tool: personalized leaderboards from pairwise
// preference logs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "prefrank/battle.hpp"
#include "prefrank/config.hpp"
#include "prefrank/error.hpp"
#include "prefrank/parallel.hpp"
#include "prefrank/pipeline.hpp"
#include "prefrank/report_io.hpp"
#include "prefrank/synth.hpp"

namespace fs = std::filesystem;
using namespace prefrank;

namespace {

constexpr const char* kTables = R"(Output tables (CSV with a header row, columns in this order):
  users.csv         user_id,battles,unique_prompts,active
  ratings.csv       scope,subject_id,system,model,score,observed,battles
                    (scope is global or user; subject_id is empty for global;
                     unobserved bt scores are nan)
  correlations.csv  user_id,system,rho,p_value,n_models
  profiles.csv      user_id,t_1..t_K,s_1..s_16,st_1..st_S
  clusters.csv      user_id,cluster,pc1,pc2
  silhouettes.csv   k,silhouette,objective
  predictions_<system>.csv  user_id,model,predicted,actual,imputed
JSON reports: population_summary.json, topics.json, cluster_summary.json,
eval_<system>.json, manifest.json.

Config file: one "key = value" per line, '#' comments. Keys include input,
adapter, language, min_battles, seed, elo.k_factor, bt.l2_penalty, bootstrap,
topics, style_topics, k_min, k_max, restarts and the predictor settings
elo.hidden, elo.activation, elo.loss, elo.huber_delta, elo.dropout,
elo.learning_rate, elo.weight_decay, elo.batch_size, elo.max_epochs,
elo.patience, elo.ensemble (same under bt.*). Command-line flags override
the file. `prefrank run --print-config` shows every key.

Exit codes: 0 success, 2 bad input, 3 stage failure.)";

bool is_input_error(Errc c) {
  switch (c) {
    case Errc::kIo:
    case Errc::kMalformedLine:
    case Errc::kEmptyInput:
    case Errc::kMissingField:
    case Errc::kUnknownWinnerLabel:
    case Errc::kDuplicateSameModels:
    case Errc::kInvalidArgument:
    case Errc::kInvalidShape:
    case Errc::kIncompleteBundle:
      return true;
    default:
      return false;
  }
}

// The --config value, looked up before option parsing so that flags given on
// the command line can override the file.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string_view a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.starts_with("--config=")) return std::string(a.substr(9));
  }
  return {};
}

template <class Fn>
void write_table(const fs::path& path, Fn&& fn) {
  std::ostringstream s;
  fn(s);
  write_text_file(path.string(), s.str());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + dir.string());
}

std::vector<RatingSystem> parse_systems(const std::string& list) {
  std::vector<RatingSystem> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_system_label(item));
  if (out.empty()) throw Error(Errc::kInvalidArgument, "no rating system given");
  return out;
}

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::size_t k = std::stoul(text);
      return {k, k};
    }
    return {std::stoul(text.substr(0, dots)), std::stoul(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw Error(Errc::kInvalidArgument, "k range must look like 2..8");
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  const std::string config_path = find_config_path(argc, argv);
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(Errc::kIo, "cannot open " + config_path);
      apply_config_text(in, cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kExitBadInput;
  }

  CLI::App app{"Personalized model leaderboards from pairwise preference logs."};
  app.footer(kTables);
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = ".";
  std::string config_unused;
  unsigned workers = default_workers();
  app.add_option("--seed", cfg.seed, "Global seed; every stage seed derives from it")
      ->capture_default_str();
  app.add_option("--out", out_dir, "Output directory (synth: battle file path)")
      ->capture_default_str();
  app.add_option("--config", config_unused, "Run configuration file (key = value lines)");
  app.add_option("--workers", workers, "Worker threads; results do not depend on it")
      ->capture_default_str();

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Battle log path")->capture_default_str();
    sub->add_option("--adapter", cfg.adapter, "canonical or arena")->capture_default_str();
    sub->add_option("--language", cfg.language, "Arena rows: keep only this language");
    sub->add_option("--min-battles", cfg.min_battles, "Minimum battles for an active user")
        ->capture_default_str();
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse a log; write battles.jsonl and users.csv");
  add_input(ingest);

  // synth
  SynthConfig synth_cfg;
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic population; --out names the battle file, ground truth goes "
               "to <stem>.truth.json");
  synth->add_option("--models", synth_cfg.models)->capture_default_str();
  synth->add_option("--users", synth_cfg.users)->capture_default_str();
  synth->add_option("--battles", synth_cfg.battles_per_user, "Battles per user")
      ->capture_default_str();
  synth->add_option("--heterogeneity", synth_cfg.heterogeneity)->capture_default_str();
  synth->add_option("--tie-rate", synth_cfg.tie_rate)->capture_default_str();
  synth->add_flag("--round-robin", synth_cfg.round_robin, "Cycle through all model pairs");
  synth->add_flag("--orthogonal", synth_cfg.orthogonal_features,
                  "User offsets orthogonal to the global strengths, antithetic pairs");

  // rate
  std::string system_choice = "both";
  std::string scope = "users";
  auto* rate = app.add_subcommand(
      "rate", "ELO and Bradley-Terry tables; writes ratings.csv (scope users also includes the "
              "global rows)");
  add_input(rate);
  rate->add_option("--system", system_choice, "elo, bt or both")->capture_default_str();
  rate->add_option("--scope", scope, "global or users")->capture_default_str();
  rate->add_option("--k", cfg.elo.k_factor, "ELO K factor")->capture_default_str();
  rate->add_option("--bt-l2", cfg.bt.l2_penalty, "L2 penalty on BT log-strengths")
      ->capture_default_str();

  // correlate
  std::string ratings_path, against = "global", systems = "elo,bt";
  auto* correlate = app.add_subcommand(
      "correlate", "Per-user Spearman rho against the global ranking; writes correlations.csv "
                   "and population_summary.json");
  correlate->add_option("--ratings", ratings_path, "ratings.csv (default <out>/ratings.csv)");
  correlate->add_option("--against", against, "Reference ranking (global)")->capture_default_str();
  correlate->add_option("--systems", systems)->capture_default_str();
  correlate->add_option("--bootstrap", cfg.bootstrap, "Bootstrap resamples")->capture_default_str();
  correlate->add_option("--confidence", cfg.confidence)->capture_default_str();

  // features
  auto* features = app.add_subcommand(
      "features", "Topic and style profiles of active users; writes profiles.csv and topics.json");
  add_input(features);
  features->add_option("--topics", cfg.features.topics)->capture_default_str();
  features->add_option("--style-topics", cfg.features.style_topics)->capture_default_str();
  features->add_option("--topic-iterations", cfg.features.topic_iterations)->capture_default_str();
  features->add_option("--style-iterations", cfg.features.style_iterations)->capture_default_str();

  // cluster
  std::string profiles_path;
  std::string k_range = std::to_string(cfg.k_min) + ".." + std::to_string(cfg.k_max);
  auto* cluster = app.add_subcommand(
      "cluster", "k-means of style profiles with silhouette selection; writes clusters.csv, "
                 "silhouettes.csv, cluster_summary.json");
  cluster->add_option("--profiles", profiles_path, "profiles.csv (default <out>/profiles.csv)");
  cluster->add_option("--k-range", k_range)->capture_default_str();
  cluster->add_option("--restarts", cfg.restarts)->capture_default_str();

  // predict
  std::string predict_system = "elo";
  auto* predict = app.add_subcommand(
      "predict", "Rating-vector regression from profiles; writes eval_<system>.json and "
                 "predictions_<system>.csv");
  predict->add_option("--system", predict_system, "elo or bt")->capture_default_str();
  predict->add_option("--profiles", profiles_path, "profiles.csv (default <out>/profiles.csv)");
  predict->add_option("--ratings", ratings_path, "ratings.csv (default <out>/ratings.csv)");

  // run
  bool print_config = false;
  auto* run = app.add_subcommand("run", "Full pipeline into one bundle directory");
  add_input(run);
  run->add_flag("--print-config", print_config, "Print the effective configuration and exit");

  // report
  std::string bundle;
  auto* report = app.add_subcommand("report", "Summary table of a finished bundle");
  report->add_option("--bundle", bundle, "Bundle directory (default <out>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  const fs::path out(out_dir);
  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*ingest) {
      const BattleLog log = load_battles(cfg.input, cfg.adapter, cfg.language);
      const UserIndex index = build_user_index(log);
      ensure_dir(out);
      write_table(out / "battles.jsonl", [&](std::ostream& s) { write_canonical(s, log); });
      std::size_t active = 0;
      write_table(out / "users.csv", [&](std::ostream& s) {
        s << "user_id,battles,unique_prompts,active\n";
        for (const auto& u : index.users) {
          const bool a = u.battles >= cfg.min_battles;
          active += a ? 1 : 0;
          s << csv_field(u.user_id) << ',' << u.battles << ',' << u.unique_prompts << ','
            << (a ? 1 : 0) << '\n';
        }
      });
      std::cout << log.size() << " battles, " << log.user_count() << " users (" << active
                << " with >= " << cfg.min_battles << " battles), " << log.model_count()
                << " models\n";
    } else if (*synth) {
      synth_cfg.seed = cfg.seed;
      const SyntheticPopulation pop = generate_population(synth_cfg);
      const BattleLog log = sample_battles(pop);
      fs::path battles = out;
      if (fs::is_directory(battles)) battles /= "battles.jsonl";
      if (battles.has_parent_path()) ensure_dir(battles.parent_path());
      write_table(battles, [&](std::ostream& s) { write_canonical(s, log); });
      fs::path truth = battles;
      truth.replace_extension(".truth.json");
      write_text_file(truth.string(), population_truth_json(pop).dump(2) + "\n");
      std::cout << "wrote " << log.size() << " battles to " << battles.string() << " and "
                << truth.string() << '\n';
    } else if (*rate) {
      if (scope != "global" && scope != "users") {
        throw Error(Errc::kInvalidArgument, "scope must be global or users");
      }
      const bool elo = system_choice == "both" || parse_system_label(system_choice) == RatingSystem::kElo;
      const bool bt = system_choice == "both" ||
                      parse_system_label(system_choice) == RatingSystem::kBradleyTerry;
      const BattleLog full = load_battles(cfg.input, cfg.adapter, cfg.language);
      const BattleLog active = scope == "users" ? filter_active_users(full, cfg.min_battles).log
                                                : BattleLog::with_models(full.models());
      const RatingTables t = compute_rating_tables(full, active, cfg.elo, cfg.bt, workers, elo, bt);
      ensure_dir(out);
      write_table(out / "ratings.csv", [&](std::ostream& s) { write_ratings_csv(s, t); });
      for (const auto& n : t.notes) std::cerr << "note: " << n << '\n';
    } else if (*correlate) {
      if (against != "global") throw Error(Errc::kInvalidArgument, "only --against global exists");
      if (ratings_path.empty()) ratings_path = (out / "ratings.csv").string();
      std::ifstream in(ratings_path);
      if (!in) throw Error(Errc::kIo, "cannot open " + ratings_path);
      const RatingTables t = read_ratings_csv(in);
      const CorrelationTable c = correlate_users(t, parse_systems(systems));
      ensure_dir(out);
      write_table(out / "correlations.csv", [&](std::ostream& s) { write_correlations_csv(s, c); });
      write_text_file((out / "population_summary.json").string(),
                      population_summary_json(c, {cfg.bootstrap, cfg.confidence, cfg.seed, workers})
                              .dump(2) + "\n");
    } else if (*features) {
      const BattleLog full = load_battles(cfg.input, cfg.adapter, cfg.language);
      const FilteredLog active = filter_active_users(full, cfg.min_battles);
      FeatureConfig fcfg = cfg.features;
      fcfg.seed = derive_seed(cfg.seed, "features");
      const FeatureSet f = build_user_profiles(active.log, fcfg, workers);
      ensure_dir(out);
      write_table(out / "profiles.csv", [&](std::ostream& s) { write_profiles_csv(s, f.profiles); });
      write_text_file((out / "topics.json").string(), topics_report_json(f).dump(2) + "\n");
    } else if (*cluster) {
      if (profiles_path.empty()) profiles_path = (out / "profiles.csv").string();
      std::ifstream in(profiles_path);
      if (!in) throw Error(Errc::kIo, "cannot open " + profiles_path);
      const auto profiles = read_profiles_csv(in);
      const auto [k_min, k_max] = parse_k_range(k_range);
      const ClusterReport c =
          cluster_users(profiles, k_min, k_max, cfg.restarts, derive_seed(cfg.seed, "cluster"));
      ensure_dir(out);
      write_table(out / "clusters.csv", [&](std::ostream& s) { write_clusters_csv(s, c); });
      write_table(out / "silhouettes.csv", [&](std::ostream& s) { write_silhouettes_csv(s, c); });
      write_text_file((out / "cluster_summary.json").string(), cluster_summary_json(c).dump(2) + "\n");
    } else if (*predict) {
      const RatingSystem s = parse_system_label(predict_system);
      const std::string label(system_label(s));
      if (profiles_path.empty()) profiles_path = (out / "profiles.csv").string();
      if (ratings_path.empty()) ratings_path = (out / "ratings.csv").string();
      std::ifstream pin(profiles_path), rin(ratings_path);
      if (!pin) throw Error(Errc::kIo, "cannot open " + profiles_path);
      if (!rin) throw Error(Errc::kIo, "cannot open " + ratings_path);
      const auto profiles = read_profiles_csv(pin);
      const RatingTables t = read_ratings_csv(rin);
      const RankPredictorConfig& pcfg = s == RatingSystem::kElo ? cfg.elo_predictor : cfg.bt_predictor;
      const RegressionDataset ds = dataset_for(profiles, t, s, derive_seed(cfg.seed, "split-" + label));
      const PredictionRun r = fit_and_evaluate(ds, pcfg, derive_seed(cfg.seed, "train-" + label), workers);
      ensure_dir(out);
      write_text_file((out / ("eval_" + label + ".json")).string(),
                      eval_report_json(r, ds, pcfg).dump(2) + "\n");
      write_table(out / ("predictions_" + label + ".csv"),
                  [&](std::ostream& o) { write_predictions_csv(o, r, ds); });
      std::cout << label << ": mae " << fmt6(r.report.mae) << ", baseline "
                << fmt6(r.report.baseline_mae) << '\n';
    } else if (*run) {
      if (print_config) {
        std::cout << config_to_text(cfg);
        return 0;
      }
      const PipelineResult r = run_pipeline(cfg, out, workers);
      if (r.exit_code != 0) {
        std::cerr << "error: " << r.failed_stage << ": " << r.message << '\n';
        return r.exit_code;
      }
      std::cout << report_summary(out);
    } else if (*report) {
      std::cout << report_summary(bundle.empty() ? out : fs::path(bundle));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << stage << ": " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitBadInput : kExitStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << stage << ": " << e.what() << '\n';
    return kExitStageFailure;
  }
  return 0;
}
