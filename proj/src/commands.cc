// Copyright 2026 The gaitenroll Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaitenroll/commands.h"

#include <CLI11.hpp>
#include <iostream>
#include <set>

#include "gaitenroll/checkpoint.h"
#include "gaitenroll/digest.h"
#include "gaitenroll/io_util.h"
#include "gaitenroll/report.h"

namespace gaitenroll {

namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

void write_manifest(const fs::path& out_dir, const std::string& command, const RunConfig* config,
                    const Json& seeds, const Paths& inputs, const Paths& outputs) {
  Json doc;
  doc["command"] = command;
  if (config != nullptr) {
    doc["config_digest"] = config->digest();
    Json values = Json::object();
    for (const auto& key : RunConfig::known_keys()) values[key] = config->get(key);
    doc["config"] = values;
  }
  doc["seeds"] = seeds;
  auto files = [](const Paths& paths) {
    Json arr = Json::array();
    for (const auto& p : paths) arr.push_back({{"path", p.string()}, {"digest", digest_file(p)}});
    return arr;
  };
  doc["inputs"] = files(inputs);
  doc["outputs"] = files(outputs);
  write_file_atomic(out_dir / ("manifest." + command + ".json"), doc.dump(2) + "\n");
}

Dataset restrict(const Dataset& dataset, std::pair<std::size_t, std::size_t> range) {
  if (range.second == 0) return dataset;
  return select_identities(dataset, range.first, range.second);
}

}  // namespace

Paths cmd_synth(const RunConfig& config, const fs::path& out_dir) {
  const SynthSpec spec = config.synth_spec();
  const fs::path out = out_dir / "embeddings.jsonl";
  save_embeddings(out, gen_synthetic(spec));
  write_manifest(out_dir, "synth", &config, {{"synth.seed", spec.seed}}, {}, {out});
  return {out};
}

Paths cmd_scenario(const fs::path& embeddings, const RunConfig& config, const fs::path& out_dir) {
  const Dataset pool = restrict(load_embeddings(embeddings), config.scenario_id_range());
  auto ratios = config.scenario_ratios();
  if (ratios.empty()) {
    std::map<std::string, std::size_t> walks;
    for (const auto& r : pool) ++walks[r.id];
    std::size_t min_walks = walks.empty() ? 0 : walks.begin()->second;
    for (const auto& [id, n] : walks) min_walks = std::min(min_walks, n);
    ratios = default_ratio_grid(walks.size(), min_walks);
    if (ratios.empty()) throw InputError("dataset too small for any default id:walk ratio");
  }
  const auto scenarios = scenario_grid(pool, ratios, config.scenario_probes(), config.scenario_seed());
  Paths outputs;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    const fs::path out = out_dir / ("scenario_" + std::to_string(i) + "_" + std::to_string(s.spec.gallery_ids) + "x" +
                                    std::to_string(s.spec.walks_per_id) + ".json");
    save_scenario(out, s);
    outputs.push_back(out);
  }
  write_manifest(out_dir, "scenario", &config, {{"scenario.seed", config.scenario_seed()}},
                 {embeddings}, outputs);
  return outputs;
}

Paths cmd_train(const fs::path& embeddings, const Paths& train_scenarios, const fs::path& val_scenario,
                const RunConfig& config, const fs::path& out_dir) {
  if (train_scenarios.empty()) throw InputError("train: at least one training scenario is required");
  const Dataset dataset = load_embeddings(embeddings);
  if (dataset.empty()) throw InputError(embeddings.string() + ": no embeddings");
  std::vector<Scenario> scenarios;
  for (const auto& p : train_scenarios) scenarios.push_back(load_scenario(p));
  const Scenario val = load_scenario(val_scenario);

  Dataset pool;
  if (config.train_id_range().second != 0) {
    pool = restrict(dataset, config.train_id_range());
  } else {
    std::set<std::string> val_ids;
    for (const auto& [id, walk] : val.gallery) val_ids.insert(id);
    for (const auto& p : val.probes) val_ids.insert(p.id);
    for (const auto& r : dataset) {
      if (!val_ids.contains(r.id)) pool.push_back(r);
    }
  }

  const ModelConfig model_config = config.model_config(dataset[0].vec.size());
  const TrainConfig train_config = config.train_config();
  const TrainResult result = train(model_config, pool, scenarios, dataset, val, train_config);

  const fs::path ckpt = out_dir / "checkpoint.genr";
  const fs::path history = out_dir / "history.json";
  save_checkpoint(ckpt, result.best_model, train_config);
  Json hist;
  hist["best_epoch"] = result.best_epoch;
  hist["best_val_mcc"] = result.best_val_mcc;
  hist["epochs"] = history_json(result.history);
  write_file_atomic(history, hist.dump(2) + "\n");

  Paths inputs{embeddings};
  inputs.insert(inputs.end(), train_scenarios.begin(), train_scenarios.end());
  inputs.push_back(val_scenario);
  write_manifest(out_dir, "train", &config,
                 {{"model.seed", model_config.seed}, {"train.seed", train_config.seed}}, inputs,
                 {ckpt, history});
  return {ckpt, history};
}

Paths cmd_eval(const fs::path& embeddings, const fs::path& scenario_path, const fs::path& checkpoint,
               const fs::path& out_dir) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const Scenario scenario = load_scenario(scenario_path);
  const ScenarioData data = materialize(load_embeddings(embeddings), scenario);
  if (data.gallery.dim() != ckpt.model.config().input_dim) {
    throw InputError("embedding dimension " + std::to_string(data.gallery.dim()) +
                     " does not match checkpoint input_dim " +
                     std::to_string(ckpt.model.config().input_dim));
  }
  ModelEvaluation eval = evaluate_model(ckpt.model, data);
  eval.report.scenario = scenario.spec;
  eval.report.checkpoint_digest = digest_file(checkpoint);
  eval.report.config_digest = digest_string(model_config_json(ckpt.model.config()).dump() +
                                            ckpt.train_config_digest);

  const ScoredLabels sl = scored_labels(eval.scores);
  const Paths outputs{out_dir / "report.json", out_dir / "scores.csv", out_dir / "roc.csv",
                      out_dir / "pr.csv"};
  write_file_atomic(outputs[0], format_report(eval.report));
  write_file_atomic(outputs[1], scores_csv(eval.scores));
  write_file_atomic(outputs[2], roc_csv(roc_curve(sl)));
  write_file_atomic(outputs[3], pr_csv(pr_curve(sl)));
  write_manifest(out_dir, "eval", nullptr, {{"scenario.seed", scenario.seed}},
                 {embeddings, scenario_path, checkpoint}, outputs);
  return outputs;
}

Paths cmd_baseline(const fs::path& embeddings, const fs::path& val_scenario,
                   const fs::path& test_scenario, const RunConfig& config, const fs::path& out_dir) {
  const Dataset dataset = load_embeddings(embeddings);
  const Scenario val = load_scenario(val_scenario);
  const Scenario test = load_scenario(test_scenario);
  const BaselineConfig bc = config.baseline_config();
  BaselineResult result = baseline_fit_eval(materialize(dataset, val), materialize(dataset, test), bc);
  result.report.scenario = test.spec;
  result.report.config_digest = digest_string(config.get("baseline.mode") + "|" +
                                              config.get("baseline.k") + "|" +
                                              config.get("baseline.objective"));
  const Paths outputs{out_dir / "baseline_report.json", out_dir / "baseline_scores.csv"};
  write_file_atomic(outputs[0], format_report(result.report));
  write_file_atomic(outputs[1], scores_csv(result.test_scores));
  write_manifest(out_dir, "baseline", &config,
                 {{"val.seed", val.seed}, {"test.seed", test.seed}},
                 {embeddings, val_scenario, test_scenario}, outputs);
  return outputs;
}

Paths cmd_report(const Paths& reports, const fs::path& out_dir) {
  if (reports.empty()) throw InputError("report: no report files given");
  std::vector<EvalReport> loaded;
  std::vector<std::string> names;
  for (const auto& p : reports) {
    loaded.push_back(load_report(p));
    names.push_back(p.string());
  }
  const Paths outputs{out_dir / "comparison.csv", out_dir / "comparison.txt"};
  write_file_atomic(outputs[0], comparison_csv(loaded, names));
  const std::string text = comparison_text(loaded, names);
  write_file_atomic(outputs[1], text);
  std::cout << text;
  write_manifest(out_dir, "report", nullptr, Json::object(), reports, outputs);
  return outputs;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Open-set gait enrollment: synthesize, build scenarios, train, evaluate"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value run configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides, "override a config key (key=value)");
    sub->add_option("--seed", seed, "seed for this command's sampling");
  };

  std::string embeddings;
  std::vector<std::string> train_scenarios;
  std::string val_scenario;
  std::string test_scenario;
  std::string scenario;
  std::string checkpoint;
  std::vector<std::string> report_files;

  auto* synth = app.add_subcommand("synth", "generate synthetic embeddings");
  add_common(synth);
  auto* scen = app.add_subcommand("scenario", "build gallery/probe scenarios");
  add_common(scen);
  scen->add_option("--embeddings", embeddings)->required();
  auto* trn = app.add_subcommand("train", "train the enrollment model");
  add_common(trn);
  trn->add_option("--embeddings", embeddings)->required();
  trn->add_option("--train", train_scenarios, "training scenario files")->required();
  trn->add_option("--val", val_scenario, "validation scenario file")->required();
  auto* evl = app.add_subcommand("eval", "evaluate a checkpoint on a scenario");
  add_common(evl);
  evl->add_option("--embeddings", embeddings)->required();
  evl->add_option("--scenario", scenario)->required();
  evl->add_option("--checkpoint", checkpoint)->required();
  auto* base = app.add_subcommand("baseline", "distance-threshold baseline");
  add_common(base);
  base->add_option("--embeddings", embeddings)->required();
  base->add_option("--val", val_scenario)->required();
  base->add_option("--test", test_scenario)->required();
  auto* rep = app.add_subcommand("report", "compare evaluation reports");
  add_common(rep);
  rep->add_option("reports", report_files, "report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return 0;
    }
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
    for (const auto& o : overrides) config.set_assignment(o);
    if (seed) {
      const std::string s = std::to_string(*seed);
      if (synth->parsed()) config.set("synth.seed", s);
      if (scen->parsed()) config.set("scenario.seed", s);
      if (trn->parsed()) {
        config.set("train.seed", s);
        config.set("model.seed", s);
      }
    }
    const fs::path out(out_dir);
    fs::create_directories(out);
    if (synth->parsed()) {
      cmd_synth(config, out);
    } else if (scen->parsed()) {
      cmd_scenario(embeddings, config, out);
    } else if (trn->parsed()) {
      cmd_train(embeddings, Paths(train_scenarios.begin(), train_scenarios.end()), val_scenario,
                config, out);
    } else if (evl->parsed()) {
      cmd_eval(embeddings, scenario, checkpoint, out);
    } else if (base->parsed()) {
      cmd_baseline(embeddings, val_scenario, test_scenario, config, out);
    } else if (rep->parsed()) {
      cmd_report(Paths(report_files.begin(), report_files.end()), out);
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: " << msg << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gaitenroll
