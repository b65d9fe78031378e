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

// Acceptance gate: one PASS/FAIL line per criterion AC-1 .. AC-10.
//
//   acceptance            run every criterion
//   acceptance 4 6        run a subset by number

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gaitenroll/baseline.h"
#include "gaitenroll/checkpoint.h"
#include "gaitenroll/commands.h"
#include "gaitenroll/config.h"
#include "gaitenroll/digest.h"
#include "gaitenroll/gallery.h"
#include "gaitenroll/io_util.h"
#include "gaitenroll/metrics.h"
#include "gaitenroll/scenario.h"
#include "gaitenroll/synth.h"
#include "gaitenroll/trainer.h"
#include "oracles.h"
#include "test_support.h"

using namespace gaitenroll;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits, one per criterion.
constexpr double kMetricTol = 1e-12;               // AC-1
constexpr double kMetricSeconds = 10.0;            // AC-1
constexpr double kKnnSeconds = 30.0;               // AC-2
constexpr double kGradTol = 1e-6;                  // AC-3
// Central-difference step for the full model. At 1e-6 the ~1e-15 rounding
// noise of the forward pass alone contributes ~1e-9 absolute error, which is
// the same order as the smallest gradients; 1e-5 sits near the optimum
// cbrt(machine epsilon) for central differences.
constexpr double kGradStep = 1e-5;                 // AC-3
constexpr double kGradSeconds = 60.0;              // AC-3
constexpr double kSeparableMcc = 0.90;             // AC-4, AC-5
constexpr double kSeparableAuc = 0.98;             // AC-4
constexpr double kSeparableSeconds = 600.0;        // AC-4
constexpr double kContextMargin = 0.02;            // AC-6
constexpr double kTransferAuc = 0.90;              // AC-7
constexpr double kPermutationTol = 1e-9;           // AC-8

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Model and training settings shared by every trained criterion.
ModelConfig bench_model(std::size_t dim, std::uint64_t seed) {
  ModelConfig c;
  c.input_dim = dim;
  c.d_model = 64;
  c.n_layers = 2;
  c.n_heads = 4;
  c.d_ff = 128;
  c.dropout_rate = 0.1;
  c.k = 8;
  c.scheme = PairingScheme::kPerIdentity;
  c.seed = seed;
  return c;
}

TrainConfig bench_training(std::uint64_t seed) {
  TrainConfig t;
  t.lr = 2e-3;
  t.batch_size = 64;
  t.max_epochs = 40;
  t.patience = 10;
  t.noise_std_rel = 0.05;
  t.episodes_per_epoch = 4;
  t.isometry_aug = true;
  t.seed = seed;
  return t;
}

SynthSpec separable_spec(std::size_t n_ids, std::size_t walks, std::uint64_t seed) {
  SynthSpec s;
  s.n_ids = n_ids;
  s.walks_per_id = walks;
  s.dim = 64;
  s.centroid_scale = 10.0;
  s.sigma = 0.1;
  s.seed = seed;
  return s;
}

// The 60 training identities split 45 / 15 into fitting and validation
// pools; evaluation uses the remaining 40 at 16:4.
struct SeparableSplit {
  Dataset fit_pool, val_pool, eval_pool;
  std::vector<Scenario> train_scenarios;
  Scenario val, eval;
};

SeparableSplit split_benchmark(const Dataset& all, std::uint64_t seed) {
  SeparableSplit s;
  s.fit_pool = select_identities(all, 0, 45);
  s.val_pool = select_identities(all, 45, 60);
  s.eval_pool = select_identities(all, 60, 100);
  const std::vector<IdWalkRatio> ratios{{16, 4}, {16, 4}, {16, 4}, {24, 4}, {12, 4}};
  s.train_scenarios = scenario_grid(s.fit_pool, ratios, ProbeCounts{64, 64}, seed * 100 + 10);
  s.val = make_scenario(s.val_pool, ScenarioSpec{8, 4, 48, 48, seed * 100 + 1});
  // 16 gallery identities with 10 walks leave 96 held-out walks, so the
  // balanced probe set is 96 + 96.
  s.eval = make_scenario(s.eval_pool, ScenarioSpec{16, 4, 96, 96, seed * 100 + 2});
  return s;
}

// ---------------------------------------------------------------------------

Outcome ac1_metrics() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n), decisions(n);
    const bool coarse = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse ? static_cast<double>(rng.below(10)) : rng.normal();
      labels[i] = static_cast<int>(rng.below(2));
      decisions[i] = static_cast<int>(rng.below(2));
    }
    // Both classes present: force two distinct positions.
    const std::size_t pos = rng.below(n);
    labels[pos] = 1;
    labels[(pos + 1 + rng.below(n - 1)) % n] = 0;

    const auto ref = oracle::recount(labels, decisions);
    const Confusion c = confusion(labels, decisions);
    const ScoredLabels sl{scores, labels};
    worst = std::max({worst, std::abs(mcc(c) - oracle::mcc(ref)), std::abs(f1(c) - oracle::f1(ref)),
                      std::abs(roc_auc(sl) - oracle::auc_pairwise(scores, labels)),
                      std::abs(average_precision(sl) - oracle::ap_rank_by_rank(scores, labels))});
  }
  const double worked_mcc = mcc(Confusion{3, 1, 2, 4});
  const double worked_auc = roc_auc(ScoredLabels{{0.9, 0.6, 0.4, 0.2}, {1, 0, 1, 0}});
  const double worked_ap = average_precision(ScoredLabels{{0.9, 0.6, 0.4}, {1, 0, 1}});
  const bool worked = std::abs(worked_mcc - 10.0 / std::sqrt(600.0)) <= kMetricTol &&
                      std::abs(worked_auc - 0.75) <= kMetricTol &&
                      std::abs(worked_ap - 5.0 / 6.0) <= kMetricTol;
  const double secs = seconds_since(start);
  return {worst <= kMetricTol && worked && secs < kMetricSeconds,
          fmt("max |diff| %.3g over 1000 instances; MCC(3,1,2,4)=%.6f AUC=%.6f AP=%.6f; %.2fs", worst,
              worked_mcc, worked_auc, worked_ap, secs)};
}

Outcome ac2_knn() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2002);
  std::size_t mismatches = 0, total_vectors = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(2000);
    const std::size_t dim = 1 + rng.below(64);
    const bool coarse = trial % 3 == 0;  // integer grids force distance ties
    Dataset records;
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddingRecord r;
      r.id = "id" + std::to_string(rng.below(n / 4 + 1));
      r.walk = "w" + std::to_string(i);
      for (std::size_t c = 0; c < dim; ++c) {
        r.vec.push_back(coarse ? static_cast<double>(rng.below(2)) : rng.normal());
      }
      records.push_back(std::move(r));
    }
    total_vectors += n;
    const auto snap = GallerySnapshot::build(records);
    std::vector<double> probe(dim);
    for (double& x : probe) x = coarse ? static_cast<double>(rng.below(2)) : rng.normal();
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 32));
    const auto got = knn(snap, probe, k);
    const auto want = oracle::knn_exhaustive(records, probe, k);
    for (std::size_t i = 0; i < k; ++i) {
      if (got.entries[i].distance != std::get<0>(want[i]) ||
          got.entries[i].record.id != std::get<1>(want[i]) ||
          got.entries[i].record.walk != std::get<2>(want[i])) {
        ++mismatches;
        break;
      }
    }
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < kKnnSeconds,
          fmt("%zu of 500 galleries differ (%zu vectors total); %.2fs", mismatches, total_vectors, secs)};
}

double gradient_error(PairingScheme scheme, double step) {
  const ModelConfig config = fixture::small_config(scheme, 8, 3);
  const EnrollModel model = fixture::randomized(config, 303);
  Rng rng(304);
  std::vector<TokenSequence> batch;
  std::vector<double> labels;
  for (int i = 0; i < 4; ++i) {
    const auto ex = fixture::random_example(rng, config.input_dim, config.k, 2);
    batch.push_back(build_tokens(ex, config.k, scheme));
    labels.push_back(i % 2);
  }
  std::vector<Tensor> params(model.parameters().begin(), model.parameters().end());
  std::vector<ad::Var> leaves;
  for (const Tensor& t : params) leaves.push_back(ad::parameter(t));
  const auto analytic = ad::gradients(
      ad::bce_with_logits(forward_graph(config, leaves, batch, false, nullptr), labels), leaves);
  const auto numeric = oracle::finite_difference(
      [&](const std::vector<Tensor>& p) {
        std::vector<ad::Var> c;
        for (const Tensor& t : p) c.push_back(ad::constant(t));
        return ad::bce_with_logits(forward_graph(config, c, batch, false, nullptr), labels).value().item();
      },
      params, step);
  return oracle::max_relative_error(analytic, numeric);
}

Outcome ac3_gradients() {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  double worst = 0.0;
  for (auto scheme : {PairingScheme::kAdditive, PairingScheme::kPerInstance, PairingScheme::kPerIdentity}) {
    const double e = gradient_error(scheme, kGradStep);
    worst = std::max(worst, e);
    detail += fmt("%s %.2e (h=1e-6: %.2e); ", std::string(scheme_name(scheme)).c_str(), e,
                  gradient_error(scheme, 1e-6));
  }
  const double secs = seconds_since(start);
  return {worst <= kGradTol && secs < kGradSeconds, detail + fmt("%.2fs", secs)};
}

struct SeparableRun {
  ModelEvaluation model;
  BaselineResult baseline;
  double seconds = 0.0;
  std::size_t best_epoch = 0;
};

// Synth, scenarios, training and evaluation of the separable benchmark.
// Shared by AC-4 and AC-5.
const SeparableRun& separable_run() {
  static const SeparableRun run = [] {
    SeparableRun r;
    const auto start = std::chrono::steady_clock::now();
    const Dataset all = gen_synthetic(separable_spec(100, 10, 4));
    const SeparableSplit s = split_benchmark(all, 4);
    const TrainResult trained = train(bench_model(64, 4), s.fit_pool, s.train_scenarios, s.val_pool,
                                      s.val, bench_training(4));
    const ScenarioData eval = materialize(s.eval_pool, s.eval);
    r.model = evaluate_model(trained.best_model, eval);
    r.seconds = seconds_since(start);
    r.best_epoch = trained.best_epoch;
    r.baseline = baseline_fit_eval(materialize(s.val_pool, s.val), eval, BaselineConfig{});
    return r;
  }();
  return run;
}

Outcome ac4_separable() {
  const auto& r = separable_run();
  const auto& m = r.model.report;
  return {m.mcc >= kSeparableMcc && m.auc >= kSeparableAuc && r.seconds <= kSeparableSeconds,
          fmt("eval MCC %.4f AUC %.4f at 0.5 on %zu probes (tp %zu fp %zu fn %zu tn %zu); best epoch %zu; %.1fs",
              m.mcc, m.auc, m.n_probes, m.confusion.tp, m.confusion.fp, m.confusion.fn, m.confusion.tn,
              r.best_epoch, r.seconds)};
}

Outcome ac5_baseline() {
  const auto& b = separable_run().baseline;
  return {b.report.mcc >= kSeparableMcc,
          fmt("min_dist baseline eval MCC %.4f AUC %.4f at tuned threshold %.4f", b.report.mcc,
              b.report.auc, b.tuned.threshold)};
}

Outcome ac6_context() {
  double model_sum = 0.0, base_sum = 0.0;
  std::string detail;
  for (std::uint64_t seed : {61, 62, 63}) {
    SynthSpec spec = separable_spec(100, 10, seed);
    spec.heteroscedastic = true;
    spec.sigma_lo = 0.05 * spec.centroid_scale;
    spec.sigma_hi = 0.6 * spec.centroid_scale;
    const Dataset all = gen_synthetic(spec);
    const SeparableSplit s = split_benchmark(all, seed);
    // Input noise is relative to the gallery mean norm, which the data's own
    // noise already inflates about threefold here.
    TrainConfig tc = bench_training(seed);
    tc.noise_std_rel = 0.005;
    const TrainResult trained =
        train(bench_model(64, seed), s.fit_pool, s.train_scenarios, s.val_pool, s.val, tc);
    const ScenarioData eval = materialize(s.eval_pool, s.eval);
    const double model_mcc = evaluate_model(trained.best_model, eval).report.mcc;
    const double base_mcc =
        baseline_fit_eval(materialize(s.val_pool, s.val), eval, BaselineConfig{}).report.mcc;
    model_sum += model_mcc;
    base_sum += base_mcc;
    detail += fmt("seed %d model %.4f baseline %.4f; ", static_cast<int>(seed), model_mcc, base_mcc);
  }
  const double model_mean = model_sum / 3, base_mean = base_sum / 3;
  return {model_mean >= base_mean - kContextMargin,
          detail + fmt("mean model %.4f baseline %.4f", model_mean, base_mean)};
}

Outcome ac7_transfer() {
  // 64:2 and 8:16 do not fit a 100 x 10 dataset, so the same geometry is
  // drawn at 200 identities x 30 walks.
  const Dataset all = gen_synthetic(separable_spec(200, 30, 7));
  const Dataset fit_pool = select_identities(all, 0, 100);
  const Dataset val_pool = select_identities(all, 100, 120);
  const Dataset eval_pool = select_identities(all, 120, 200);
  const std::vector<IdWalkRatio> ratios{{32, 4}, {32, 4}, {32, 4}};
  const auto train_scenarios = scenario_grid(fit_pool, ratios, ProbeCounts{64, 64}, 710);
  const Scenario val = make_scenario(val_pool, ScenarioSpec{16, 4, 48, 48, 701});
  TrainConfig tc = bench_training(7);
  const TrainResult trained = train(bench_model(64, 7), fit_pool, train_scenarios, val_pool, val, tc);

  bool pass = true;
  std::string detail;
  for (const ScenarioSpec& spec : {ScenarioSpec{8, 16, 100, 100, 702}, ScenarioSpec{64, 2, 100, 100, 703}}) {
    const auto ev = evaluate_model(trained.best_model, materialize(eval_pool, make_scenario(eval_pool, spec)));
    pass = pass && ev.report.auc >= kTransferAuc;
    detail += fmt("%zu:%zu AUC %.4f MCC %.4f; ", spec.gallery_ids, spec.walks_per_id, ev.report.auc,
                  ev.report.mcc);
  }
  return {pass, detail + fmt("trained on 32:4 only, best epoch %zu", trained.best_epoch)};
}

Outcome ac8_permutation() {
  const ModelConfig additive = fixture::small_config(PairingScheme::kAdditive, 8, 6);
  const EnrollModel model = fixture::randomized(additive, 808);
  Rng rng(809);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto ex = fixture::random_example(rng, additive.input_dim, additive.k);
    std::vector<std::size_t> order(additive.k);
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    rng.shuffle(std::span<std::size_t>(order));
    auto shuffled = ex;
    for (std::size_t j = 0; j < order.size(); ++j) {
      shuffled.neighbors.entries[j] = ex.neighbors.entries[order[j]];
      shuffled.neighbor_id_means[j] = ex.neighbor_id_means[order[j]];
    }
    worst = std::max(worst, std::abs(predict(model, shuffled).logit - predict(model, ex).logit));
  }

  // Per-identity layout: neighbor token k and identity token k carry the
  // same position, and that position is shared exactly by same-id neighbors.
  std::size_t violations = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 1 + rng.below(10);
    const auto ex = fixture::random_example(rng, 4, k, 1 + rng.below(4));
    const auto tokens = build_tokens(ex, k, PairingScheme::kPerIdentity);
    if (tokens.length() != 2 * k + 1 || tokens.positions[0] != -1) ++violations;
    for (std::size_t a = 0; a < k; ++a) {
      if (tokens.positions[1 + a] != tokens.positions[1 + k + a]) ++violations;
      for (std::size_t b = 0; b < k; ++b) {
        const bool same_id = ex.neighbors.entries[a].record.id == ex.neighbors.entries[b].record.id;
        const bool same_pos = tokens.positions[1 + a] == tokens.positions[1 + b];
        if (same_id != same_pos) ++violations;
      }
    }
  }
  return {worst <= kPermutationTol && violations == 0,
          fmt("additive max |logit diff| %.3g over 100 shuffles; per-identity structural violations %zu",
              worst, violations)};
}

Outcome ac9_determinism() {
  const fs::path root = fs::temp_directory_path() / "gaitenroll_acceptance_ac9";
  fs::remove_all(root);
  RunConfig config;
  for (const char* kv : {"synth.n_ids=40", "synth.walks_per_id=6", "synth.dim=16", "model.d_model=16",
                         "model.d_ff=32", "model.k=4", "train.max_epochs=3", "train.patience=3",
                         "train.episodes_per_epoch=2", "scenario.pos_probes=12", "scenario.neg_probes=12"}) {
    config.set_assignment(kv);
  }
  auto run_once = [&](const std::string& name) {
    const fs::path dir = root / name;
    const fs::path emb = cmd_synth(config, dir / "data")[0];
    RunConfig train_cfg = config;
    train_cfg.set("scenario.ratios", "8:3,6:3");
    train_cfg.set("scenario.id_end", "24");
    const Paths train_files = cmd_scenario(emb, train_cfg, dir / "train");
    RunConfig val_cfg = config;
    val_cfg.set("scenario.ratios", "5:3");
    val_cfg.set("scenario.id_begin", "24");
    val_cfg.set("scenario.id_end", "32");
    const fs::path val = cmd_scenario(emb, val_cfg, dir / "val")[0];
    RunConfig test_cfg = val_cfg;
    test_cfg.set("scenario.id_begin", "32");
    test_cfg.set("scenario.id_end", "0");
    const fs::path test = cmd_scenario(emb, test_cfg, dir / "test")[0];
    RunConfig fit_cfg = config;
    fit_cfg.set("train.id_end", "24");
    const fs::path ckpt = cmd_train(emb, train_files, val, fit_cfg, dir / "model")[0];
    cmd_eval(emb, test, ckpt, dir / "eval");
    return dir;
  };
  const fs::path a = run_once("a"), b = run_once("b");
  std::size_t compared = 0, differing = 0;
  for (const char* f : {"data/embeddings.jsonl", "model/checkpoint.genr", "model/history.json",
                        "eval/report.json", "eval/scores.csv"}) {
    ++compared;
    if (read_file(a / f) != read_file(b / f)) ++differing;
  }
  const std::string digest = digest_file(a / "model/checkpoint.genr");
  fs::remove_all(root);
  return {differing == 0,
          fmt("%zu of %zu artifacts differ between runs; checkpoint digest %s", differing, compared,
              digest.c_str())};
}

Outcome ac10_formats() {
  Rng rng(1010);
  std::vector<std::string> failures;

  SynthSpec spec = separable_spec(12, 5, 10);
  spec.heteroscedastic = true;
  spec.sigma_lo = 0.3;
  spec.sigma_hi = 2.0;
  Dataset data = gen_synthetic(spec);
  data[0].vec[0] = 0.1 + 0.2;
  data[1].vec[1] = -5e-324;
  data[2].vec[2] = 1.7976931348623157e308;
  data[3].meta = {{"camera", "c1"}, {"frames", 64}};
  const std::string jsonl = format_embeddings(data);
  const Dataset data_back = parse_embeddings(jsonl);
  bool emb_ok = format_embeddings(data_back) == jsonl && data_back.size() == data.size();
  for (std::size_t i = 0; emb_ok && i < data.size(); ++i) {
    emb_ok = data_back[i].vec == data[i].vec && data_back[i].id == data[i].id &&
             data_back[i].walk == data[i].walk && data_back[i].meta == data[i].meta;
  }
  if (!emb_ok) failures.push_back("embeddings");

  const Scenario scenario = make_scenario(data, ScenarioSpec{5, 3, 8, 8, 11});
  const std::string scen_text = format_scenario(scenario);
  const Scenario scen_back = parse_scenario(scen_text);
  if (!(scen_back == scenario) || format_scenario(scen_back) != scen_text) failures.push_back("scenario");

  std::size_t accepted_corrupt = 0;
  for (auto scheme : {PairingScheme::kAdditive, PairingScheme::kPerInstance, PairingScheme::kPerIdentity}) {
    const EnrollModel model = fixture::randomized(fixture::small_config(scheme), rng.next_u64());
    const TrainConfig tc = bench_training(3);
    const std::string bytes = encode_checkpoint(model, tc);
    const Checkpoint back = decode_checkpoint(bytes);
    bool same = encode_checkpoint(back.model, tc) == bytes && bytes.size() == expected_checkpoint_size(model, tc);
    for (std::size_t i = 0; same && i < model.parameters().size(); ++i) {
      same = back.model.parameters()[i] == model.parameters()[i];
    }
    if (!same) failures.push_back("checkpoint " + std::string(scheme_name(scheme)));

    std::vector<std::string> corrupt;
    corrupt.push_back(bytes);
    corrupt.back()[3] ^= 0x20;                          // magic
    corrupt.push_back(bytes.substr(0, bytes.size() - 8));  // truncated payload
    corrupt.push_back(bytes.substr(0, 20));                // truncated metadata
    corrupt.push_back(bytes + std::string(8, '\0'));       // trailing bytes
    corrupt.push_back(bytes);
    corrupt.back()[8] ^= 0x01;                          // metadata length
    std::string wrong_shape = bytes;
    const auto pos = wrong_shape.find("\"d_model\":16");
    if (pos != std::string::npos) wrong_shape.replace(pos, 12, "\"d_model\":17");
    corrupt.push_back(wrong_shape);                     // manifest mismatch
    for (const auto& c : corrupt) {
      try {
        decode_checkpoint(c);
        ++accepted_corrupt;
      } catch (const CheckpointError&) {
      } catch (const std::exception&) {
        ++accepted_corrupt;  // must be reported as a checkpoint error
      }
    }
  }
  if (accepted_corrupt != 0) failures.push_back(fmt("%zu corrupted checkpoints accepted", accepted_corrupt));
  std::string detail = failures.empty() ? "embeddings, scenario and 3 checkpoints round-trip; 18 corruptions rejected"
                                        : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, ac1_metrics},  {2, ac2_knn},          {3, ac3_gradients}, {4, ac4_separable},
      {5, ac5_baseline}, {6, ac6_context},      {7, ac7_transfer},  {8, ac8_permutation},
      {9, ac9_determinism}, {10, ac10_formats}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& [number, run] : criteria) {
    if (!selected.empty() && !selected.contains(number)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("AC-%d %s: %s\n", number, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
