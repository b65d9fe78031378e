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

#include "gaitenroll/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gaitenroll/adam.h"
#include "gaitenroll/digest.h"
#include "gaitenroll/metrics.h"

namespace gaitenroll {

namespace {

using Json = nlohmann::ordered_json;

std::set<std::string> scenario_ids(const Scenario& s) {
  std::set<std::string> ids;
  for (const auto& [id, walk] : s.gallery) ids.insert(id);
  for (const auto& p : s.probes) ids.insert(p.id);
  return ids;
}

std::vector<EnrollmentExample> examples_for(const Dataset& dataset, const Scenario& scenario,
                                            std::size_t k) {
  return assemble_examples(materialize(dataset, scenario), k);
}

void perturb(std::vector<double>& v, Rng& rng, double noise_std, double dropout_rate) {
  if (noise_std > 0.0) {
    for (double& x : v) x += noise_std * rng.normal();
  }
  if (dropout_rate > 0.0) {
    for (double& x : v) {
      if (rng.bernoulli(dropout_rate)) x = 0.0;
    }
  }
}

}  // namespace

void validate_train_config(const TrainConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("train config: " + what); };
  if (!(c.lr > 0.0)) fail("lr must be positive");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) fail("betas must lie in [0, 1)");
  if (!(c.eps > 0.0)) fail("eps must be positive");
  if (c.batch_size == 0) fail("batch_size must be positive");
  if (c.max_epochs == 0) fail("max_epochs must be positive");
  if (c.patience == 0 || c.patience > c.max_epochs) fail("patience must lie in [1, max_epochs]");
  if (c.noise_std_rel < 0.0) fail("noise_std_rel must be non-negative");
  if (c.episodes_per_epoch == 0) fail("episodes_per_epoch must be positive");
  if (!(c.pos_weight > 0.0)) fail("pos_weight must be positive");
}

Json model_config_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim}, {"d_model", c.d_model},   {"n_layers", c.n_layers},
          {"n_heads", c.n_heads},     {"d_ff", c.d_ff},         {"dropout_rate", c.dropout_rate},
          {"k", c.k},                 {"scheme", std::string(scheme_name(c.scheme))},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const Json& doc) {
  ModelConfig c;
  c.input_dim = doc.at("input_dim").get<std::size_t>();
  c.d_model = doc.at("d_model").get<std::size_t>();
  c.n_layers = doc.at("n_layers").get<std::size_t>();
  c.n_heads = doc.at("n_heads").get<std::size_t>();
  c.d_ff = doc.at("d_ff").get<std::size_t>();
  c.dropout_rate = doc.at("dropout_rate").get<double>();
  c.k = doc.at("k").get<std::size_t>();
  c.scheme = parse_scheme(doc.at("scheme").get<std::string>());
  c.seed = doc.at("seed").get<std::uint64_t>();
  validate_model_config(c);
  return c;
}

Json train_config_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"eps", c.eps},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"noise_std_rel", c.noise_std_rel},
          {"episodes_per_epoch", c.episodes_per_epoch},
          {"pos_weight", c.pos_weight},
          {"isometry_aug", c.isometry_aug},
          {"seed", c.seed}};
}

std::string train_config_digest(const TrainConfig& config) {
  return digest_string(train_config_json(config).dump());
}

double bce_with_logits(double logit, int label) {
  const double y = static_cast<double>(label);
  return std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
}

EnrollmentExample augment(const EnrollmentExample& example, Rng& rng, double noise_std_rel,
                          double dropout_rate) {
  EnrollmentExample out = example;
  const double noise_std = noise_std_rel * example.gallery_mean_norm;
  perturb(out.probe, rng, noise_std, dropout_rate);
  for (auto& n : out.neighbors.entries) perturb(n.record.vec, rng, noise_std, dropout_rate);
  for (auto& m : out.neighbor_id_means) perturb(m, rng, noise_std, dropout_rate);
  return out;
}

EnrollmentExample random_isometry(const EnrollmentExample& example, Rng& rng) {
  const std::size_t dim = example.probe.size();
  std::vector<std::size_t> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<double> sign(dim);
  for (double& s : sign) s = rng.bernoulli(0.5) ? -1.0 : 1.0;
  auto apply = [&](std::vector<double>& v) {
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = sign[i] * v[perm[i]];
    v = std::move(out);
  };
  EnrollmentExample out = example;
  apply(out.probe);
  for (auto& n : out.neighbors.entries) apply(n.record.vec);
  for (auto& m : out.neighbor_id_means) apply(m);
  return out;
}

std::vector<double> example_logits(const EnrollModel& model,
                                   std::span<const EnrollmentExample> examples) {
  constexpr std::size_t kChunk = 256;
  const auto& config = model.config();
  std::vector<double> out;
  out.reserve(examples.size());
  for (std::size_t begin = 0; begin < examples.size(); begin += kChunk) {
    const std::size_t end = std::min(examples.size(), begin + kChunk);
    std::vector<TokenSequence> batch;
    batch.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(build_tokens(examples[i], config.k, config.scheme));
    }
    const auto logits = forward_logits(model, batch);
    out.insert(out.end(), logits.begin(), logits.end());
  }
  return out;
}

double evaluate_loss(const EnrollModel& model, std::span<const EnrollmentExample> examples,
                     double pos_weight) {
  if (examples.empty()) throw std::invalid_argument("evaluate_loss: no examples");
  const auto logits = example_logits(model, examples);
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const int y = examples[i].label;
    const double weight = 1.0 + (pos_weight - 1.0) * y;
    const double z = logits[i];
    total += (1.0 - y) * z + weight * (std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z))));
  }
  return total / static_cast<double>(examples.size());
}

Json history_json(std::span<const EpochRecord> history) {
  Json out = Json::array();
  for (const auto& h : history) {
    out.push_back({{"epoch", h.epoch},
                   {"examples", h.examples},
                   {"train_loss", h.train_loss},
                   {"val_loss", h.val_loss},
                   {"val_mcc", h.val_mcc},
                   {"val_auc", h.val_auc},
                   {"val_f1", h.val_f1},
                   {"val_ap", h.val_ap},
                   {"improved", h.improved}});
  }
  return out;
}

TrainResult train(const ModelConfig& model_config, const Dataset& pool,
                  std::span<const Scenario> train_scenarios, const Dataset& val_dataset,
                  const Scenario& val_scenario, const TrainConfig& tc) {
  validate_model_config(model_config);
  validate_train_config(tc);
  if (train_scenarios.empty()) throw std::invalid_argument("train: no training scenarios");
  if (!pool.empty() && pool[0].vec.size() != model_config.input_dim) {
    throw std::invalid_argument("train: embeddings have dimension " +
                                std::to_string(pool[0].vec.size()) + ", model expects " +
                                std::to_string(model_config.input_dim));
  }

  std::set<std::string> pool_ids;
  for (const auto& r : pool) pool_ids.insert(r.id);
  for (const auto& id : scenario_ids(val_scenario)) {
    if (pool_ids.contains(id)) {
      throw InputError("train: validation identity " + id + " also appears in the training pool");
    }
  }

  std::vector<EnrollmentExample> fixed;
  for (const auto& s : train_scenarios) {
    auto ex = examples_for(pool, s, model_config.k);
    fixed.insert(fixed.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
  }
  const auto val_examples = examples_for(val_dataset, val_scenario, model_config.k);
  std::vector<int> val_labels;
  for (const auto& e : val_examples) val_labels.push_back(e.label);

  EnrollModel model = EnrollModel::init(model_config);
  AdamState adam({tc.lr, tc.beta1, tc.beta2, tc.eps}, model.parameters());
  Rng rng(tc.seed);

  TrainResult result{model, 0, -std::numeric_limits<double>::infinity(), {}};
  std::size_t since_improvement = 0;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    std::vector<EnrollmentExample> resampled;
    for (std::size_t episode = 1; episode < tc.episodes_per_epoch; ++episode) {
      for (std::size_t s = 0; s < train_scenarios.size(); ++s) {
        ScenarioSpec spec = train_scenarios[s].spec;
        spec.seed = derive_seed(tc.seed, (epoch * tc.episodes_per_epoch + episode) * 1000003 + s);
        auto ex = examples_for(pool, make_scenario(pool, spec), model_config.k);
        resampled.insert(resampled.end(), std::make_move_iterator(ex.begin()),
                         std::make_move_iterator(ex.end()));
      }
    }
    const std::size_t total = fixed.size() + resampled.size();
    auto example_at = [&](std::size_t i) -> const EnrollmentExample& {
      return i < fixed.size() ? fixed[i] : resampled[i - fixed.size()];
    };
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < total; begin += tc.batch_size, ++batch_index) {
      const std::size_t end = std::min(total, begin + tc.batch_size);
      std::vector<TokenSequence> batch;
      std::vector<double> labels;
      batch.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const auto perturbed =
            tc.isometry_aug
                ? augment(random_isometry(example_at(order[i]), rng), rng, tc.noise_std_rel,
                          model_config.dropout_rate)
                : augment(example_at(order[i]), rng, tc.noise_std_rel, model_config.dropout_rate);
        batch.push_back(build_tokens(perturbed, model_config.k, model_config.scheme));
        labels.push_back(static_cast<double>(perturbed.label));
      }
      try {
        std::vector<ad::Var> leaves;
        leaves.reserve(model.parameters().size());
        for (const Tensor& p : model.parameters()) leaves.push_back(ad::parameter(p));
        const ad::Var logits = forward_graph(model_config, leaves, batch, true, &rng);
        const ad::Var loss = ad::bce_with_logits(logits, labels, tc.pos_weight);
        const auto grads = ad::gradients(loss, leaves);
        adam.step(model.parameters(), grads);
        loss_sum += loss.value().item() * static_cast<double>(end - begin);
      } catch (const NumericError& e) {
        throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                               std::to_string(batch_index) + ": " + e.what());
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.examples = total;
    record.train_loss = loss_sum / static_cast<double>(total);
    const auto logits = example_logits(model, val_examples);
    ScoredLabels sl;
    for (double z : logits) sl.scores.push_back(sigmoid(z));
    sl.labels = val_labels;
    const Confusion c = confusion(val_labels, decide(sl.scores, 0.5));
    record.val_mcc = mcc(c);
    record.val_f1 = f1(c);
    record.val_auc = roc_auc(sl);
    record.val_ap = average_precision(sl);
    double val_loss = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) val_loss += bce_with_logits(logits[i], val_labels[i]);
    record.val_loss = val_loss / static_cast<double>(logits.size());

    if (record.val_mcc > result.best_val_mcc) {
      record.improved = true;
      result.best_val_mcc = record.val_mcc;
      result.best_epoch = epoch;
      result.best_model = model;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    result.history.push_back(record);
    if (since_improvement >= tc.patience) break;
  }
  return result;
}

ModelEvaluation evaluate_model(const EnrollModel& model, const ScenarioData& data) {
  const auto examples = assemble_examples(data, model.config().k);
  const auto logits = example_logits(model, examples);
  std::vector<std::string> ids;
  std::vector<std::string> walks;
  std::vector<double> probs;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    ids.push_back(examples[i].probe_id);
    walks.push_back(examples[i].probe_walk);
    probs.push_back(sigmoid(logits[i]));
  }
  ModelEvaluation out;
  out.scores = make_probe_scores(ids, walks, data.labels, probs, 0.5);
  out.report = summarize_scores(out.scores, 0.5);
  out.report.method = "model:" + std::string(scheme_name(model.config().scheme));
  return out;
}

}  // namespace gaitenroll
