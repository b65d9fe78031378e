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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "gaitenroll/enrollnet.h"
#include "gaitenroll/report.h"
#include "gaitenroll/rng.h"
#include "gaitenroll/scenario.h"

namespace gaitenroll {

struct TrainConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  double noise_std_rel = 0.05;
  // Gallery draws per epoch: the given scenarios plus (n - 1) fresh resamples
  // of their specs from the training pool.
  std::size_t episodes_per_epoch = 1;
  double pos_weight = 1.0;
  // Apply random_isometry to every training example before augment.
  bool isometry_aug = false;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void validate_train_config(const TrainConfig& config);

nlohmann::ordered_json model_config_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json train_config_json(const TrainConfig& config);
std::string train_config_digest(const TrainConfig& config);

// Raised when training produces a non-finite loss or gradient.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerically stable BCE for one logit: max(z,0) - z y + log(1 + exp(-|z|)).
double bce_with_logits(double logit, int label);

// Train-time input perturbation: Gaussian noise with
// std = noise_std_rel * gallery mean norm on probe, neighbor and identity-mean
// vectors, then each coordinate zeroed with probability dropout_rate.
EnrollmentExample augment(const EnrollmentExample& example, Rng& rng, double noise_std_rel,
                          double dropout_rate);

// One random coordinate permutation with random sign flips applied to probe,
// neighbor and identity-mean vectors alike. Distances, neighbor order and
// labels are unchanged.
EnrollmentExample random_isometry(const EnrollmentExample& example, Rng& rng);

// Mean BCE of the model over examples, eval mode.
double evaluate_loss(const EnrollModel& model, std::span<const EnrollmentExample> examples,
                     double pos_weight = 1.0);

// Eval-mode logits for a set of examples.
std::vector<double> example_logits(const EnrollModel& model,
                                   std::span<const EnrollmentExample> examples);

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t examples = 0;
  double train_loss = 0.0;  // mean augmented minibatch loss
  double val_loss = 0.0;
  double val_mcc = 0.0;
  double val_auc = 0.0;
  double val_f1 = 0.0;
  double val_ap = 0.0;
  bool improved = false;
};

nlohmann::ordered_json history_json(std::span<const EpochRecord> history);

struct TrainResult {
  EnrollModel best_model;
  std::size_t best_epoch = 0;
  double best_val_mcc = 0.0;
  std::vector<EpochRecord> history;
};

// Minibatch Adam on mean BCE; validation MCC at probability 0.5 after each
// epoch; keeps the best-validation parameters and stops after `patience`
// epochs without improvement.
//
// `pool` must contain every identity the train scenarios reference and is
// where resampled episodes are drawn from; the validation scenario must not
// share identities with it. `val_dataset` resolves the validation scenario.
TrainResult train(const ModelConfig& model_config, const Dataset& pool,
                  std::span<const Scenario> train_scenarios, const Dataset& val_dataset,
                  const Scenario& val_scenario, const TrainConfig& train_config);

struct ModelEvaluation {
  EvalReport report;               // threshold 0.5 on probability
  std::vector<ProbeScore> scores;  // probability per probe, sorted by (id, walk)
};

// Scores every probe of a resolved scenario in eval mode.
ModelEvaluation evaluate_model(const EnrollModel& model, const ScenarioData& data);

}  // namespace gaitenroll
