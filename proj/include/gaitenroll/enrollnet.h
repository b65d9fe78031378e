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
#include <string>
#include <string_view>
#include <vector>

#include "gaitenroll/autodiff.h"
#include "gaitenroll/rng.h"
#include "gaitenroll/scenario.h"
#include "gaitenroll/tensor.h"

namespace gaitenroll {

// How each neighbor token is bound to its identity-mean token.
enum class PairingScheme {
  kAdditive,     // one token per neighbor: g_k + mean(id(g_k)), no positions
  kPerInstance,  // neighbor and mean tokens share positional vector P_k
  kPerIdentity,  // same, but same-identity neighbors share one P entry
};

std::string_view scheme_name(PairingScheme scheme);
PairingScheme parse_scheme(std::string_view name);

struct ModelConfig {
  std::size_t input_dim = 128;
  std::size_t d_model = 128;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 256;
  double dropout_rate = 0.1;
  std::size_t k = 8;
  PairingScheme scheme = PairingScheme::kPerIdentity;
  std::uint64_t seed = 0;

  std::size_t head_dim() const { return d_model / n_heads; }
  // Token count: probe plus K neighbor tokens, plus K identity tokens when
  // the scheme uses positions.
  std::size_t sequence_length() const;
  bool uses_positions() const { return scheme != PairingScheme::kAdditive; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Throws std::invalid_argument naming the offending field.
void validate_model_config(const ModelConfig& config);

struct ParameterSpec {
  std::string name;
  Shape shape;
};

// Parameter manifest in its fixed order.
std::vector<ParameterSpec> parameter_manifest(const ModelConfig& config);
std::size_t parameter_count(const ModelConfig& config);

class EnrollModel {
 public:
  // Weights ~ N(0, 0.02^2), biases 0, layer-norm gains 1, positional table
  // ~ N(0, 0.02^2); deterministic in config.seed.
  static EnrollModel init(const ModelConfig& config);
  // Adopts externally supplied tensors; shapes must match the manifest.
  static EnrollModel from_parameters(const ModelConfig& config, std::vector<Tensor> params);

  const ModelConfig& config() const { return config_; }
  std::span<const Tensor> parameters() const { return params_; }
  std::span<Tensor> parameters() { return params_; }
  const Tensor& parameter(std::string_view name) const;

 private:
  EnrollModel(ModelConfig config, std::vector<Tensor> params);

  ModelConfig config_;
  std::vector<Tensor> params_;
};

// Raw (pre-projection) inputs of one example plus the positional-table row
// bound to each token (-1 = none). Token 0 is always the probe.
struct TokenSequence {
  Tensor inputs;
  std::vector<int> positions;
  std::size_t probe_index = 0;

  std::size_t length() const { return positions.size(); }
};

// First-appearance rank of each id in the list: [A,B,A,C] -> [0,1,0,2].
std::vector<int> identity_positions(std::span<const std::string> neighbor_ids);

// Throws std::invalid_argument when the example does not hold exactly K
// neighbors and aligned identity means.
TokenSequence build_tokens(const EnrollmentExample& example, std::size_t k, PairingScheme scheme);

// Projected tokens with positional vectors added: the encoder's input.
Tensor embed_tokens(const EnrollModel& model, const TokenSequence& tokens);

// Builds the graph for a batch of equal-length sequences and returns logits
// [B,1]. `params` are the model parameters wrapped as graph leaves (constants
// or ad::parameter) in manifest order. Dropout is active only when `train`
// is set, drawing masks from `rng`.
ad::Var forward_graph(const ModelConfig& config, std::span<const ad::Var> params,
                      std::span<const TokenSequence> batch, bool train, Rng* rng);

// Scalar logit for one sequence. Throws NumericError on NaN activations.
double forward(const EnrollModel& model, const TokenSequence& tokens, bool train_mode, Rng& rng);

std::vector<double> forward_logits(const EnrollModel& model, std::span<const TokenSequence> batch);

double sigmoid(double z);

struct Prediction {
  double logit = 0.0;
  double probability = 0.5;
  bool known = true;  // probability >= 0.5: identity already enrolled
};

// Eval mode: no dropout, no noise.
Prediction predict(const EnrollModel& model, const EnrollmentExample& example);

}  // namespace gaitenroll
