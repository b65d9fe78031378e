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

#include "gaitenroll/enrollnet.h"

#include <cmath>
#include <map>
#include <stdexcept>

namespace gaitenroll {

namespace {

constexpr double kInitStd = 0.02;
constexpr std::size_t kBlockParams = 16;

// Offsets into the parameter manifest.
struct Layout {
  std::size_t input_weight = 0;
  std::size_t input_bias = 1;
  std::size_t positional = 0;  // valid only when the scheme uses positions
  std::size_t first_block = 2;
  std::size_t head = 0;

  explicit Layout(const ModelConfig& config) {
    if (config.uses_positions()) {
      positional = 2;
      first_block = 3;
    }
    head = first_block + kBlockParams * config.n_layers;
  }
  std::size_t block(std::size_t layer, std::size_t slot) const {
    return first_block + kBlockParams * layer + slot;
  }
};

enum BlockSlot : std::size_t {
  kLn1Gain, kLn1Bias, kWq, kBq, kWk, kBk, kWv, kBv, kWo, kBo,
  kLn2Gain, kLn2Bias, kFf1W, kFf1B, kFf2W, kFf2B,
};

bool is_weight(const std::string& name) {
  return name.ends_with(".weight") || name.ends_with(".wq") || name.ends_with(".wk") ||
         name.ends_with(".wv") || name.ends_with(".wo");
}

ad::Var dropout(const ad::Var& x, double rate, bool train, Rng* rng) {
  if (!train || rate <= 0.0) return x;
  Tensor mask(x.shape());
  const double keep_scale = rate >= 1.0 ? 0.0 : 1.0 / (1.0 - rate);
  for (double& m : mask.data()) m = rng->bernoulli(rate) ? 0.0 : keep_scale;
  return ad::mul(x, ad::constant(std::move(mask)));
}

ad::Var linear(const ad::Var& x, const ad::Var& w, const ad::Var& b) {
  return ad::add_bias(ad::matmul(x, w), b);
}

}  // namespace

std::string_view scheme_name(PairingScheme scheme) {
  switch (scheme) {
    case PairingScheme::kAdditive: return "additive";
    case PairingScheme::kPerInstance: return "per_instance";
    case PairingScheme::kPerIdentity: return "per_identity";
  }
  return "unknown";
}

PairingScheme parse_scheme(std::string_view name) {
  if (name == "additive") return PairingScheme::kAdditive;
  if (name == "per_instance") return PairingScheme::kPerInstance;
  if (name == "per_identity") return PairingScheme::kPerIdentity;
  throw std::invalid_argument("unknown pairing scheme \"" + std::string(name) +
                              "\" (expected additive, per_instance or per_identity)");
}

std::size_t ModelConfig::sequence_length() const {
  return uses_positions() ? 2 * k + 1 : k + 1;
}

void validate_model_config(const ModelConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("model config: " + what); };
  if (c.input_dim == 0) fail("input_dim must be positive");
  if (c.d_model < 2) fail("d_model must be >= 2");
  if (c.n_layers == 0) fail("n_layers must be positive");
  if (c.n_heads == 0 || c.d_model % c.n_heads != 0) fail("d_model must be divisible by n_heads");
  if (c.d_ff == 0) fail("d_ff must be positive");
  if (c.k == 0) fail("k must be >= 1");
  if (!(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0)) fail("dropout_rate must lie in [0, 1)");
}

std::vector<ParameterSpec> parameter_manifest(const ModelConfig& c) {
  validate_model_config(c);
  const std::size_t d = c.d_model;
  std::vector<ParameterSpec> out;
  out.push_back({"input_proj.weight", {c.input_dim, d}});
  out.push_back({"input_proj.bias", {1, d}});
  if (c.uses_positions()) out.push_back({"positional", {c.k, d}});
  for (std::size_t l = 0; l < c.n_layers; ++l) {
    const std::string p = "blocks." + std::to_string(l) + ".";
    out.push_back({p + "ln1.gain", {1, d}});
    out.push_back({p + "ln1.bias", {1, d}});
    for (const char* m : {"q", "k", "v", "o"}) {
      out.push_back({p + "attn.w" + m, {d, d}});
      out.push_back({p + "attn.b" + m, {1, d}});
    }
    out.push_back({p + "ln2.gain", {1, d}});
    out.push_back({p + "ln2.bias", {1, d}});
    out.push_back({p + "ff1.weight", {d, c.d_ff}});
    out.push_back({p + "ff1.bias", {1, c.d_ff}});
    out.push_back({p + "ff2.weight", {c.d_ff, d}});
    out.push_back({p + "ff2.bias", {1, d}});
  }
  out.push_back({"head.fc1.weight", {d, d}});
  out.push_back({"head.fc1.bias", {1, d}});
  out.push_back({"head.fc2.weight", {d, 1}});
  out.push_back({"head.fc2.bias", {1, 1}});
  return out;
}

std::size_t parameter_count(const ModelConfig& config) {
  std::size_t n = 0;
  for (const auto& p : parameter_manifest(config)) n += shape_size(p.shape);
  return n;
}

EnrollModel::EnrollModel(ModelConfig config, std::vector<Tensor> params)
    : config_(std::move(config)), params_(std::move(params)) {}

EnrollModel EnrollModel::init(const ModelConfig& config) {
  const auto manifest = parameter_manifest(config);
  Rng rng(config.seed);
  std::vector<Tensor> params;
  params.reserve(manifest.size());
  for (const auto& spec : manifest) {
    Tensor t(spec.shape);
    if (is_weight(spec.name) || spec.name == "positional") {
      for (double& v : t.data()) v = kInitStd * rng.normal();
    } else if (spec.name.ends_with(".gain")) {
      for (double& v : t.data()) v = 1.0;
    }
    params.push_back(std::move(t));
  }
  return EnrollModel(config, std::move(params));
}

EnrollModel EnrollModel::from_parameters(const ModelConfig& config, std::vector<Tensor> params) {
  const auto manifest = parameter_manifest(config);
  if (params.size() != manifest.size()) {
    throw std::invalid_argument("expected " + std::to_string(manifest.size()) +
                                " parameter tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != manifest[i].shape) {
      throw std::invalid_argument("parameter " + manifest[i].name + " has shape " +
                                  shape_string(params[i].shape()) + ", expected " +
                                  shape_string(manifest[i].shape));
    }
    params[i].check_finite(manifest[i].name.c_str());
  }
  return EnrollModel(config, std::move(params));
}

const Tensor& EnrollModel::parameter(std::string_view name) const {
  const auto manifest = parameter_manifest(config_);
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (manifest[i].name == name) return params_[i];
  }
  throw std::out_of_range("no parameter named " + std::string(name));
}

std::vector<int> identity_positions(std::span<const std::string> neighbor_ids) {
  std::map<std::string, int> rank;
  std::vector<int> out;
  out.reserve(neighbor_ids.size());
  for (const auto& id : neighbor_ids) {
    auto [it, inserted] = rank.emplace(id, static_cast<int>(rank.size()));
    out.push_back(it->second);
  }
  return out;
}

TokenSequence build_tokens(const EnrollmentExample& example, std::size_t k, PairingScheme scheme) {
  if (example.neighbors.size() != k || example.neighbor_id_means.size() != k) {
    throw std::invalid_argument("build_tokens: example has " +
                                std::to_string(example.neighbors.size()) + " neighbors and " +
                                std::to_string(example.neighbor_id_means.size()) +
                                " identity means, expected K=" + std::to_string(k));
  }
  const std::size_t dim = example.probe.size();
  const bool positional = scheme != PairingScheme::kAdditive;
  const std::size_t length = positional ? 2 * k + 1 : k + 1;
  TokenSequence seq{Tensor({length, dim}), std::vector<int>(length, -1), 0};
  for (std::size_t c = 0; c < dim; ++c) seq.inputs(0, c) = example.probe[c];

  std::vector<int> pos(k);
  if (scheme == PairingScheme::kPerIdentity) {
    std::vector<std::string> ids;
    for (const auto& n : example.neighbors.entries) ids.push_back(n.record.id);
    pos = identity_positions(ids);
  } else {
    for (std::size_t i = 0; i < k; ++i) pos[i] = static_cast<int>(i);
  }

  for (std::size_t i = 0; i < k; ++i) {
    const auto& g = example.neighbors.entries[i].record.vec;
    const auto& mean = example.neighbor_id_means[i];
    if (g.size() != dim || mean.size() != dim) {
      throw std::invalid_argument("build_tokens: neighbor dimension mismatch");
    }
    if (!positional) {
      for (std::size_t c = 0; c < dim; ++c) seq.inputs(1 + i, c) = g[c] + mean[c];
    } else {
      for (std::size_t c = 0; c < dim; ++c) {
        seq.inputs(1 + i, c) = g[c];
        seq.inputs(1 + k + i, c) = mean[c];
      }
      seq.positions[1 + i] = pos[i];
      seq.positions[1 + k + i] = pos[i];
    }
  }
  return seq;
}

namespace {

// Stacks a batch into inputs [B*T, D] and, for positional schemes, a one-hot
// selector [B*T, K] so that selector * P adds each token's positional row.
struct StackedBatch {
  Tensor inputs;
  Tensor selector;
};

StackedBatch stack_batch(const ModelConfig& config, std::span<const TokenSequence> batch) {
  if (batch.empty()) throw std::invalid_argument("forward: empty batch");
  const std::size_t length = config.sequence_length();
  const std::size_t dim = config.input_dim;
  StackedBatch out;
  std::vector<double> data;
  data.reserve(batch.size() * length * dim);
  for (const auto& seq : batch) {
    if (seq.length() != length || seq.inputs.rows() != length || seq.inputs.cols() != dim) {
      throw std::invalid_argument("forward: token sequence of shape " +
                                  shape_string(seq.inputs.shape()) + " does not match config (" +
                                  std::to_string(length) + " tokens of dim " +
                                  std::to_string(dim) + ")");
    }
    if (seq.probe_index != 0) throw std::invalid_argument("forward: probe must be token 0");
    auto v = seq.inputs.data();
    data.insert(data.end(), v.begin(), v.end());
  }
  out.inputs = Tensor({batch.size() * length, dim}, std::move(data));
  if (config.uses_positions()) {
    out.selector = Tensor({batch.size() * length, config.k});
    for (std::size_t b = 0; b < batch.size(); ++b) {
      for (std::size_t t = 0; t < length; ++t) {
        const int p = batch[b].positions[t];
        if (p < 0) continue;
        if (static_cast<std::size_t>(p) >= config.k) {
          throw std::invalid_argument("forward: positional index out of range");
        }
        out.selector(b * length + t, static_cast<std::size_t>(p)) = 1.0;
      }
    }
  }
  return out;
}

}  // namespace

Tensor embed_tokens(const EnrollModel& model, const TokenSequence& tokens) {
  const auto& config = model.config();
  const Layout layout(config);
  auto params = model.parameters();
  StackedBatch stacked = stack_batch(config, std::span<const TokenSequence>(&tokens, 1));
  Tensor x = matmul(stacked.inputs, params[layout.input_weight]);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) += params[layout.input_bias][c];
  }
  if (config.uses_positions()) {
    Tensor pos = matmul(stacked.selector, params[layout.positional]);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += pos[i];
  }
  return x;
}

ad::Var forward_graph(const ModelConfig& config, std::span<const ad::Var> params,
                      std::span<const TokenSequence> batch, bool train, Rng* rng) {
  const Layout layout(config);
  if (params.size() != layout.head + 4) {
    throw std::invalid_argument("forward: expected " + std::to_string(layout.head + 4) +
                                " parameters, got " + std::to_string(params.size()));
  }
  if (train && config.dropout_rate > 0.0 && rng == nullptr) {
    throw std::invalid_argument("forward: train mode with dropout needs an Rng");
  }
  const std::size_t batch_size = batch.size();
  StackedBatch stacked = stack_batch(config, batch);
  const std::size_t length = config.sequence_length();
  const std::size_t heads = config.n_heads;
  const std::size_t head_dim = config.head_dim();
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  ad::Var x = linear(ad::constant(std::move(stacked.inputs)), params[layout.input_weight],
                     params[layout.input_bias]);
  if (config.uses_positions()) {
    x = ad::add(x, ad::matmul(ad::constant(std::move(stacked.selector)), params[layout.positional]));
  }

  for (std::size_t l = 0; l < config.n_layers; ++l) {
    auto p = [&](std::size_t slot) -> const ad::Var& { return params[layout.block(l, slot)]; };
    const ad::Var h = ad::layer_norm(x, p(kLn1Gain), p(kLn1Bias));
    const ad::Var q = linear(h, p(kWq), p(kBq));
    const ad::Var k = linear(h, p(kWk), p(kBk));
    const ad::Var v = linear(h, p(kWv), p(kBv));
    std::vector<ad::Var> head_outputs;
    head_outputs.reserve(heads);
    for (std::size_t hd = 0; hd < heads; ++hd) {
      const ad::Var qh = ad::slice_cols(q, hd * head_dim, head_dim);
      const ad::Var kh = ad::slice_cols(k, hd * head_dim, head_dim);
      const ad::Var vh = ad::slice_cols(v, hd * head_dim, head_dim);
      std::vector<ad::Var> per_example;
      per_example.reserve(batch_size);
      for (std::size_t b = 0; b < batch_size; ++b) {
        const ad::Var qb = ad::slice_rows(qh, b * length, length);
        const ad::Var kb = ad::slice_rows(kh, b * length, length);
        const ad::Var vb = ad::slice_rows(vh, b * length, length);
        const ad::Var weights =
            ad::softmax_rows(ad::scale(ad::matmul(qb, kb, false, true), attn_scale));
        per_example.push_back(ad::matmul(weights, vb));
      }
      head_outputs.push_back(ad::concat_rows(per_example));
    }
    ad::Var attn = linear(ad::concat_cols(head_outputs), p(kWo), p(kBo));
    x = ad::add(x, dropout(attn, config.dropout_rate, train, rng));

    const ad::Var h2 = ad::layer_norm(x, p(kLn2Gain), p(kLn2Bias));
    ad::Var ff = linear(ad::relu(linear(h2, p(kFf1W), p(kFf1B))), p(kFf2W), p(kFf2B));
    x = ad::add(x, dropout(ff, config.dropout_rate, train, rng));
  }

  std::vector<ad::Var> probe_rows;
  probe_rows.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) probe_rows.push_back(ad::slice_rows(x, b * length, 1));
  const ad::Var readout = batch_size == 1 ? probe_rows[0] : ad::concat_rows(probe_rows);
  const ad::Var hidden =
      ad::relu(linear(readout, params[layout.head], params[layout.head + 1]));
  return linear(hidden, params[layout.head + 2], params[layout.head + 3]);
}

namespace {

std::vector<ad::Var> as_constants(const EnrollModel& model) {
  std::vector<ad::Var> out;
  out.reserve(model.parameters().size());
  for (const Tensor& t : model.parameters()) out.push_back(ad::constant(t));
  return out;
}

}  // namespace

double forward(const EnrollModel& model, const TokenSequence& tokens, bool train_mode, Rng& rng) {
  const auto params = as_constants(model);
  return forward_graph(model.config(), params, std::span<const TokenSequence>(&tokens, 1),
                       train_mode, &rng)
      .value()
      .item();
}

std::vector<double> forward_logits(const EnrollModel& model, std::span<const TokenSequence> batch) {
  if (batch.empty()) return {};
  const auto params = as_constants(model);
  const ad::Var logits = forward_graph(model.config(), params, batch, false, nullptr);
  auto v = logits.value().data();
  return {v.begin(), v.end()};
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Prediction predict(const EnrollModel& model, const EnrollmentExample& example) {
  const auto& config = model.config();
  const TokenSequence tokens = build_tokens(example, config.k, config.scheme);
  Prediction out;
  out.logit = forward_logits(model, std::span<const TokenSequence>(&tokens, 1))[0];
  out.probability = sigmoid(out.logit);
  out.known = out.probability >= 0.5;
  return out;
}

}  // namespace gaitenroll
