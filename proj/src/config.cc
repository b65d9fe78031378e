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

#include "gaitenroll/config.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "gaitenroll/digest.h"
#include "gaitenroll/io_util.h"

namespace gaitenroll {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> kDefaults = {
      {"synth.n_ids", "100"},
      {"synth.walks_per_id", "10"},
      {"synth.dim", "128"},
      {"synth.centroid_scale", "10"},
      {"synth.sigma", "0.1"},
      {"synth.heteroscedastic", "false"},
      {"synth.sigma_lo", "0"},
      {"synth.sigma_hi", "0"},
      {"synth.normalize", "false"},
      {"synth.seed", "0"},
      {"scenario.ratios", ""},
      {"scenario.pos_probes", "100"},
      {"scenario.neg_probes", "100"},
      {"scenario.seed", "0"},
      {"scenario.id_begin", "0"},
      {"scenario.id_end", "0"},
      {"model.d_model", "128"},
      {"model.n_layers", "2"},
      {"model.n_heads", "4"},
      {"model.d_ff", "256"},
      {"model.dropout_rate", "0.1"},
      {"model.k", "8"},
      {"model.scheme", "per_identity"},
      {"model.seed", "0"},
      {"train.lr", "0.0003"},
      {"train.beta1", "0.9"},
      {"train.beta2", "0.999"},
      {"train.eps", "1e-8"},
      {"train.batch_size", "64"},
      {"train.max_epochs", "30"},
      {"train.patience", "5"},
      {"train.noise_std_rel", "0.05"},
      {"train.episodes_per_epoch", "1"},
      {"train.isometry_aug", "false"},
      {"train.pos_weight", "1"},
      {"train.seed", "0"},
      {"train.id_begin", "0"},
      {"train.id_end", "0"},
      {"baseline.mode", "min_dist"},
      {"baseline.k", "3"},
      {"baseline.objective", "mcc"},
  };
  return kDefaults;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> keys;
    for (const auto& [k, v] : defaults()) keys.push_back(k);
    return keys;
  }();
  return kKeys;
}

RunConfig RunConfig::parse(std::string_view text, const std::string& source) {
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      config.set(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
    } catch (const InputError& e) {
      throw InputError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown config key \"" + key + "\"");
  it->second = value;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InputError("expected key=value, got \"" + assignment + "\"");
  set(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown config key \"" + key + "\"");
  return it->second;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  const std::string& v = get(key);
  std::int64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw InputError("config key " + key + ": expected an integer, got \"" + v + "\"");
  }
  return out;
}

std::size_t RunConfig::get_count(const std::string& key) const {
  const std::int64_t v = get_int(key);
  if (v < 0) throw InputError("config key " + key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw InputError("config key " + key + ": expected an unsigned integer, got \"" + v + "\"");
  }
  return out;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw InputError("config key " + key + ": expected a number, got \"" + v + "\"");
  }
  return out;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InputError("config key " + key + ": expected true or false, got \"" + v + "\"");
}

SynthSpec RunConfig::synth_spec() const {
  SynthSpec s;
  s.n_ids = get_count("synth.n_ids");
  s.walks_per_id = get_count("synth.walks_per_id");
  s.dim = get_count("synth.dim");
  s.centroid_scale = get_double("synth.centroid_scale");
  s.sigma = get_double("synth.sigma");
  s.heteroscedastic = get_bool("synth.heteroscedastic");
  s.sigma_lo = get_double("synth.sigma_lo");
  s.sigma_hi = get_double("synth.sigma_hi");
  s.normalize = get_bool("synth.normalize");
  s.seed = get_u64("synth.seed");
  try {
    validate_synth_spec(s);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return s;
}

std::vector<IdWalkRatio> RunConfig::scenario_ratios() const {
  // "64:2,32:4"
  std::vector<IdWalkRatio> out;
  std::stringstream ss(get("scenario.ratios"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    std::size_t ids = 0;
    std::size_t walks = 0;
    bool ok = colon != std::string::npos;
    if (ok) {
      auto r1 = std::from_chars(item.data(), item.data() + colon, ids);
      auto r2 = std::from_chars(item.data() + colon + 1, item.data() + item.size(), walks);
      ok = r1.ec == std::errc() && r1.ptr == item.data() + colon && r2.ec == std::errc() &&
           r2.ptr == item.data() + item.size() && ids > 0 && walks > 0;
    }
    if (!ok) throw InputError("config key scenario.ratios: bad ratio \"" + item + "\" (expected I:W)");
    out.emplace_back(ids, walks);
  }
  return out;
}

ProbeCounts RunConfig::scenario_probes() const {
  return {get_count("scenario.pos_probes"), get_count("scenario.neg_probes")};
}

std::uint64_t RunConfig::scenario_seed() const { return get_u64("scenario.seed"); }

std::pair<std::size_t, std::size_t> RunConfig::scenario_id_range() const {
  return {get_count("scenario.id_begin"), get_count("scenario.id_end")};
}

ModelConfig RunConfig::model_config(std::size_t input_dim) const {
  ModelConfig c;
  c.input_dim = input_dim;
  c.d_model = get_count("model.d_model");
  c.n_layers = get_count("model.n_layers");
  c.n_heads = get_count("model.n_heads");
  c.d_ff = get_count("model.d_ff");
  c.dropout_rate = get_double("model.dropout_rate");
  c.k = get_count("model.k");
  c.seed = get_u64("model.seed");
  try {
    c.scheme = parse_scheme(get("model.scheme"));
    validate_model_config(c);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  c.lr = get_double("train.lr");
  c.beta1 = get_double("train.beta1");
  c.beta2 = get_double("train.beta2");
  c.eps = get_double("train.eps");
  c.batch_size = get_count("train.batch_size");
  c.max_epochs = get_count("train.max_epochs");
  c.patience = get_count("train.patience");
  c.noise_std_rel = get_double("train.noise_std_rel");
  c.episodes_per_epoch = get_count("train.episodes_per_epoch");
  c.isometry_aug = get_bool("train.isometry_aug");
  c.pos_weight = get_double("train.pos_weight");
  c.seed = get_u64("train.seed");
  try {
    validate_train_config(c);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

std::pair<std::size_t, std::size_t> RunConfig::train_id_range() const {
  return {get_count("train.id_begin"), get_count("train.id_end")};
}

BaselineConfig RunConfig::baseline_config() const {
  BaselineConfig c;
  try {
    c.mode = parse_baseline_mode(get("baseline.mode"));
    c.objective = parse_objective(get("baseline.objective"));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  c.k = get_count("baseline.k");
  if (c.k == 0) throw InputError("config key baseline.k: must be >= 1");
  return c;
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::digest() const { return digest_string(canonical()); }

}  // namespace gaitenroll
