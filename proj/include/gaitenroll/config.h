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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gaitenroll/baseline.h"
#include "gaitenroll/enrollnet.h"
#include "gaitenroll/scenario.h"
#include "gaitenroll/synth.h"
#include "gaitenroll/trainer.h"

namespace gaitenroll {

// Flat key=value run configuration covering synth.*, scenario.*, model.*,
// train.* and baseline.* settings. Every key has a default; unknown keys are
// rejected.
class RunConfig {
 public:
  RunConfig();

  // Lines of "key = value"; '#' starts a comment. Errors carry source:line.
  static RunConfig parse(std::string_view text, const std::string& source = "<memory>");
  static RunConfig load(const std::filesystem::path& path);

  // Throws InputError naming the key if it is unknown.
  void set(const std::string& key, const std::string& value);
  // Parses "key=value".
  void set_assignment(const std::string& assignment);
  const std::string& get(const std::string& key) const;

  static const std::vector<std::string>& known_keys();

  // Resolvers validate values and throw InputError naming the key.
  SynthSpec synth_spec() const;
  std::vector<IdWalkRatio> scenario_ratios() const;  // empty: use the default grid
  ProbeCounts scenario_probes() const;
  std::uint64_t scenario_seed() const;
  std::pair<std::size_t, std::size_t> scenario_id_range() const;  // end 0 = all
  ModelConfig model_config(std::size_t input_dim) const;
  TrainConfig train_config() const;
  std::pair<std::size_t, std::size_t> train_id_range() const;
  BaselineConfig baseline_config() const;

  // Canonical "key=value\n" dump of every key, sorted.
  std::string canonical() const;
  std::string digest() const;

 private:
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_count(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

}  // namespace gaitenroll
