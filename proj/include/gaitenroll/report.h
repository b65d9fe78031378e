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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitenroll/metrics.h"
#include "gaitenroll/scenario.h"

namespace gaitenroll {

// One row of the per-probe score file "id,walk,label,score,decision".
struct ProbeScore {
  std::string id;
  std::string walk;
  int label = 0;
  double score = 0.0;
  int decision = 0;
};

struct EvalReport {
  std::string method;  // "model" or "baseline:<mode>"
  double mcc = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  double ap = 0.0;
  double threshold = 0.5;
  Confusion confusion;
  std::size_t n_probes = 0;
  std::optional<ScenarioSpec> scenario;
  std::string checkpoint_digest;
  std::string config_digest;

  nlohmann::ordered_json to_json() const;
  static EvalReport from_json(const nlohmann::ordered_json& doc);
};

// Fills every metric from per-probe scores; decisions use score >= threshold.
EvalReport summarize_scores(std::span<const ProbeScore> scores, double threshold);

// Sorts by (id, walk) and fills `decision` from the threshold.
std::vector<ProbeScore> make_probe_scores(std::span<const std::string> ids,
                                          std::span<const std::string> walks,
                                          std::span<const int> labels,
                                          std::span<const double> scores, double threshold);

ScoredLabels scored_labels(std::span<const ProbeScore> scores);

std::string scores_csv(std::span<const ProbeScore> scores);
std::vector<ProbeScore> parse_scores_csv(std::string_view text);

std::string format_report(const EvalReport& report);
EvalReport load_report(const std::filesystem::path& path);

// Comparison table of several reports: CSV and a fixed-width text rendering.
std::string comparison_csv(std::span<const EvalReport> reports, std::span<const std::string> names);
std::string comparison_text(std::span<const EvalReport> reports, std::span<const std::string> names);

}  // namespace gaitenroll
