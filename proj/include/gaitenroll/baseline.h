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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitenroll/gallery.h"
#include "gaitenroll/metrics.h"
#include "gaitenroll/report.h"
#include "gaitenroll/scenario.h"

namespace gaitenroll {

enum class BaselineMode { kMinDist, kMeanKDist };

std::string_view baseline_mode_name(BaselineMode mode);
BaselineMode parse_baseline_mode(std::string_view name);

struct BaselineConfig {
  BaselineMode mode = BaselineMode::kMinDist;
  std::size_t k = 3;  // used by kMeanKDist
  Objective objective = Objective::kMcc;
};

// Negated distance to the gallery: -min distance, or -mean of the k smallest
// distances. Higher means more likely already enrolled.
double baseline_score(const GallerySnapshot& snapshot, std::span<const double> probe,
                      const BaselineConfig& config);

struct BaselineResult {
  EvalReport report;                   // test metrics at the tuned threshold
  ThresholdChoice tuned;               // threshold and objective on validation
  std::vector<ProbeScore> test_scores; // sorted by (id, walk)
};

// Tunes the threshold on validation scores (best_threshold on the configured
// objective) and reports test MCC/F1 at it plus threshold-free AUC/AP.
BaselineResult baseline_fit_eval(const GallerySnapshot& val_gallery,
                                 std::span<const EmbeddingRecord> val_probes,
                                 std::span<const int> val_labels,
                                 const GallerySnapshot& test_gallery,
                                 std::span<const EmbeddingRecord> test_probes,
                                 std::span<const int> test_labels, const BaselineConfig& config);

BaselineResult baseline_fit_eval(const ScenarioData& val, const ScenarioData& test,
                                 const BaselineConfig& config);

}  // namespace gaitenroll
