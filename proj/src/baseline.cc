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

#include "gaitenroll/baseline.h"

#include <stdexcept>

namespace gaitenroll {

namespace {

std::vector<double> score_all(const GallerySnapshot& gallery, std::span<const EmbeddingRecord> probes,
                              const BaselineConfig& config) {
  std::vector<double> out;
  out.reserve(probes.size());
  for (const auto& p : probes) out.push_back(baseline_score(gallery, p.vec, config));
  return out;
}

}  // namespace

std::string_view baseline_mode_name(BaselineMode mode) {
  return mode == BaselineMode::kMinDist ? "min_dist" : "mean_k_dist";
}

BaselineMode parse_baseline_mode(std::string_view name) {
  if (name == "min_dist") return BaselineMode::kMinDist;
  if (name == "mean_k_dist") return BaselineMode::kMeanKDist;
  throw std::invalid_argument("unknown baseline mode \"" + std::string(name) +
                              "\" (expected min_dist or mean_k_dist)");
}

double baseline_score(const GallerySnapshot& snapshot, std::span<const double> probe,
                      const BaselineConfig& config) {
  if (snapshot.size() == 0) throw std::invalid_argument("baseline_score: empty gallery");
  if (config.mode == BaselineMode::kMinDist) return -knn(snapshot, probe, 1).entries[0].distance;
  if (config.k == 0) throw std::invalid_argument("baseline_score: k must be >= 1");
  const NeighborSet nearest = knn(snapshot, probe, config.k);
  double total = 0.0;
  for (const auto& n : nearest.entries) total += n.distance;
  return -total / static_cast<double>(config.k);
}

BaselineResult baseline_fit_eval(const GallerySnapshot& val_gallery,
                                 std::span<const EmbeddingRecord> val_probes,
                                 std::span<const int> val_labels,
                                 const GallerySnapshot& test_gallery,
                                 std::span<const EmbeddingRecord> test_probes,
                                 std::span<const int> test_labels, const BaselineConfig& config) {
  ScoredLabels val{score_all(val_gallery, val_probes, config),
                   std::vector<int>(val_labels.begin(), val_labels.end())};
  BaselineResult result;
  result.tuned = best_threshold(val, config.objective);

  const std::vector<double> test_scores = score_all(test_gallery, test_probes, config);
  std::vector<std::string> ids;
  std::vector<std::string> walks;
  for (const auto& p : test_probes) {
    ids.push_back(p.id);
    walks.push_back(p.walk);
  }
  result.test_scores = make_probe_scores(ids, walks, test_labels, test_scores, result.tuned.threshold);
  result.report = summarize_scores(result.test_scores, result.tuned.threshold);
  result.report.method = "baseline:" + std::string(baseline_mode_name(config.mode));
  return result;
}

BaselineResult baseline_fit_eval(const ScenarioData& val, const ScenarioData& test,
                                 const BaselineConfig& config) {
  return baseline_fit_eval(val.gallery, val.probes, val.labels, test.gallery, test.probes,
                           test.labels, config);
}

}  // namespace gaitenroll
