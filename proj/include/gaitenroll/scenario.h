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
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaitenroll/gallery.h"

namespace gaitenroll {

// Gallery of `gallery_ids` identities holding `walks_per_id` walks each
// (the id:walk ratio), probed by known and novel walks.
struct ScenarioSpec {
  std::size_t gallery_ids = 0;
  std::size_t walks_per_id = 0;
  std::size_t pos_probes = 0;
  std::size_t neg_probes = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

enum class ProbeLabel : int { kNovel = 0, kKnown = 1 };

struct ProbeKey {
  std::string id;
  std::string walk;
  ProbeLabel label = ProbeLabel::kNovel;

  friend bool operator==(const ProbeKey&, const ProbeKey&) = default;
};

struct Scenario {
  ScenarioSpec spec;
  std::uint64_t seed = 0;
  std::vector<RecordKey> gallery;  // sorted by (id, walk)
  std::vector<ProbeKey> probes;    // sorted by (id, walk)

  std::set<std::string> gallery_id_set() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Samples I gallery identities with W walks each; known probes come from the
// held-out walks of gallery identities, novel probes from identities outside
// the gallery. Pure function of (dataset, spec). Throws InputError with
// required vs available counts when the dataset cannot support the spec.
Scenario make_scenario(const Dataset& dataset, const ScenarioSpec& spec);

// Checks disjointness, label consistency and counts.
void validate_scenario(const Scenario& scenario);

std::string format_scenario(const Scenario& scenario);
Scenario parse_scenario(std::string_view text, const std::string& source = "<memory>");
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

struct ProbeCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

using IdWalkRatio = std::pair<std::size_t, std::size_t>;

// One scenario per ratio, seeds base_seed + index.
std::vector<Scenario> scenario_grid(const Dataset& dataset, std::span<const IdWalkRatio> ratios,
                                    ProbeCounts probes, std::uint64_t base_seed);

// {(64,2), (32,4), (16,8), (8,16)} at constant gallery mass, halved until the
// widest ratio leaves a spare identity, and restricted to walk counts the
// dataset can hold out a probe for.
std::vector<IdWalkRatio> default_ratio_grid(std::size_t n_ids, std::size_t min_walks_per_id);

// Restricts a dataset to identities [begin, end) of its sorted identity list.
Dataset select_identities(const Dataset& dataset, std::size_t begin, std::size_t end);

struct EnrollmentExample {
  std::string probe_id;
  std::string probe_walk;
  std::vector<double> probe;
  NeighborSet neighbors;
  std::vector<std::vector<double>> neighbor_id_means;  // aligned with neighbors
  int label = 0;  // 1 = identity already enrolled
  double gallery_mean_norm = 0.0;
};

EnrollmentExample assemble_example(const GallerySnapshot& snapshot, const EmbeddingRecord& probe,
                                   std::size_t k, const std::set<std::string>& gallery_ids);

// Resolves a scenario against its dataset.
struct ScenarioData {
  GallerySnapshot gallery;
  std::vector<EmbeddingRecord> probes;
  std::vector<int> labels;
};

ScenarioData materialize(const Dataset& dataset, const Scenario& scenario);
std::vector<EnrollmentExample> assemble_examples(const ScenarioData& data, std::size_t k);

}  // namespace gaitenroll
