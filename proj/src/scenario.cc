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

#include "gaitenroll/scenario.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "gaitenroll/io_util.h"
#include "gaitenroll/rng.h"

namespace gaitenroll {

namespace {

using Json = nlohmann::ordered_json;

std::map<std::string, std::vector<std::string>> walks_by_id(const Dataset& dataset) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& r : dataset) out[r.id].push_back(r.walk);
  for (auto& [id, walks] : out) std::sort(walks.begin(), walks.end());
  return out;
}

std::string spec_string(const ScenarioSpec& spec) {
  return std::to_string(spec.gallery_ids) + ":" + std::to_string(spec.walks_per_id);
}

template <typename T>
std::vector<T> take_shuffled(std::vector<T> pool, std::size_t n, Rng& rng) {
  rng.shuffle(std::span<T>(pool));
  pool.resize(n);
  return pool;
}

bool probe_less(const ProbeKey& a, const ProbeKey& b) {
  return std::tie(a.id, a.walk) < std::tie(b.id, b.walk);
}

}  // namespace

std::set<std::string> Scenario::gallery_id_set() const {
  std::set<std::string> ids;
  for (const auto& [id, walk] : gallery) ids.insert(id);
  return ids;
}

Scenario make_scenario(const Dataset& dataset, const ScenarioSpec& spec) {
  if (spec.gallery_ids == 0 || spec.walks_per_id == 0) {
    throw InputError("scenario " + spec_string(spec) + ": identities and walks per id must be >= 1");
  }
  const auto by_id = walks_by_id(dataset);
  const std::size_t needed_walks = spec.walks_per_id + (spec.pos_probes > 0 ? 1 : 0);
  std::vector<std::string> eligible;
  for (const auto& [id, walks] : by_id) {
    if (walks.size() >= needed_walks) eligible.push_back(id);
  }
  if (eligible.size() < spec.gallery_ids) {
    throw InputError("scenario " + spec_string(spec) + ": requires " +
                     std::to_string(spec.gallery_ids) + " identities with >= " +
                     std::to_string(needed_walks) + " walks, dataset has " +
                     std::to_string(eligible.size()));
  }
  if (spec.neg_probes > 0 && by_id.size() < spec.gallery_ids + 1) {
    throw InputError("scenario " + spec_string(spec) + ": novel probes require " +
                     std::to_string(spec.gallery_ids + 1) + " identities, dataset has " +
                     std::to_string(by_id.size()));
  }

  Rng rng(spec.seed);
  auto chosen = take_shuffled(eligible, spec.gallery_ids, rng);
  std::sort(chosen.begin(), chosen.end());
  const std::set<std::string> chosen_set(chosen.begin(), chosen.end());

  Scenario scenario;
  scenario.spec = spec;
  scenario.seed = spec.seed;
  std::vector<RecordKey> known_pool;
  for (const auto& id : chosen) {
    auto walks = by_id.at(id);
    rng.shuffle(std::span<std::string>(walks));
    for (std::size_t i = 0; i < walks.size(); ++i) {
      if (i < spec.walks_per_id) {
        scenario.gallery.emplace_back(id, walks[i]);
      } else {
        known_pool.emplace_back(id, walks[i]);
      }
    }
  }
  std::vector<RecordKey> novel_pool;
  for (const auto& [id, walks] : by_id) {
    if (chosen_set.contains(id)) continue;
    for (const auto& w : walks) novel_pool.emplace_back(id, w);
  }
  if (known_pool.size() < spec.pos_probes) {
    throw InputError("scenario " + spec_string(spec) + ": requires " +
                     std::to_string(spec.pos_probes) + " known probes, only " +
                     std::to_string(known_pool.size()) + " held-out walks available");
  }
  if (novel_pool.size() < spec.neg_probes) {
    throw InputError("scenario " + spec_string(spec) + ": requires " +
                     std::to_string(spec.neg_probes) + " novel probes, only " +
                     std::to_string(novel_pool.size()) + " walks of non-gallery identities");
  }
  for (auto& [id, walk] : take_shuffled(known_pool, spec.pos_probes, rng)) {
    scenario.probes.push_back({id, walk, ProbeLabel::kKnown});
  }
  for (auto& [id, walk] : take_shuffled(novel_pool, spec.neg_probes, rng)) {
    scenario.probes.push_back({id, walk, ProbeLabel::kNovel});
  }
  std::sort(scenario.gallery.begin(), scenario.gallery.end());
  std::sort(scenario.probes.begin(), scenario.probes.end(), probe_less);
  return scenario;
}

void validate_scenario(const Scenario& scenario) {
  const auto ids = scenario.gallery_id_set();
  const std::set<RecordKey> gallery(scenario.gallery.begin(), scenario.gallery.end());
  if (gallery.size() != scenario.gallery.size()) throw InputError("scenario: duplicate gallery entry");
  std::size_t known = 0;
  std::set<RecordKey> probes;
  for (const auto& p : scenario.probes) {
    if (gallery.contains({p.id, p.walk})) {
      throw InputError("scenario: probe (" + p.id + ", " + p.walk + ") is also in the gallery");
    }
    if (!probes.insert({p.id, p.walk}).second) {
      throw InputError("scenario: duplicate probe (" + p.id + ", " + p.walk + ")");
    }
    const bool in_gallery = ids.contains(p.id);
    if (in_gallery != (p.label == ProbeLabel::kKnown)) {
      throw InputError("scenario: probe (" + p.id + ", " + p.walk + ") label disagrees with gallery membership");
    }
    known += in_gallery ? 1 : 0;
  }
  const auto& s = scenario.spec;
  if (ids.size() != s.gallery_ids || scenario.gallery.size() != s.gallery_ids * s.walks_per_id ||
      known != s.pos_probes || scenario.probes.size() - known != s.neg_probes) {
    throw InputError("scenario: contents do not match spec " + spec_string(s));
  }
}

std::string format_scenario(const Scenario& scenario) {
  Json doc;
  const auto& s = scenario.spec;
  doc["spec"] = {{"gallery_ids", s.gallery_ids},
                 {"walks_per_id", s.walks_per_id},
                 {"pos_probes", s.pos_probes},
                 {"neg_probes", s.neg_probes},
                 {"seed", s.seed}};
  doc["seed"] = scenario.seed;
  doc["gallery"] = Json::array();
  for (const auto& [id, walk] : scenario.gallery) doc["gallery"].push_back({{"id", id}, {"walk", walk}});
  doc["probes"] = Json::array();
  for (const auto& p : scenario.probes) {
    doc["probes"].push_back({{"id", p.id}, {"walk", p.walk}, {"label", static_cast<int>(p.label)}});
  }
  return doc.dump(1) + "\n";
}

Scenario parse_scenario(std::string_view text, const std::string& source) {
  Scenario scenario;
  try {
    const Json doc = Json::parse(text);
    const auto& s = doc.at("spec");
    scenario.spec.gallery_ids = s.at("gallery_ids").get<std::size_t>();
    scenario.spec.walks_per_id = s.at("walks_per_id").get<std::size_t>();
    scenario.spec.pos_probes = s.at("pos_probes").get<std::size_t>();
    scenario.spec.neg_probes = s.at("neg_probes").get<std::size_t>();
    scenario.spec.seed = s.at("seed").get<std::uint64_t>();
    scenario.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& g : doc.at("gallery")) {
      scenario.gallery.emplace_back(g.at("id").get<std::string>(), g.at("walk").get<std::string>());
    }
    for (const auto& p : doc.at("probes")) {
      const int label = p.at("label").get<int>();
      if (label != 0 && label != 1) throw InputError("probe label must be 0 or 1");
      scenario.probes.push_back({p.at("id").get<std::string>(), p.at("walk").get<std::string>(),
                                 static_cast<ProbeLabel>(label)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source + ": malformed scenario: " + e.what());
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
  try {
    validate_scenario(scenario);
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
  return scenario;
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  write_file_atomic(path, format_scenario(scenario));
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.string());
}

std::vector<Scenario> scenario_grid(const Dataset& dataset, std::span<const IdWalkRatio> ratios,
                                    ProbeCounts probes, std::uint64_t base_seed) {
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    ScenarioSpec spec{ratios[i].first, ratios[i].second, probes.pos, probes.neg, base_seed + i};
    try {
      out.push_back(make_scenario(dataset, spec));
    } catch (const InputError& e) {
      throw InputError("infeasible ratio " + spec_string(spec) + ": " + e.what());
    }
  }
  return out;
}

std::vector<IdWalkRatio> default_ratio_grid(std::size_t n_ids, std::size_t min_walks_per_id) {
  std::size_t mass = 128;
  while (mass > 2 && mass / 2 + 1 > n_ids) mass /= 2;
  std::vector<IdWalkRatio> grid;
  for (std::size_t walks : {2, 4, 8, 16}) {
    if (walks > mass || walks + 1 > min_walks_per_id) continue;
    const std::size_t ids = mass / walks;
    if (ids + 1 > n_ids) continue;
    grid.emplace_back(ids, walks);
  }
  return grid;
}

Dataset select_identities(const Dataset& dataset, std::size_t begin, std::size_t end) {
  std::set<std::string> all;
  for (const auto& r : dataset) all.insert(r.id);
  if (begin > end || end > all.size()) {
    throw InputError("identity range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") outside dataset with " + std::to_string(all.size()) + " identities");
  }
  std::vector<std::string> sorted(all.begin(), all.end());
  const std::set<std::string> keep(sorted.begin() + static_cast<std::ptrdiff_t>(begin),
                                   sorted.begin() + static_cast<std::ptrdiff_t>(end));
  Dataset out;
  for (const auto& r : dataset) {
    if (keep.contains(r.id)) out.push_back(r);
  }
  return out;
}

EnrollmentExample assemble_example(const GallerySnapshot& snapshot, const EmbeddingRecord& probe,
                                   std::size_t k, const std::set<std::string>& gallery_ids) {
  if (snapshot.contains(key_of(probe))) {
    throw InputError("probe (" + probe.id + ", " + probe.walk + ") is part of the gallery");
  }
  EnrollmentExample example;
  example.probe_id = probe.id;
  example.probe_walk = probe.walk;
  example.probe = probe.vec;
  example.neighbors = knn(snapshot, probe.vec, k);
  example.neighbor_id_means.reserve(k);
  for (const auto& n : example.neighbors.entries) {
    example.neighbor_id_means.push_back(snapshot.mean(n.record.id));
  }
  example.label = gallery_ids.contains(probe.id) ? 1 : 0;
  example.gallery_mean_norm = snapshot.mean_norm();
  return example;
}

ScenarioData materialize(const Dataset& dataset, const Scenario& scenario) {
  std::map<RecordKey, const EmbeddingRecord*> index;
  for (const auto& r : dataset) index[key_of(r)] = &r;
  auto lookup = [&index](const std::string& id, const std::string& walk) -> const EmbeddingRecord& {
    auto it = index.find({id, walk});
    if (it == index.end()) {
      throw InputError("scenario references (" + id + ", " + walk + ") missing from the embeddings");
    }
    return *it->second;
  };
  Dataset gallery;
  gallery.reserve(scenario.gallery.size());
  for (const auto& [id, walk] : scenario.gallery) gallery.push_back(lookup(id, walk));
  ScenarioData data{GallerySnapshot::build(std::move(gallery)), {}, {}};
  for (const auto& p : scenario.probes) {
    data.probes.push_back(lookup(p.id, p.walk));
    data.labels.push_back(static_cast<int>(p.label));
  }
  return data;
}

std::vector<EnrollmentExample> assemble_examples(const ScenarioData& data, std::size_t k) {
  std::set<std::string> ids;
  for (const auto& id : data.gallery.ids()) ids.insert(id);
  std::vector<EnrollmentExample> out;
  out.reserve(data.probes.size());
  for (const auto& probe : data.probes) out.push_back(assemble_example(data.gallery, probe, k, ids));
  return out;
}

}  // namespace gaitenroll
