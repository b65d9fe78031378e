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
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gaitenroll {

// Input validation failure. Messages carry file/line context where known.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One walk's embedding. `meta` is carried through I/O untouched.
struct EmbeddingRecord {
  std::string id;
  std::string walk;
  std::vector<double> vec;
  nlohmann::ordered_json meta;
};

using RecordKey = std::pair<std::string, std::string>;
using Dataset = std::vector<EmbeddingRecord>;

inline RecordKey key_of(const EmbeddingRecord& r) { return {r.id, r.walk}; }

// Checks (id, walk) uniqueness, shared dimension, and finiteness.
void validate_dataset(const Dataset& records);

// JSON Lines: {"id": "...", "walk": "...", "vec": [...], "meta": {...}?}.
// Blank lines are skipped; every other malformed line is an InputError
// naming the file and 1-based line number.
Dataset load_embeddings(const std::filesystem::path& path);
Dataset parse_embeddings(std::string_view text, const std::string& source = "<memory>");
std::string format_embeddings(const Dataset& records);
void save_embeddings(const std::filesystem::path& path, const Dataset& records);

// Immutable gallery with per-identity means. add_record returns a new
// snapshot; the original is never modified.
class GallerySnapshot {
 public:
  static GallerySnapshot build(Dataset records);

  GallerySnapshot add_record(EmbeddingRecord record) const;

  const Dataset& records() const { return *records_; }
  std::size_t size() const { return records_->size(); }
  std::size_t dim() const { return dim_; }

  bool contains(const RecordKey& key) const { return keys_->contains(key); }
  bool contains_id(const std::string& id) const { return identities_->contains(id); }
  std::size_t count(const std::string& id) const;
  // Throws std::out_of_range for an unknown id.
  const std::vector<double>& mean(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Mean L2 norm of the gallery vectors.
  double mean_norm() const { return mean_norm_; }

 private:
  struct Identity {
    std::vector<double> sum;
    std::vector<double> mean;
    std::size_t count = 0;
  };

  GallerySnapshot() = default;
  void finish_identity(Identity& identity);

  std::shared_ptr<const Dataset> records_;
  std::shared_ptr<const std::map<std::string, Identity>> identities_;
  std::shared_ptr<const std::set<RecordKey>> keys_;
  std::size_t dim_ = 0;
  double norm_total_ = 0.0;
  double mean_norm_ = 0.0;
};

struct Neighbor {
  EmbeddingRecord record;
  double distance = 0.0;
};

// Exactly K neighbors sorted by ascending distance.
struct NeighborSet {
  std::vector<Neighbor> entries;
  std::size_t size() const { return entries.size(); }
};

double l2_norm(std::span<const double> a);
double l2_distance(std::span<const double> a, std::span<const double> b);

// Exact Euclidean K-NN. Ties in distance are broken by ascending (id, walk),
// so the result does not depend on gallery insertion order.
NeighborSet knn(const GallerySnapshot& snapshot, std::span<const double> probe, std::size_t k);

}  // namespace gaitenroll
