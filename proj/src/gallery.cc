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

#include "gaitenroll/gallery.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <tuple>

#include "gaitenroll/io_util.h"

namespace gaitenroll {

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

EmbeddingRecord parse_record(const std::string& line, const std::string& source,
                             std::size_t line_no) {
  nlohmann::ordered_json obj;
  try {
    obj = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(where(source, line_no) + "invalid JSON: " + e.what());
  }
  if (!obj.is_object()) throw InputError(where(source, line_no) + "expected a JSON object");
  for (const char* field : {"id", "walk", "vec"}) {
    if (!obj.contains(field)) {
      throw InputError(where(source, line_no) + "missing field \"" + field + "\"");
    }
  }
  if (!obj["id"].is_string() || !obj["walk"].is_string()) {
    throw InputError(where(source, line_no) + "\"id\" and \"walk\" must be strings");
  }
  const auto& vec = obj["vec"];
  if (!vec.is_array() || vec.empty()) {
    throw InputError(where(source, line_no) + "\"vec\" must be a non-empty array of numbers");
  }
  EmbeddingRecord record;
  record.id = obj["id"].get<std::string>();
  record.walk = obj["walk"].get<std::string>();
  record.vec.reserve(vec.size());
  for (const auto& v : vec) {
    if (!v.is_number()) {
      throw InputError(where(source, line_no) + "\"vec\" must contain only numbers");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(where(source, line_no) + "non-finite value in \"vec\"");
    record.vec.push_back(x);
  }
  if (obj.contains("meta")) {
    if (!obj["meta"].is_object()) throw InputError(where(source, line_no) + "\"meta\" must be an object");
    record.meta = obj["meta"];
  }
  return record;
}

}  // namespace

void validate_dataset(const Dataset& records) {
  std::set<RecordKey> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.vec.empty()) throw InputError("record " + std::to_string(i) + " has an empty vector");
    if (r.vec.size() != records[0].vec.size()) {
      throw InputError("record " + std::to_string(i) + " (" + r.id + ", " + r.walk +
                       ") has dimension " + std::to_string(r.vec.size()) + ", expected " +
                       std::to_string(records[0].vec.size()));
    }
    for (double x : r.vec) {
      if (!std::isfinite(x)) {
        throw InputError("record (" + r.id + ", " + r.walk + ") has a non-finite value");
      }
    }
    if (!seen.insert(key_of(r)).second) {
      throw InputError("duplicate record (" + r.id + ", " + r.walk + ")");
    }
  }
}

Dataset parse_embeddings(std::string_view text, const std::string& source) {
  Dataset records;
  std::set<RecordKey> seen;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    EmbeddingRecord record = parse_record(line, source, line_no);
    if (records.empty()) {
      dim = record.vec.size();
    } else if (record.vec.size() != dim) {
      throw InputError(where(source, line_no) + "vector has dimension " +
                       std::to_string(record.vec.size()) + ", expected " + std::to_string(dim));
    }
    if (!seen.insert(key_of(record)).second) {
      throw InputError(where(source, line_no) + "duplicate (id, walk) = (" + record.id + ", " +
                       record.walk + ")");
    }
    records.push_back(std::move(record));
  }
  return records;
}

Dataset load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path), path.string());
}

std::string format_embeddings(const Dataset& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["walk"] = r.walk;
    obj["vec"] = r.vec;
    if (!r.meta.is_null()) obj["meta"] = r.meta;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_embeddings(const std::filesystem::path& path, const Dataset& records) {
  write_file_atomic(path, format_embeddings(records));
}

GallerySnapshot GallerySnapshot::build(Dataset records) {
  if (records.empty()) throw InputError("cannot build a gallery from zero records");
  validate_dataset(records);
  GallerySnapshot snap;
  snap.dim_ = records[0].vec.size();
  std::map<std::string, Identity> identities;
  std::set<RecordKey> keys;
  for (const auto& r : records) {
    auto& identity = identities[r.id];
    if (identity.sum.empty()) identity.sum.assign(snap.dim_, 0.0);
    for (std::size_t c = 0; c < snap.dim_; ++c) identity.sum[c] += r.vec[c];
    ++identity.count;
    keys.insert(key_of(r));
    snap.norm_total_ += l2_norm(r.vec);
  }
  for (auto& [id, identity] : identities) snap.finish_identity(identity);
  snap.mean_norm_ = snap.norm_total_ / static_cast<double>(records.size());
  snap.records_ = std::make_shared<const Dataset>(std::move(records));
  snap.identities_ = std::make_shared<const std::map<std::string, Identity>>(std::move(identities));
  snap.keys_ = std::make_shared<const std::set<RecordKey>>(std::move(keys));
  return snap;
}

void GallerySnapshot::finish_identity(Identity& identity) {
  identity.mean.resize(dim_);
  for (std::size_t c = 0; c < dim_; ++c) {
    identity.mean[c] = identity.sum[c] / static_cast<double>(identity.count);
  }
}

GallerySnapshot GallerySnapshot::add_record(EmbeddingRecord record) const {
  if (record.vec.size() != dim_) {
    throw InputError("record (" + record.id + ", " + record.walk + ") has dimension " +
                     std::to_string(record.vec.size()) + ", gallery has " + std::to_string(dim_));
  }
  for (double x : record.vec) {
    if (!std::isfinite(x)) throw InputError("record (" + record.id + ", " + record.walk + ") has a non-finite value");
  }
  if (contains(key_of(record))) {
    throw InputError("duplicate (id, walk) = (" + record.id + ", " + record.walk + ")");
  }
  GallerySnapshot next = *this;
  auto keys = std::make_shared<std::set<RecordKey>>(*keys_);
  keys->insert(key_of(record));
  auto identities = std::make_shared<std::map<std::string, Identity>>(*identities_);
  auto& identity = (*identities)[record.id];
  if (identity.sum.empty()) identity.sum.assign(dim_, 0.0);
  for (std::size_t c = 0; c < dim_; ++c) identity.sum[c] += record.vec[c];
  ++identity.count;
  next.finish_identity(identity);
  next.norm_total_ += l2_norm(record.vec);
  auto records = std::make_shared<Dataset>(*records_);
  records->push_back(std::move(record));
  next.mean_norm_ = next.norm_total_ / static_cast<double>(records->size());
  next.records_ = std::move(records);
  next.identities_ = std::move(identities);
  next.keys_ = std::move(keys);
  return next;
}

std::size_t GallerySnapshot::count(const std::string& id) const {
  auto it = identities_->find(id);
  return it == identities_->end() ? 0 : it->second.count;
}

const std::vector<double>& GallerySnapshot::mean(const std::string& id) const {
  auto it = identities_->find(id);
  if (it == identities_->end()) throw std::out_of_range("unknown identity \"" + id + "\"");
  return it->second.mean;
}

std::vector<std::string> GallerySnapshot::ids() const {
  std::vector<std::string> out;
  out.reserve(identities_->size());
  for (const auto& [id, identity] : *identities_) out.push_back(id);
  return out;
}

double l2_norm(std::span<const double> a) {
  double total = 0.0;
  for (double x : a) total += x * x;
  return std::sqrt(total);
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return std::sqrt(total);
}

NeighborSet knn(const GallerySnapshot& snapshot, std::span<const double> probe, std::size_t k) {
  if (k == 0) throw std::invalid_argument("knn: K must be positive");
  if (k > snapshot.size()) {
    throw std::invalid_argument("knn: K=" + std::to_string(k) + " exceeds gallery size " +
                                std::to_string(snapshot.size()));
  }
  if (probe.size() != snapshot.dim()) {
    throw std::invalid_argument("knn: probe dimension " + std::to_string(probe.size()) +
                                " does not match gallery dimension " +
                                std::to_string(snapshot.dim()));
  }
  const Dataset& records = snapshot.records();
  std::vector<std::pair<double, std::size_t>> scored(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    scored[i] = {l2_distance(probe, records[i].vec), i};
  }
  auto closer = [&records](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    const auto& ra = records[a.second];
    const auto& rb = records[b.second];
    return std::tie(ra.id, ra.walk) < std::tie(rb.id, rb.walk);
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    closer);
  NeighborSet result;
  result.entries.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& r = records[scored[i].second];
    result.entries.push_back({EmbeddingRecord{r.id, r.walk, r.vec, {}}, scored[i].first});
  }
  return result;
}

}  // namespace gaitenroll
