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

#include "gaitenroll/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>

#include "gaitenroll/io_util.h"

namespace gaitenroll {

namespace {

using Json = nlohmann::ordered_json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return v;
}

void put_f64(std::string& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64(std::string_view bytes, std::size_t at) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string metadata(const EnrollModel& model, const TrainConfig& train_config) {
  Json doc;
  doc["format_version"] = 1;
  doc["model_config"] = model_config_json(model.config());
  doc["train_config_digest"] = train_config_digest(train_config);
  doc["manifest"] = Json::array();
  for (const auto& p : parameter_manifest(model.config())) {
    doc["manifest"].push_back({{"name", p.name}, {"shape", p.shape}});
  }
  return doc.dump();
}

}  // namespace

std::string encode_checkpoint(const EnrollModel& model, const TrainConfig& train_config) {
  const std::string meta = metadata(model, train_config);
  std::string out(kCheckpointMagic);
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  for (const Tensor& t : model.parameters()) {
    for (double v : t.data()) put_f64(out, v);
  }
  return out;
}

std::size_t expected_checkpoint_size(const EnrollModel& model, const TrainConfig& train_config) {
  return kCheckpointMagic.size() + 4 + metadata(model, train_config).size() +
         8 * parameter_count(model.config());
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  const std::size_t header = kCheckpointMagic.size() + 4;
  if (bytes.size() < header || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw CheckpointError("checkpoint: bad magic (expected GENR0001)");
  }
  const std::uint32_t meta_len = get_u32(bytes, kCheckpointMagic.size());
  if (bytes.size() < header + meta_len) throw CheckpointError("checkpoint: truncated metadata");
  Json meta;
  ModelConfig config;
  try {
    meta = Json::parse(bytes.substr(header, meta_len));
    if (meta.at("format_version").get<int>() != 1) {
      throw CheckpointError("checkpoint: unsupported format version");
    }
    config = model_config_from_json(meta.at("model_config"));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: invalid model config: ") + e.what());
  }
  const auto manifest = parameter_manifest(config);
  const auto& stored = meta.at("manifest");
  if (!stored.is_array() || stored.size() != manifest.size()) {
    throw CheckpointError("checkpoint: manifest mismatch (tensor count)");
  }
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (stored[i].value("name", "") != manifest[i].name ||
        stored[i].value("shape", Shape{}) != manifest[i].shape) {
      throw CheckpointError("checkpoint: manifest mismatch at tensor " + std::to_string(i) + " (" +
                            manifest[i].name + ")");
    }
  }
  std::size_t offset = header + meta_len;
  const std::size_t payload = 8 * parameter_count(config);
  if (bytes.size() < offset + payload) throw CheckpointError("checkpoint: truncated payload");
  if (bytes.size() > offset + payload) throw CheckpointError("checkpoint: trailing bytes after payload");
  std::vector<Tensor> params;
  params.reserve(manifest.size());
  for (const auto& spec : manifest) {
    Tensor t(spec.shape);
    for (double& v : t.data()) {
      v = get_f64(bytes, offset);
      offset += 8;
    }
    params.push_back(std::move(t));
  }
  try {
    return {EnrollModel::from_parameters(config, std::move(params)),
            meta.at("train_config_digest").get<std::string>()};
  } catch (const NumericError& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const EnrollModel& model,
                     const TrainConfig& train_config) {
  write_file_atomic(path, encode_checkpoint(model, train_config));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(read_file(path));
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace gaitenroll
