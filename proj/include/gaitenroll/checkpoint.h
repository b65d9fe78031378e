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
#include <string>
#include <string_view>

#include "gaitenroll/enrollnet.h"
#include "gaitenroll/trainer.h"

namespace gaitenroll {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout: ASCII "GENR0001", u32 little-endian metadata length, JSON metadata
// (model config, train config digest, tensor manifest), then each tensor as
// little-endian float64 in manifest order.
inline constexpr std::string_view kCheckpointMagic = "GENR0001";

struct Checkpoint {
  EnrollModel model;
  std::string train_config_digest;
};

std::string encode_checkpoint(const EnrollModel& model, const TrainConfig& train_config);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const EnrollModel& model,
                     const TrainConfig& train_config);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Header bytes plus payload bytes, as implied by the manifest.
std::size_t expected_checkpoint_size(const EnrollModel& model, const TrainConfig& train_config);

}  // namespace gaitenroll
