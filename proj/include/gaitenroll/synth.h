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

#include "gaitenroll/gallery.h"

namespace gaitenroll {

struct SynthSpec {
  std::size_t n_ids = 100;
  std::size_t walks_per_id = 10;
  std::size_t dim = 128;
  double centroid_scale = 10.0;  // norm of every identity centroid
  double sigma = 0.1;            // per-coordinate walk noise when not heteroscedastic
  bool heteroscedastic = false;  // draw sigma per identity from [sigma_lo, sigma_hi]
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  bool normalize = false;        // L2-normalize each walk vector
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument for counts or scales that are not positive.
void validate_synth_spec(const SynthSpec& spec);

// Identity-clustered embeddings: centroids are Gaussian directions scaled to
// norm `centroid_scale`; each walk is centroid + N(0, sigma_id^2 I). Ids are
// "s0001".., walks "w001"..; output is a pure function of the spec.
Dataset gen_synthetic(const SynthSpec& spec);

}  // namespace gaitenroll
