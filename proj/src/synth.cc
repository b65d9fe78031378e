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

#include "gaitenroll/synth.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gaitenroll/rng.h"

namespace gaitenroll {

namespace {

std::string numbered(char prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, n);
  return buf;
}

}  // namespace

void validate_synth_spec(const SynthSpec& spec) {
  if (spec.n_ids == 0 || spec.walks_per_id == 0 || spec.dim == 0) {
    throw std::invalid_argument("synth: n_ids, walks_per_id and dim must be positive");
  }
  if (!(spec.centroid_scale > 0.0)) throw std::invalid_argument("synth: centroid_scale must be positive");
  if (spec.heteroscedastic) {
    if (spec.sigma_lo < 0.0 || spec.sigma_hi < spec.sigma_lo) {
      throw std::invalid_argument("synth: need 0 <= sigma_lo <= sigma_hi");
    }
  } else if (spec.sigma < 0.0) {
    throw std::invalid_argument("synth: sigma must be non-negative");
  }
}

Dataset gen_synthetic(const SynthSpec& spec) {
  validate_synth_spec(spec);
  Rng rng(spec.seed);
  Dataset out;
  out.reserve(spec.n_ids * spec.walks_per_id);
  std::vector<double> centroid(spec.dim);
  for (std::size_t i = 0; i < spec.n_ids; ++i) {
    double norm = 0.0;
    for (double& c : centroid) {
      c = rng.normal();
      norm += c * c;
    }
    norm = std::sqrt(norm);
    for (double& c : centroid) c *= spec.centroid_scale / norm;
    const double sigma = spec.heteroscedastic
                             ? spec.sigma_lo + (spec.sigma_hi - spec.sigma_lo) * rng.uniform()
                             : spec.sigma;
    const std::string id = numbered('s', i + 1, 4);
    for (std::size_t w = 0; w < spec.walks_per_id; ++w) {
      EmbeddingRecord record{id, numbered('w', w + 1, 3), centroid, {}};
      for (double& x : record.vec) x += sigma * rng.normal();
      if (spec.normalize) {
        const double n = l2_norm(record.vec);
        if (n > 0.0) {
          for (double& x : record.vec) x /= n;
        }
      }
      out.push_back(std::move(record));
    }
  }
  return out;
}

}  // namespace gaitenroll
