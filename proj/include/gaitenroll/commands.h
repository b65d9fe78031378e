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

#include <filesystem>
#include <string>
#include <vector>

#include "gaitenroll/config.h"

namespace gaitenroll {

// Each command writes its outputs atomically into `out_dir` together with
// manifest.<command>.json (seeds, config digest, input and output digests) and
// returns the paths of the primary outputs.
using Paths = std::vector<std::filesystem::path>;

// -> embeddings.jsonl
Paths cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir);

// -> scenario_<index>_<I>x<W>.json per ratio
Paths cmd_scenario(const std::filesystem::path& embeddings, const RunConfig& config,
                   const std::filesystem::path& out_dir);

// -> checkpoint.genr, history.json
Paths cmd_train(const std::filesystem::path& embeddings, const Paths& train_scenarios,
                const std::filesystem::path& val_scenario, const RunConfig& config,
                const std::filesystem::path& out_dir);

// -> report.json, scores.csv, roc.csv, pr.csv
Paths cmd_eval(const std::filesystem::path& embeddings, const std::filesystem::path& scenario,
               const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir);

// -> baseline_report.json, baseline_scores.csv
Paths cmd_baseline(const std::filesystem::path& embeddings,
                   const std::filesystem::path& val_scenario,
                   const std::filesystem::path& test_scenario, const RunConfig& config,
                   const std::filesystem::path& out_dir);

// -> comparison.csv, comparison.txt
Paths cmd_report(const Paths& reports, const std::filesystem::path& out_dir);

// Entry point of the gaitenroll executable. Returns the process exit code;
// failures print one line "error: <message>" to stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace gaitenroll
