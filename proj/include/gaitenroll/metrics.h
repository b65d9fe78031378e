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
#include <span>
#include <string>
#include <vector>

namespace gaitenroll {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Labels and decisions are 0/1; throws std::invalid_argument on length
// mismatch or values outside {0,1}.
Confusion confusion(std::span<const int> labels, std::span<const int> decisions);

// Matthews correlation; 0 when any marginal is empty.
double mcc(const Confusion& c);
double precision(const Confusion& c);  // 0 when nothing predicted positive
double recall(const Confusion& c);     // 0 when there are no positives
// Harmonic mean of precision and recall; 0 when undefined.
double f1(const Confusion& c);

// Parallel scores and 0/1 labels; non-empty, equal lengths, finite scores.
struct ScoredLabels {
  std::vector<double> scores;
  std::vector<int> labels;

  void validate() const;
  std::size_t positives() const;
  std::size_t negatives() const { return labels.size() - positives(); }
};

// Mann-Whitney AUC with tied pairs counted as one half. Throws
// std::invalid_argument unless both classes are present.
double roc_auc(const ScoredLabels& sl);

// Area under the step PR curve with tied scores grouped into one block:
// sum over blocks of (R_k - R_{k-1}) * P_k. Throws without positives.
double average_precision(const ScoredLabels& sl);

enum class Objective { kMcc, kF1 };
Objective parse_objective(const std::string& name);
std::string objective_name(Objective objective);

// Decision rule shared by the model and the baseline: positive iff score >= threshold.
std::vector<int> decide(std::span<const double> scores, double threshold);

struct ThresholdChoice {
  double threshold = 0.0;
  double value = 0.0;
};

// Sweeps -inf, every midpoint between adjacent distinct scores, and +inf;
// returns the smallest threshold attaining the maximal objective.
ThresholdChoice best_threshold(const ScoredLabels& sl, Objective objective);

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;  // fpr (ROC) or recall (PR)
  double y = 0.0;  // tpr (ROC) or precision (PR)
};

// One point per distinct score, descending; the ROC curve starts at
// (+inf, 0, 0).
std::vector<CurvePoint> roc_curve(const ScoredLabels& sl);
std::vector<CurvePoint> pr_curve(const ScoredLabels& sl);

// "threshold,fpr,tpr" / "threshold,recall,precision".
std::string roc_csv(std::span<const CurvePoint> points);
std::string pr_csv(std::span<const CurvePoint> points);

// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace gaitenroll
