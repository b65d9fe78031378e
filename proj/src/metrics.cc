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

#include "gaitenroll/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gaitenroll {

namespace {

struct ScoreGroup {
  double score;
  std::size_t pos = 0;
  std::size_t neg = 0;
};

// Tied scores collapsed into groups, sorted by descending score.
std::vector<ScoreGroup> descending_groups(const ScoredLabels& sl) {
  std::vector<std::size_t> order(sl.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&sl](std::size_t a, std::size_t b) { return sl.scores[a] > sl.scores[b]; });
  std::vector<ScoreGroup> groups;
  for (std::size_t i : order) {
    if (groups.empty() || groups.back().score != sl.scores[i]) groups.push_back({sl.scores[i]});
    (sl.labels[i] == 1 ? groups.back().pos : groups.back().neg) += 1;
  }
  return groups;
}

void require_both_classes(const ScoredLabels& sl, const char* what) {
  sl.validate();
  if (sl.positives() == 0 || sl.negatives() == 0) {
    throw std::invalid_argument(std::string(what) + ": needs both positive and negative labels");
  }
}

double objective_value(Objective objective, const Confusion& c) {
  return objective == Objective::kMcc ? mcc(c) : f1(c);
}

}  // namespace

Confusion confusion(std::span<const int> labels, std::span<const int> decisions) {
  if (labels.size() != decisions.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(labels.size()) + " labels vs " +
                                std::to_string(decisions.size()) + " decisions");
  }
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int d = decisions[i];
    if ((y != 0 && y != 1) || (d != 0 && d != 1)) {
      throw std::invalid_argument("confusion: labels and decisions must be 0 or 1");
    }
    if (y == 1) {
      (d == 1 ? c.tp : c.fn) += 1;
    } else {
      (d == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double mcc(const Confusion& c) {
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double tn = static_cast<double>(c.tn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double precision(const Confusion& c) {
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const Confusion& c) {
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(const Confusion& c) {
  const double p = precision(c);
  const double r = recall(c);
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

void ScoredLabels::validate() const {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scored labels: " + std::to_string(scores.size()) + " scores vs " +
                                std::to_string(labels.size()) + " labels");
  }
  if (scores.empty()) throw std::invalid_argument("scored labels: empty");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("scored labels: label not 0/1");
    if (!std::isfinite(scores[i])) throw std::invalid_argument("scored labels: non-finite score");
  }
}

std::size_t ScoredLabels::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

double roc_auc(const ScoredLabels& sl) {
  require_both_classes(sl, "roc_auc");
  double wins = 0.0;
  double pos_above = 0.0;
  for (const auto& g : descending_groups(sl)) {
    wins += static_cast<double>(g.neg) * (pos_above + 0.5 * static_cast<double>(g.pos));
    pos_above += static_cast<double>(g.pos);
  }
  return wins / (static_cast<double>(sl.positives()) * static_cast<double>(sl.negatives()));
}

double average_precision(const ScoredLabels& sl) {
  sl.validate();
  const double positives = static_cast<double>(sl.positives());
  if (positives == 0.0) throw std::invalid_argument("average_precision: no positive labels");
  double ap = 0.0;
  double tp = 0.0;
  double seen = 0.0;
  double prev_recall = 0.0;
  for (const auto& g : descending_groups(sl)) {
    tp += static_cast<double>(g.pos);
    seen += static_cast<double>(g.pos + g.neg);
    const double r = tp / positives;
    ap += (r - prev_recall) * (tp / seen);
    prev_recall = r;
  }
  return ap;
}

Objective parse_objective(const std::string& name) {
  if (name == "mcc") return Objective::kMcc;
  if (name == "f1") return Objective::kF1;
  throw std::invalid_argument("unknown objective \"" + name + "\" (expected mcc or f1)");
}

std::string objective_name(Objective objective) {
  return objective == Objective::kMcc ? "mcc" : "f1";
}

std::vector<int> decide(std::span<const double> scores, double threshold) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s >= threshold ? 1 : 0);
  return out;
}

ThresholdChoice best_threshold(const ScoredLabels& sl, Objective objective) {
  require_both_classes(sl, "best_threshold");
  auto groups = descending_groups(sl);
  std::reverse(groups.begin(), groups.end());  // ascending scores
  const double inf = std::numeric_limits<double>::infinity();

  // Threshold -inf: everything predicted positive.
  Confusion c{sl.positives(), sl.negatives(), 0, 0};
  ThresholdChoice best{-inf, objective_value(objective, c)};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    // Raising the threshold past groups[i] flips that group to negative.
    c.tp -= groups[i].pos;
    c.fn += groups[i].pos;
    c.fp -= groups[i].neg;
    c.tn += groups[i].neg;
    double t = inf;
    if (i + 1 < groups.size()) {
      t = 0.5 * (groups[i].score + groups[i + 1].score);
      if (!(t > groups[i].score)) t = groups[i + 1].score;
    }
    const double value = objective_value(objective, c);
    if (value > best.value) best = {t, value};
  }
  return best;
}

std::vector<CurvePoint> roc_curve(const ScoredLabels& sl) {
  require_both_classes(sl, "roc_curve");
  const double p = static_cast<double>(sl.positives());
  const double n = static_cast<double>(sl.negatives());
  std::vector<CurvePoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  double tp = 0.0;
  double fp = 0.0;
  for (const auto& g : descending_groups(sl)) {
    tp += static_cast<double>(g.pos);
    fp += static_cast<double>(g.neg);
    out.push_back({g.score, fp / n, tp / p});
  }
  return out;
}

std::vector<CurvePoint> pr_curve(const ScoredLabels& sl) {
  sl.validate();
  const double p = static_cast<double>(sl.positives());
  if (p == 0.0) throw std::invalid_argument("pr_curve: no positive labels");
  std::vector<CurvePoint> out;
  double tp = 0.0;
  double seen = 0.0;
  for (const auto& g : descending_groups(sl)) {
    tp += static_cast<double>(g.pos);
    seen += static_cast<double>(g.pos + g.neg);
    out.push_back({g.score, tp / p, tp / seen});
  }
  return out;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

namespace {

std::string curve_csv(const char* header, std::span<const CurvePoint> points) {
  std::string out = header;
  for (const auto& pt : points) {
    out += format_double(pt.threshold) + "," + format_double(pt.x) + "," + format_double(pt.y) + "\n";
  }
  return out;
}

}  // namespace

std::string roc_csv(std::span<const CurvePoint> points) {
  return curve_csv("threshold,fpr,tpr\n", points);
}

std::string pr_csv(std::span<const CurvePoint> points) {
  return curve_csv("threshold,recall,precision\n", points);
}

}  // namespace gaitenroll
