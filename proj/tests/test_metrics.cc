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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "gaitenroll/metrics.h"
#include "gaitenroll/rng.h"
#include "oracles.h"

using namespace gaitenroll;

namespace {

ScoredLabels sl_of(std::vector<double> scores, std::vector<int> labels) {
  return ScoredLabels{std::move(scores), std::move(labels)};
}

}  // namespace

TEST_CASE("worked metric values") {
  const Confusion c{3, 1, 2, 4};
  CHECK(mcc(c) == doctest::Approx(10.0 / std::sqrt(600.0)).epsilon(1e-15));
  CHECK(std::abs(mcc(c) - 0.408248290463863) < 1e-12);
  CHECK(precision(c) == 0.75);
  CHECK(recall(c) == doctest::Approx(0.6));
  CHECK(std::abs(f1(c) - 2.0 / 3.0) < 1e-12);
  CHECK(roc_auc(sl_of({0.9, 0.6, 0.4, 0.2}, {1, 0, 1, 0})) == 0.75);
  CHECK(std::abs(average_precision(sl_of({0.9, 0.6, 0.4}, {1, 0, 1})) - 5.0 / 6.0) < 1e-12);
}

TEST_CASE("metric edge cases") {
  CHECK(mcc(Confusion{5, 0, 0, 5}) == 1.0);
  CHECK(mcc(Confusion{0, 5, 5, 0}) == -1.0);
  CHECK(mcc(Confusion{5, 5, 0, 0}) == 0.0);
  CHECK(f1(Confusion{0, 3, 3, 3}) == 0.0);
  CHECK(f1(Confusion{4, 0, 0, 1}) == 1.0);
  CHECK(roc_auc(sl_of({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0})) == 1.0);
  CHECK(roc_auc(sl_of({0.5, 0.5, 0.5}, {1, 0, 1})) == 0.5);
  CHECK(average_precision(sl_of({0.5, 0.5, 0.5, 0.5}, {1, 0, 0, 0})) == 0.25);
  CHECK(average_precision(sl_of({3, 2, 1}, {1, 1, 0})) == 1.0);
  CHECK_THROWS(roc_auc(sl_of({0.1, 0.2}, {1, 1})));
  CHECK_THROWS(average_precision(sl_of({0.1, 0.2}, {0, 0})));
  CHECK_THROWS(confusion(std::vector<int>{1, 0}, std::vector<int>{1}));

  const std::vector<int> ones{1, 0};
  const Confusion c = confusion(ones, ones);
  CHECK(c.tp == 1);
  CHECK(c.tn == 1);
}

TEST_CASE("metrics agree with brute-force oracles on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n), decisions(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse scores produce plenty of ties.
      scores[i] = static_cast<double>(rng.below(12)) / 4.0;
      labels[i] = static_cast<int>(rng.below(2));
      decisions[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 1;
    labels[1] = 0;
    const auto ref = oracle::recount(labels, decisions);
    const Confusion c = confusion(labels, decisions);
    CHECK(std::abs(mcc(c) - oracle::mcc(ref)) <= 1e-12);
    CHECK(std::abs(f1(c) - oracle::f1(ref)) <= 1e-12);
    const ScoredLabels sl{scores, labels};
    CHECK(std::abs(roc_auc(sl) - oracle::auc_pairwise(scores, labels)) <= 1e-12);
    CHECK(std::abs(average_precision(sl) - oracle::ap_rank_by_rank(scores, labels)) <= 1e-12);
  }
}

TEST_CASE("average precision matches the oracle on every labeling of 8 distinct scores") {
  const std::vector<double> scores{0.95, 0.9, 0.7, 0.65, 0.4, 0.3, 0.2, 0.05};
  for (unsigned mask = 1; mask < 256; ++mask) {
    std::vector<int> labels(8);
    for (int i = 0; i < 8; ++i) labels[i] = (mask >> i) & 1;
    CHECK(std::abs(average_precision(ScoredLabels{scores, labels}) -
                   oracle::ap_rank_by_rank(scores, labels)) <= 1e-12);
  }
}

TEST_CASE("AUC is invariant to monotone transforms and flips under negation") {
  Rng rng(4);
  std::vector<double> scores(50);
  std::vector<int> labels(50);
  for (int i = 0; i < 50; ++i) {
    scores[i] = rng.normal();
    labels[i] = i % 3 == 0;
  }
  const double base = roc_auc(ScoredLabels{scores, labels});
  std::vector<double> transformed, negated;
  std::vector<int> flipped;
  for (int i = 0; i < 50; ++i) {
    transformed.push_back(std::exp(3 * scores[i]) + 1);
    negated.push_back(-scores[i]);
    flipped.push_back(1 - labels[i]);
  }
  CHECK(std::abs(roc_auc(ScoredLabels{transformed, labels}) - base) <= 1e-12);
  CHECK(std::abs(roc_auc(ScoredLabels{negated, labels}) - (1 - base)) <= 1e-12);
  CHECK(std::abs(roc_auc(ScoredLabels{negated, flipped}) - base) <= 1e-12);
}

TEST_CASE("best_threshold returns the smallest maximizing midpoint") {
  const auto choice = best_threshold(sl_of({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}), Objective::kMcc);
  CHECK(choice.threshold == 0.5);
  CHECK(choice.value == 1.0);
  CHECK_THROWS(best_threshold(sl_of({0.9, 0.8}, {1, 1}), Objective::kMcc));

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(30);
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) {
      scores[i] = static_cast<double>(rng.below(10));
      labels[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 1;
    labels[1] = 0;
    for (auto objective : {Objective::kMcc, Objective::kF1}) {
      const ScoredLabels sl{scores, labels};
      const auto best = best_threshold(sl, objective);
      auto value_at = [&](double t) {
        const auto c = confusion(labels, decide(scores, t));
        return objective == Objective::kMcc ? mcc(c) : f1(c);
      };
      CHECK(value_at(best.threshold) == best.value);
      for (double t = -1.0; t <= 11.0; t += 0.25) CHECK(value_at(t) <= best.value);
    }
  }
}

TEST_CASE("curves and their CSV headers") {
  const ScoredLabels sl = sl_of({0.9, 0.6, 0.4, 0.2}, {1, 0, 1, 0});
  const auto roc = roc_curve(sl);
  CHECK(roc.front().x == 0.0);
  CHECK(roc.front().y == 0.0);
  CHECK(roc.back().x == 1.0);
  CHECK(roc.back().y == 1.0);
  CHECK(roc_csv(roc).rfind("threshold,fpr,tpr\n", 0) == 0);
  CHECK(pr_csv(pr_curve(sl)).rfind("threshold,recall,precision\n", 0) == 0);
}
