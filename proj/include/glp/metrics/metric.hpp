// Copyright 2026 The GLP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GLP_METRICS_METRIC_HPP_
#define GLP_METRICS_METRIC_HPP_

#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace glp {

// Validation measures a pruning search can maximize. kNegValidationLoss is
// the loss-ablation measure and is never a task's natural metric.
enum class MetricKind {
  kAccuracy,
  kF1,
  kMatthewsCorr,
  kSpearmanCorr,
  kNegValidationLoss,
};

std::string_view metric_name(MetricKind kind);
// Inverse of metric_name(). Throws InvalidRequest on unknown names.
MetricKind parse_metric(std::string_view name);

// Score of a pruned model; higher is always better.
struct MetricValue {
  double value = 0.0;
  MetricKind kind = MetricKind::kAccuracy;

  bool operator==(const MetricValue&) const = default;
};

// Score assigned to trials that failed (diverged, timed out). It takes part
// in argmax and always loses.
inline constexpr double kFailedScore = -std::numeric_limits<double>::infinity();

// Fraction of positions where preds and golds agree.
MetricValue accuracy(std::span<const int> preds, std::span<const int> golds);

// Binary F1 with label 1 as the positive class: 2TP / (2TP + FP + FN), or 0
// when the denominator vanishes.
MetricValue f1_binary(std::span<const int> preds, std::span<const int> golds);

// Matthews correlation coefficient for binary labels. Returns 0 when any
// marginal of the confusion matrix is empty.
MetricValue matthews_corr(std::span<const int> preds,
                          std::span<const int> golds);

// Spearman rank correlation; tied values receive their average rank.
// Throws InvalidRequest when either input has zero rank variance.
MetricValue spearman_corr(std::span<const double> x,
                          std::span<const double> y);

// Median; the mean of the two middle values for even counts.
double median_of_runs(std::span<const double> values);

// 100 * pruned / baseline, as a percentage that may exceed 100.
double relative_performance(double pruned_score, double baseline_score);

}  // namespace glp

#endif  // GLP_METRICS_METRIC_HPP_
