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

#include "glp/metrics/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "glp/error.hpp"

namespace glp {
namespace {

struct Confusion {
  double tp = 0, tn = 0, fp = 0, fn = 0;
};

void check_lengths(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b) {
    throw InvalidRequest(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a == 0) throw InvalidRequest(std::string(what) + ": empty input");
}

Confusion binary_confusion(std::span<const int> preds,
                           std::span<const int> golds, std::string_view what) {
  check_lengths(preds.size(), golds.size(), what);
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i];
    const int g = golds[i];
    if ((p != 0 && p != 1) || (g != 0 && g != 1)) {
      throw InvalidRequest(std::string(what) + ": non-binary label at index " +
                           std::to_string(i));
    }
    if (p == 1 && g == 1) {
      c.tp += 1;
    } else if (p == 0 && g == 0) {
      c.tn += 1;
    } else if (p == 1) {
      c.fp += 1;
    } else {
      c.fn += 1;
    }
  }
  return c;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    // Positions i..j-1 share the average of ranks i+1..j.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

}  // namespace

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kAccuracy:
      return "accuracy";
    case MetricKind::kF1:
      return "f1";
    case MetricKind::kMatthewsCorr:
      return "matthews";
    case MetricKind::kSpearmanCorr:
      return "spearman";
    case MetricKind::kNegValidationLoss:
      return "neg_validation_loss";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  for (MetricKind k :
       {MetricKind::kAccuracy, MetricKind::kF1, MetricKind::kMatthewsCorr,
        MetricKind::kSpearmanCorr, MetricKind::kNegValidationLoss}) {
    if (metric_name(k) == name) return k;
  }
  throw InvalidRequest("unknown metric kind '" + std::string(name) + "'");
}

MetricValue accuracy(std::span<const int> preds, std::span<const int> golds) {
  check_lengths(preds.size(), golds.size(), "accuracy");
  std::size_t same = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) same += preds[i] == golds[i];
  return {static_cast<double>(same) / static_cast<double>(preds.size()),
          MetricKind::kAccuracy};
}

MetricValue f1_binary(std::span<const int> preds, std::span<const int> golds) {
  const Confusion c = binary_confusion(preds, golds, "f1_binary");
  const double denom = 2 * c.tp + c.fp + c.fn;
  return {denom == 0 ? 0.0 : 2 * c.tp / denom, MetricKind::kF1};
}

MetricValue matthews_corr(std::span<const int> preds,
                          std::span<const int> golds) {
  const Confusion c = binary_confusion(preds, golds, "matthews_corr");
  const double denom =
      (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn);
  if (denom == 0) return {0.0, MetricKind::kMatthewsCorr};
  const double mcc = (c.tp * c.tn - c.fp * c.fn) / std::sqrt(denom);
  return {std::clamp(mcc, -1.0, 1.0), MetricKind::kMatthewsCorr};
}

MetricValue spearman_corr(std::span<const double> x,
                          std::span<const double> y) {
  check_lengths(x.size(), y.size(), "spearman_corr");
  if (x.size() < 2) throw InvalidRequest("spearman_corr: need at least 2 points");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  // Average ranks always have mean (n + 1) / 2.
  const double mean = 0.5 * (n + 1);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) {
    throw InvalidRequest("spearman_corr: undefined for constant input");
  }
  const double rho = sxy / std::sqrt(sxx * syy);
  return {std::clamp(rho, -1.0, 1.0), MetricKind::kSpearmanCorr};
}

double median_of_runs(std::span<const double> values) {
  if (values.empty()) throw InvalidRequest("median_of_runs: empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

double relative_performance(double pruned_score, double baseline_score) {
  if (baseline_score == 0) {
    throw InvalidRequest("relative_performance: baseline score is zero");
  }
  return 100.0 * pruned_score / baseline_score;
}

}  // namespace glp
