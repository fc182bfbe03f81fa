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

#include "glp/metrics/task.hpp"

#include <cmath>
#include <string>

#include "glp/error.hpp"

namespace glp {

MetricKind TaskSpec::selection_metric() const {
  return loss_ablation ? MetricKind::kNegValidationLoss : metric;
}

void validate(const TaskSpec& task) {
  const std::string where = "task '" + task.name + "': ";
  if (task.name.empty()) throw InvalidRequest("task name is empty");
  if (task.num_labels < 0 || task.num_labels == 1) {
    throw InvalidRequest(where + "num_labels must be 0 (regression) or >= 2");
  }
  switch (task.metric) {
    case MetricKind::kNegValidationLoss:
      throw InvalidRequest(where +
                           "validation loss is only selectable as an ablation");
    case MetricKind::kSpearmanCorr:
      if (!task.is_regression()) {
        throw InvalidRequest(where + "spearman requires a regression task");
      }
      break;
    case MetricKind::kF1:
    case MetricKind::kMatthewsCorr:
      if (task.num_labels != 2) {
        throw InvalidRequest(where + std::string(metric_name(task.metric)) +
                             " requires binary labels");
      }
      break;
    case MetricKind::kAccuracy:
      if (task.is_regression()) {
        throw InvalidRequest(where + "accuracy requires class labels");
      }
      break;
  }
  for (std::size_t i = 0; i < task.examples.size(); ++i) {
    const Example& ex = task.examples[i];
    const std::string at = where + "example " + std::to_string(i) + ": ";
    if (ex.tokens.empty()) throw InvalidRequest(at + "no tokens");
    if (task.seq_len > 0 && static_cast<int>(ex.tokens.size()) > task.seq_len) {
      throw InvalidRequest(at + "longer than seq_len");
    }
    for (int t : ex.tokens) {
      if (t < 0 || (task.vocab_size > 0 && t >= task.vocab_size)) {
        throw InvalidRequest(at + "token " + std::to_string(t) +
                             " outside vocabulary");
      }
    }
    if (!std::isfinite(ex.label)) throw InvalidRequest(at + "non-finite label");
    if (!task.is_regression()) {
      const double c = ex.label;
      if (c != std::floor(c) || c < 0 || c >= task.num_labels) {
        throw InvalidRequest(at + "label outside the class range");
      }
    }
  }
}

TaskSpec with_loss_ablation(TaskSpec task) {
  task.loss_ablation = true;
  return task;
}

}  // namespace glp
