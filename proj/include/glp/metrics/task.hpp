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

#ifndef GLP_METRICS_TASK_HPP_
#define GLP_METRICS_TASK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "glp/metrics/metric.hpp"

namespace glp {

struct Example {
  std::vector<int> tokens;
  // Class id for classification tasks, target value for regression.
  double label = 0.0;

  bool operator==(const Example&) const = default;
};

// A fine-tuning task: labelled data plus the measure used to score it.
//
// Tasks handled by an external evaluator may carry no examples; `locator`
// then tells the evaluator where the data lives.
struct TaskSpec {
  std::string name;
  MetricKind metric = MetricKind::kAccuracy;
  // Number of classes; 0 marks a regression task.
  int num_labels = 2;
  int vocab_size = 0;
  int seq_len = 0;
  std::vector<Example> examples;
  // Seed of the train/validation partition. Fixed per task so every
  // candidate in a search is scored on the same validation subset.
  std::uint64_t split_seed = 0;
  std::string locator;
  // Select by negated validation loss instead of `metric`.
  bool loss_ablation = false;

  bool is_regression() const { return num_labels == 0; }
  // The measure searches maximize: `metric`, or kNegValidationLoss under the
  // loss ablation.
  MetricKind selection_metric() const;

  bool operator==(const TaskSpec&) const = default;
};

// Checks metric/label-space consistency and example shapes. Throws
// InvalidRequest describing the first violation.
void validate(const TaskSpec& task);

// Copy of `task` that selects candidates by validation loss.
TaskSpec with_loss_ablation(TaskSpec task);

}  // namespace glp

#endif  // GLP_METRICS_TASK_HPP_
