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

#ifndef GLP_METRICS_SPLIT_HPP_
#define GLP_METRICS_SPLIT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "glp/metrics/task.hpp"

namespace glp {

struct SplitSpec {
  double validation_fraction = 0.15;
  std::uint64_t seed = 0;
  // Only meaningful for classification tasks.
  bool stratified = true;
};

// Partition of a task's example indices. Both index lists are sorted.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  // Non-fatal conditions, e.g. a fallback to an unstratified split.
  std::vector<std::string> warnings;
};

// Holds out round(fraction * N) examples for validation (per class when
// stratified). Deterministic in (task examples, spec). A class with a single
// example disables stratification and records a warning.
Split split_train_validation(const TaskSpec& task, const SplitSpec& spec);

}  // namespace glp

#endif  // GLP_METRICS_SPLIT_HPP_
