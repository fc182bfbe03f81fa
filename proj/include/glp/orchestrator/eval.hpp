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

#ifndef GLP_ORCHESTRATOR_EVAL_HPP_
#define GLP_ORCHESTRATOR_EVAL_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "glp/core/oracle.hpp"
#include "glp/core/topology.hpp"
#include "glp/metrics/task.hpp"

namespace glp {

// Content hash of a task's data, split seed and metric, so that two tasks
// sharing a name never share cached results.
std::string task_identity(const TaskSpec& task);

struct EvalRequest {
  std::string task_id;
  KeptLayers kept;  // ascending
  std::uint64_t seed = 0;
  std::string oracle_fingerprint;
  std::string hyperparameter_hash;

  static EvalRequest make(const TaskSpec& task, std::span<const LayerId> kept,
                          std::uint64_t seed, const ScoreOracle& oracle);

  // Canonical serialization of every field; the cache key.
  std::string key() const;

  bool operator==(const EvalRequest&) const = default;
};

// Throws InvalidRequest unless kept is non-empty, strictly ascending and
// within [0, depth).
void validate(const EvalRequest& request, int depth);

enum class EvalStatus { kOk, kFailed };

std::string_view status_name(EvalStatus status);
EvalStatus parse_status(std::string_view name);

struct EvalResult {
  std::string key;
  EvalStatus status = EvalStatus::kOk;
  // Natural metric of the task; kFailedScore when failed.
  MetricValue metric;
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  std::string detail;

  static EvalResult from(const Evaluation& evaluation, const TaskSpec& task,
                         std::string key, double wall_seconds);

  bool ok() const { return status == EvalStatus::kOk; }
  // Value searches maximize, honouring the task's loss ablation.
  double selection_score(const TaskSpec& task) const;

  bool operator==(const EvalResult&) const;
};

}  // namespace glp

#endif  // GLP_ORCHESTRATOR_EVAL_HPP_
