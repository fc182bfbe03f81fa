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

#ifndef GLP_CORE_ORACLE_HPP_
#define GLP_CORE_ORACLE_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "glp/core/topology.hpp"
#include "glp/metrics/metric.hpp"
#include "glp/metrics/task.hpp"

namespace glp {

// Outcome of fine-tuning and scoring one kept-layer set.
struct Evaluation {
  bool ok = true;
  // Value of the task's natural metric.
  double metric = 0.0;
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
  // Free-form diagnostics, mostly for failed trials.
  std::string detail;

  // The value searches maximize for `task`: kFailedScore for failed trials,
  // the negated loss under the loss ablation, `metric` otherwise.
  double selection_score(const TaskSpec& task) const;

  static Evaluation failed(std::string detail);
};

// The performance measure of a pruned model on a task.
//
// Implementations must be deterministic in (kept, task, seed) and safe to
// call from several threads at once. A trial that runs but goes wrong is
// reported through Evaluation::ok; throwing OracleError means the oracle
// itself is unusable and the search must stop.
class ScoreOracle {
 public:
  virtual ~ScoreOracle() = default;

  virtual Evaluation evaluate(std::span<const LayerId> kept,
                              const TaskSpec& task,
                              std::uint64_t seed) const = 0;

  // Short oracle family name, e.g. "toy" or "bridge".
  virtual std::string kind() const = 0;
  // Canonical text of every setting that influences scores.
  virtual std::string hyperparameters() const = 0;

  // kind() plus a hash of kind() and hyperparameters(); keys cached results.
  std::string fingerprint() const;
  // Hash of hyperparameters() alone.
  std::string hyperparameter_hash() const;

  MetricValue score(std::span<const LayerId> kept, const TaskSpec& task,
                    std::uint64_t seed) const;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
// Fixed-width lower-case hex.
std::string to_hex(std::uint64_t value);

}  // namespace glp

#endif  // GLP_CORE_ORACLE_HPP_
