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

#ifndef GLP_ORCHESTRATOR_SCHEDULER_HPP_
#define GLP_ORCHESTRATOR_SCHEDULER_HPP_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "glp/core/oracle.hpp"
#include "glp/core/search.hpp"
#include "glp/metrics/task.hpp"
#include "glp/orchestrator/eval.hpp"
#include "glp/orchestrator/result_cache.hpp"

namespace glp {

// Resolves evaluation requests for one task and oracle through a cache,
// running cache misses on up to `parallelism` threads.
//
// Worker threads only call oracle.evaluate(); the calling thread owns the
// cache and journals each result as it arrives, before anything consumes
// it.
class Scheduler {
 public:
  Scheduler(const ScoreOracle& oracle, const TaskSpec& task, ResultCache& cache,
            int parallelism);

  // One result per request, in request order. Requests sharing a key are
  // evaluated once. Failed trials come back as failed results; an
  // OracleError (or any other exception) from the oracle is rethrown after
  // the other in-flight evaluations finish and are journaled.
  std::vector<EvalResult> run_step(std::span<const EvalRequest> requests);

  EvalRequest request(std::span<const LayerId> kept, std::uint64_t seed) const;

  // Adapter for the search algorithms: one run_step per batch.
  BatchScorer scorer(std::uint64_t seed);

  const TaskSpec& task() const { return task_; }
  const ScoreOracle& oracle() const { return oracle_; }
  int parallelism() const { return parallelism_; }
  // Fresh oracle.evaluate() calls made so far.
  std::size_t oracle_calls() const { return calls_.load(); }

 private:
  const ScoreOracle& oracle_;
  const TaskSpec& task_;
  ResultCache& cache_;
  int parallelism_;
  std::string task_id_;
  std::string fingerprint_;
  std::string hyperparameter_hash_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace glp

#endif  // GLP_ORCHESTRATOR_SCHEDULER_HPP_
