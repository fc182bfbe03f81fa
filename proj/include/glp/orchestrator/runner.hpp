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

#ifndef GLP_ORCHESTRATOR_RUNNER_HPP_
#define GLP_ORCHESTRATOR_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "glp/core/ledger.hpp"
#include "glp/core/topology.hpp"
#include "glp/orchestrator/scheduler.hpp"

namespace glp {

struct ResumePoint {
  PruneLedger ledger;
  // 1-based index of the first step still to run; empty when complete.
  std::optional<int> next_step;
};

// Loads a persisted ledger. Errors as read_ledger().
ResumePoint resume(const std::filesystem::path& ledger_path);

struct RunOptions {
  Algorithm algorithm = Algorithm::kGreedy;
  int n = 1;
  std::uint64_t seed = 0;
  // When set, the ledger is persisted after every greedy step and an
  // existing ledger there is resumed (or extended to a larger n).
  std::optional<std::filesystem::path> ledger_path;
};

// Runs (or resumes) one search through `scheduler`. A ledger found at
// ledger_path must describe the same task, oracle, algorithm, seed and
// depth; otherwise InvalidRequest is thrown rather than mixing runs.
PruneLedger run_search(const LayerTopology& topology, Scheduler& scheduler,
                       const RunOptions& options);

}  // namespace glp

#endif  // GLP_ORCHESTRATOR_RUNNER_HPP_
