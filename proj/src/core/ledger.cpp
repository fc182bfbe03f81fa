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

#include "glp/core/ledger.hpp"

#include <string>

#include "glp/error.hpp"

namespace glp {

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGreedy:
      return "glp";
    case Algorithm::kTop:
      return "top";
    case Algorithm::kOptimal:
      return "optimal";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kGreedy, Algorithm::kTop, Algorithm::kOptimal}) {
    if (algorithm_name(a) == name) return a;
  }
  throw InvalidRequest("unknown algorithm '" + std::string(name) +
                       "' (expected glp, top or optimal)");
}

std::vector<LayerId> PruneLedger::chain() const {
  std::vector<LayerId> ids;
  ids.reserve(steps.size());
  for (const StepRecord& s : steps) ids.push_back(s.chosen);
  return ids;
}

void validate(const PruneLedger& ledger) {
  if (ledger.schema_version != PruneLedger::kSchemaVersion) {
    throw InvalidRequest("unsupported ledger schema version " +
                         std::to_string(ledger.schema_version));
  }
  const LayerTopology topology(ledger.depth);
  if (ledger.target < 0 || ledger.target >= ledger.depth) {
    throw InvalidRequest("ledger target " + std::to_string(ledger.target) +
                         " must lie in [0, depth)");
  }
  if (static_cast<int>(ledger.steps.size()) > ledger.target) {
    throw InvalidRequest("ledger holds more steps than its target");
  }
  const std::vector<LayerId> chain = ledger.chain();
  (void)topology.kept_after(chain);
  for (std::size_t i = 0; i < ledger.steps.size(); ++i) {
    const StepRecord& step = ledger.steps[i];
    if (step.step_index != static_cast<int>(i) + 1) {
      throw InvalidRequest("ledger step " + std::to_string(i + 1) +
                           " carries index " + std::to_string(step.step_index));
    }
    if (ledger.algorithm == Algorithm::kGreedy &&
        !step.candidates.contains(step.chosen)) {
      throw InvalidRequest("ledger step " + std::to_string(i + 1) +
                           ": chosen layer is not among the candidates");
    }
  }
}

PruneSolution lookup(const PruneLedger& ledger, std::size_t x) {
  const std::size_t have = ledger.steps.size();
  if (x > have) {
    throw InvalidRequest("ledger for task '" + ledger.task_id + "' records " +
                         std::to_string(have) + " pruned layers; extend the " +
                         "search to n >= " + std::to_string(x) +
                         " to look up x = " + std::to_string(x));
  }
  if (ledger.algorithm == Algorithm::kOptimal && x != 0 && x != have) {
    throw InvalidRequest(
        "optimal ledgers hold a single unordered set; only x = 0 or x = " +
        std::to_string(have) + " can be looked up");
  }
  PruneSolution out;
  out.pruned.reserve(x);
  for (std::size_t i = 0; i < x; ++i) out.pruned.push_back(ledger.steps[i].chosen);
  return out;
}

}  // namespace glp
