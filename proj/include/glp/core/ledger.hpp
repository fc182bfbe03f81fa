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

#ifndef GLP_CORE_LEDGER_HPP_
#define GLP_CORE_LEDGER_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glp/core/topology.hpp"
#include "glp/metrics/metric.hpp"

namespace glp {

enum class Algorithm { kGreedy, kTop, kOptimal };

// "glp", "top" or "optimal".
std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

// One greedy step: every remaining layer was tried on top of the previous
// solution and `chosen` won.
struct StepRecord {
  int step_index = 0;  // 1-based
  // Candidate layer -> selection score of pruning it at this step. Empty for
  // algorithms that do not score per step (top, optimal).
  std::map<LayerId, double> candidates;
  LayerId chosen = -1;
  std::uint64_t seed_used = 0;

  bool operator==(const StepRecord&) const = default;
};

// Score of one pruned subset, ids sorted descending.
struct SubsetScore {
  std::vector<LayerId> pruned;
  double score = 0.0;

  bool operator==(const SubsetScore&) const = default;
};

// The result of a pruning search: the nested chain R_1 < R_2 < ... < R_n
// with the evidence behind every choice.
//
// Optimal searches store their (unordered) set in `steps` sorted descending
// and every evaluated subset in `subsets`.
struct PruneLedger {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  int depth = 0;
  std::string task_id;
  std::string oracle_fingerprint;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kGreedy;
  MetricKind metric = MetricKind::kAccuracy;
  // Number of layers the search was asked to prune.
  int target = 0;
  std::vector<StepRecord> steps;
  std::vector<SubsetScore> subsets;

  // Chosen layer ids in step order.
  std::vector<LayerId> chain() const;
  bool complete() const { return static_cast<int>(steps.size()) == target; }

  bool operator==(const PruneLedger&) const = default;
};

// Checks the structural invariants: distinct in-range chosen ids, chain no
// longer than target < depth, 1-based consecutive step indices and, for
// greedy steps, the chosen id present among the candidates. Throws
// InvalidRequest.
void validate(const PruneLedger& ledger);

// The solution for pruning `x` layers, read from the stored chain without
// any evaluation. Throws InvalidRequest when `x` exceeds the recorded chain,
// with a hint to extend the search.
PruneSolution lookup(const PruneLedger& ledger, std::size_t x);

}  // namespace glp

#endif  // GLP_CORE_LEDGER_HPP_
