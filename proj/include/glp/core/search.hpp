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

#ifndef GLP_CORE_SEARCH_HPP_
#define GLP_CORE_SEARCH_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glp/core/ledger.hpp"
#include "glp/core/oracle.hpp"
#include "glp/core/topology.hpp"

namespace glp {

// Scores a batch of kept-layer sets; result i belongs to batch[i]. Failed
// trials map to kFailedScore. Throws OracleError if the batch cannot be
// scored at all.
using BatchScorer =
    std::function<std::vector<double>(std::span<const KeptLayers> batch)>;

// Called after each completed step with the updated ledger.
using StepCallback = std::function<void(const PruneLedger&)>;

// Evaluates one request at a time through `oracle`.
BatchScorer sequential_scorer(const ScoreOracle& oracle, const TaskSpec& task,
                              std::uint64_t seed);

// Prunes the n highest layers, highest first. Task independent.
PruneSolution top_layer_prune(const LayerTopology& topology, int n);

// Binomial coefficient; exact for the depths a layer search can afford.
std::uint64_t binomial(int n, int k);

// Walks the n-element subsets of a topology in lexicographic order of their
// sorted ids.
class SubsetEnumerator {
 public:
  // Throws InvalidRequest unless 0 <= n < depth.
  SubsetEnumerator(const LayerTopology& topology, int n);

  // Writes the next subset (ascending) into `out`; false when exhausted.
  bool next(std::vector<LayerId>& out);

 private:
  int depth_;
  std::vector<LayerId> current_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<std::vector<LayerId>> enumerate_subsets(
    const LayerTopology& topology, int n);

// True when pruned set `a` beats `b` on a score tie: compare both sorted
// descending, the lexicographically larger wins.
bool prefer_on_tie(std::span<const LayerId> a, std::span<const LayerId> b);

struct OptimalResult {
  // Sorted descending.
  PruneSolution solution;
  // Every subset's score in enumeration order.
  std::vector<SubsetScore> table;
};

// Scores all binomial(depth, n) subsets and returns the best one. Ties go to
// prefer_on_tie(). An OracleError names the subset being scored.
OptimalResult optimal_search(const LayerTopology& topology,
                             const TaskSpec& task, int n,
                             const ScoreOracle& oracle, std::uint64_t seed);
// Same search over an arbitrary scorer, issuing a single batch.
OptimalResult optimal_search(const LayerTopology& topology, int n,
                             const BatchScorer& scorer);

// Fresh ledger with metadata filled in and no steps.
PruneLedger new_ledger(const LayerTopology& topology, const TaskSpec& task,
                       std::string oracle_fingerprint, Algorithm algorithm,
                       int target, std::uint64_t seed);

// Greedy-layer pruning: n steps, step k scoring each of the d-k+1 remaining
// layers pruned on top of the previous solution. Ties go to the highest id.
PruneLedger glp_search(const LayerTopology& topology, const TaskSpec& task,
                       int n, const ScoreOracle& oracle, std::uint64_t seed);

// Runs the missing greedy steps of `ledger` until it reaches its target.
// Completed steps are left untouched and `on_step` fires after each new one,
// so a ledger persisted from the callback can be resumed after a failure.
void continue_greedy(PruneLedger& ledger, const BatchScorer& scorer,
                     const StepCallback& on_step = {});

// Ledger holding a Top-layer solution; no oracle is consulted.
PruneLedger top_ledger(const LayerTopology& topology, const TaskSpec& task,
                       std::string oracle_fingerprint, int n,
                       std::uint64_t seed);

// Ledger holding an optimal solution and its subset table.
PruneLedger optimal_ledger(const LayerTopology& topology, const TaskSpec& task,
                           std::string oracle_fingerprint, int n,
                           std::uint64_t seed, const OptimalResult& result);

}  // namespace glp

#endif  // GLP_CORE_SEARCH_HPP_
