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

#include "glp/core/search.hpp"

#include <algorithm>
#include <cmath>

#include "glp/error.hpp"

namespace glp {
namespace {

void check_target(const LayerTopology& topology, int n) {
  if (n < 0 || n >= topology.depth()) {
    throw InvalidRequest("cannot prune " + std::to_string(n) +
                         " layers from a depth-" +
                         std::to_string(topology.depth()) +
                         " model; n must lie in [0, depth)");
  }
}

std::vector<LayerId> sorted_descending(std::vector<LayerId> ids) {
  std::sort(ids.begin(), ids.end(), std::greater<>());
  return ids;
}

}  // namespace

BatchScorer sequential_scorer(const ScoreOracle& oracle, const TaskSpec& task,
                              std::uint64_t seed) {
  return [&oracle, &task, seed](std::span<const KeptLayers> batch) {
    std::vector<double> scores;
    scores.reserve(batch.size());
    for (const KeptLayers& kept : batch) {
      scores.push_back(oracle.evaluate(kept, task, seed).selection_score(task));
    }
    return scores;
  };
}

PruneSolution top_layer_prune(const LayerTopology& topology, int n) {
  check_target(topology, n);
  PruneSolution out;
  for (int i = 0; i < n; ++i) out.pruned.push_back(topology.depth() - 1 - i);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  // r stays an exact binomial after every division.
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

SubsetEnumerator::SubsetEnumerator(const LayerTopology& topology, int n)
    : depth_(topology.depth()) {
  check_target(topology, n);
  current_.resize(static_cast<std::size_t>(n));
}

bool SubsetEnumerator::next(std::vector<LayerId>& out) {
  if (done_) return false;
  const int n = static_cast<int>(current_.size());
  if (!started_) {
    started_ = true;
    for (int i = 0; i < n; ++i) current_[static_cast<std::size_t>(i)] = i;
    out = current_;
    return true;
  }
  // Advance the rightmost position that still has room.
  int i = n - 1;
  while (i >= 0 && current_[static_cast<std::size_t>(i)] == depth_ - n + i) --i;
  if (i < 0) {
    done_ = true;
    return false;
  }
  ++current_[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < n; ++j) {
    current_[static_cast<std::size_t>(j)] =
        current_[static_cast<std::size_t>(j - 1)] + 1;
  }
  out = current_;
  return true;
}

std::vector<std::vector<LayerId>> enumerate_subsets(
    const LayerTopology& topology, int n) {
  SubsetEnumerator it(topology, n);
  std::vector<std::vector<LayerId>> all;
  std::vector<LayerId> subset;
  while (it.next(subset)) all.push_back(subset);
  return all;
}

bool prefer_on_tie(std::span<const LayerId> a, std::span<const LayerId> b) {
  const std::vector<LayerId> da = sorted_descending({a.begin(), a.end()});
  const std::vector<LayerId> db = sorted_descending({b.begin(), b.end()});
  return std::lexicographical_compare(db.begin(), db.end(), da.begin(),
                                      da.end());
}

namespace {

OptimalResult pick_optimal(std::vector<std::vector<LayerId>> subsets,
                           const std::vector<double>& scores) {
  OptimalResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    result.table.push_back({sorted_descending(subsets[i]), scores[i]});
    if (i == 0) continue;
    const double s = scores[i];
    const double b = scores[best];
    if (s > b || (s == b && prefer_on_tie(subsets[i], subsets[best]))) best = i;
  }
  result.solution.pruned = sorted_descending(std::move(subsets[best]));
  return result;
}

}  // namespace

OptimalResult optimal_search(const LayerTopology& topology,
                             const TaskSpec& task, int n,
                             const ScoreOracle& oracle, std::uint64_t seed) {
  std::vector<std::vector<LayerId>> subsets = enumerate_subsets(topology, n);
  std::vector<double> scores;
  scores.reserve(subsets.size());
  for (const std::vector<LayerId>& pruned : subsets) {
    try {
      scores.push_back(oracle.evaluate(topology.kept_after(pruned), task, seed)
                           .selection_score(task));
    } catch (const OracleError& e) {
      throw OracleError("optimal search aborted while scoring pruned subset " +
                        format_layers(sorted_descending(pruned)) + ": " +
                        e.what());
    }
  }
  return pick_optimal(std::move(subsets), scores);
}

OptimalResult optimal_search(const LayerTopology& topology, int n,
                             const BatchScorer& scorer) {
  std::vector<std::vector<LayerId>> subsets = enumerate_subsets(topology, n);
  std::vector<KeptLayers> batch;
  batch.reserve(subsets.size());
  for (const auto& pruned : subsets) batch.push_back(topology.kept_after(pruned));
  std::vector<double> scores;
  try {
    scores = scorer(batch);
  } catch (const OracleError& e) {
    throw OracleError("optimal search over " + std::to_string(subsets.size()) +
                      " subsets of size " + std::to_string(n) +
                      " aborted: " + e.what());
  }
  if (scores.size() != subsets.size()) {
    throw OracleError("scorer returned " + std::to_string(scores.size()) +
                      " scores for " + std::to_string(subsets.size()) +
                      " subsets");
  }
  return pick_optimal(std::move(subsets), scores);
}

PruneLedger new_ledger(const LayerTopology& topology, const TaskSpec& task,
                       std::string oracle_fingerprint, Algorithm algorithm,
                       int target, std::uint64_t seed) {
  check_target(topology, target);
  PruneLedger ledger;
  ledger.depth = topology.depth();
  ledger.task_id = task.name;
  ledger.oracle_fingerprint = std::move(oracle_fingerprint);
  ledger.seed = seed;
  ledger.algorithm = algorithm;
  ledger.metric = task.selection_metric();
  ledger.target = target;
  return ledger;
}

void continue_greedy(PruneLedger& ledger, const BatchScorer& scorer,
                     const StepCallback& on_step) {
  validate(ledger);
  if (ledger.algorithm != Algorithm::kGreedy) {
    throw InvalidRequest("continue_greedy needs a glp ledger, got " +
                         std::string(algorithm_name(ledger.algorithm)));
  }
  const LayerTopology topology(ledger.depth);
  while (!ledger.complete()) {
    std::vector<LayerId> pruned = ledger.chain();
    const KeptLayers remaining = topology.kept_after(pruned);

    std::vector<KeptLayers> batch;
    batch.reserve(remaining.size());
    pruned.push_back(-1);
    for (LayerId candidate : remaining) {
      pruned.back() = candidate;
      batch.push_back(topology.kept_after(pruned));
    }
    const std::vector<double> scores = scorer(batch);
    if (scores.size() != batch.size()) {
      throw OracleError("scorer returned " + std::to_string(scores.size()) +
                        " scores for " + std::to_string(batch.size()) +
                        " candidates");
    }

    StepRecord step;
    step.step_index = static_cast<int>(ledger.steps.size()) + 1;
    step.seed_used = ledger.seed;
    double best = kFailedScore;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const LayerId candidate = remaining[i];
      const double s = std::isnan(scores[i]) ? kFailedScore : scores[i];
      step.candidates[candidate] = s;
      // Candidates arrive in ascending id order, so >= hands ties to the
      // highest id.
      if (step.chosen < 0 || s >= best) {
        best = s;
        step.chosen = candidate;
      }
    }
    ledger.steps.push_back(std::move(step));
    if (on_step) on_step(ledger);
  }
}

PruneLedger glp_search(const LayerTopology& topology, const TaskSpec& task,
                       int n, const ScoreOracle& oracle, std::uint64_t seed) {
  PruneLedger ledger = new_ledger(topology, task, oracle.fingerprint(),
                                  Algorithm::kGreedy, n, seed);
  continue_greedy(ledger, sequential_scorer(oracle, task, seed));
  return ledger;
}

PruneLedger top_ledger(const LayerTopology& topology, const TaskSpec& task,
                       std::string oracle_fingerprint, int n,
                       std::uint64_t seed) {
  PruneLedger ledger = new_ledger(topology, task, std::move(oracle_fingerprint),
                                  Algorithm::kTop, n, seed);
  const PruneSolution top = top_layer_prune(topology, n);
  for (std::size_t i = 0; i < top.pruned.size(); ++i) {
    ledger.steps.push_back(
        {static_cast<int>(i) + 1, {}, top.pruned[i], seed});
  }
  return ledger;
}

PruneLedger optimal_ledger(const LayerTopology& topology, const TaskSpec& task,
                           std::string oracle_fingerprint, int n,
                           std::uint64_t seed, const OptimalResult& result) {
  PruneLedger ledger = new_ledger(topology, task, std::move(oracle_fingerprint),
                                  Algorithm::kOptimal, n, seed);
  const std::vector<LayerId>& ids = result.solution.pruned;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ledger.steps.push_back({static_cast<int>(i) + 1, {}, ids[i], seed});
  }
  ledger.subsets = result.table;
  return ledger;
}

}  // namespace glp
