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

#include "glp/orchestrator/runner.hpp"

#include <algorithm>

#include "glp/core/search.hpp"
#include "glp/error.hpp"
#include "glp/orchestrator/ledger_io.hpp"

namespace glp {
namespace {

void check_compatible(const PruneLedger& found, const PruneLedger& wanted,
                      const std::filesystem::path& path) {
  auto mismatch = [&](const std::string& field) {
    throw InvalidRequest("ledger " + path.string() + " belongs to another run (" +
                         field + " differs); use a new ledger path");
  };
  if (found.algorithm != wanted.algorithm) mismatch("algorithm");
  if (found.task_id != wanted.task_id) mismatch("task");
  if (found.metric != wanted.metric) mismatch("metric");
  if (found.depth != wanted.depth) mismatch("depth");
  if (found.seed != wanted.seed) mismatch("seed");
  if (found.oracle_fingerprint != wanted.oracle_fingerprint) mismatch("oracle");
}

}  // namespace

ResumePoint resume(const std::filesystem::path& ledger_path) {
  ResumePoint p{read_ledger(ledger_path), std::nullopt};
  if (!p.ledger.complete()) p.next_step = static_cast<int>(p.ledger.steps.size()) + 1;
  return p;
}

PruneLedger run_search(const LayerTopology& topology, Scheduler& scheduler,
                       const RunOptions& options) {
  const TaskSpec& task = scheduler.task();
  const std::string fingerprint = scheduler.oracle().fingerprint();
  auto persist = [&](const PruneLedger& l) {
    if (options.ledger_path) write_ledger(*options.ledger_path, l);
  };

  PruneLedger ledger =
      new_ledger(topology, task, fingerprint, options.algorithm, options.n, options.seed);
  if (options.ledger_path && std::filesystem::exists(*options.ledger_path)) {
    PruneLedger found = resume(*options.ledger_path).ledger;
    check_compatible(found, ledger, *options.ledger_path);
    if (options.algorithm == Algorithm::kGreedy) {
      // Greedy chains are prefixes of longer ones, so n may grow; an
      // interrupted longer run is completed to its own target.
      if (found.target >= options.n && found.complete()) return found;
      found.target = std::max(found.target, options.n);
      ledger = std::move(found);
    } else if (found.target == options.n && found.complete()) {
      return found;
    }
  }

  switch (options.algorithm) {
    case Algorithm::kGreedy:
      persist(ledger);
      continue_greedy(ledger, scheduler.scorer(options.seed), persist);
      break;
    case Algorithm::kTop:
      ledger = top_ledger(topology, task, fingerprint, options.n, options.seed);
      break;
    case Algorithm::kOptimal: {
      const OptimalResult result =
          optimal_search(topology, options.n, scheduler.scorer(options.seed));
      ledger = optimal_ledger(topology, task, fingerprint, options.n, options.seed, result);
      break;
    }
  }
  persist(ledger);
  return ledger;
}

}  // namespace glp
