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

#ifndef GLP_ORCHESTRATOR_REPORT_HPP_
#define GLP_ORCHESTRATOR_REPORT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glp/core/ledger.hpp"
#include "glp/orchestrator/scheduler.hpp"

namespace glp {

struct ReportRow {
  std::string label;  // algorithm name, or "baseline"
  std::vector<LayerId> chain;
  // Natural metric of the final pruned model, one per seed.
  std::vector<double> scores;
  double median = 0.0;
  // Median relative to the baseline median, in percent (one decimal).
  double relative = 100.0;
};

struct Report {
  std::string task;
  MetricKind metric = MetricKind::kAccuracy;
  std::vector<std::uint64_t> seeds;
  ReportRow baseline;  // nothing pruned
  std::vector<ReportRow> rows;
};

// Re-evaluates every ledger's final pruned model and the unpruned baseline
// under each seed, after the searches are done, as one scheduler batch.
// Requires >= 1 seed and ledgers on the scheduler's task.
Report build_report(std::span<const PruneLedger> ledgers,
                    std::span<const std::uint64_t> seeds, Scheduler& scheduler);

// Aligned text table: label, median, Rel., chain.
std::string format_report(const Report& report);
// Same content as tab-separated values with a header line.
std::string format_report_tsv(const Report& report);
// Chains of several ledgers side by side, one column per ledger.
std::string format_chains(std::span<const PruneLedger> ledgers);
// Per-step candidate scores of a greedy ledger (layer x step grid).
std::string format_step_table(const PruneLedger& ledger);

}  // namespace glp

#endif  // GLP_ORCHESTRATOR_REPORT_HPP_
