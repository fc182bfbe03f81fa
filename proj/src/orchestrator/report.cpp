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

#include "glp/orchestrator/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "glp/error.hpp"

namespace glp {
namespace {

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return v < 0 ? "-inf" : (std::isnan(v) ? "nan" : "inf");
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

Report build_report(std::span<const PruneLedger> ledgers,
                    std::span<const std::uint64_t> seeds, Scheduler& scheduler) {
  if (seeds.empty()) throw InvalidRequest("report needs at least one seed");
  const TaskSpec& task = scheduler.task();
  Report report;
  report.task = task.name;
  report.metric = task.metric;
  report.seeds.assign(seeds.begin(), seeds.end());

  std::vector<ReportRow> rows(1);
  rows[0].label = "baseline";
  int depth = 0;
  for (const PruneLedger& l : ledgers) {
    if (l.task_id != task.name) {
      throw InvalidRequest("ledger for task '" + l.task_id + "' in a report on '" +
                           task.name + "'");
    }
    if (depth != 0 && l.depth != depth) {
      throw InvalidRequest("ledgers of different depths in one report");
    }
    depth = l.depth;
    rows.push_back({std::string(algorithm_name(l.algorithm)), l.chain(), {}, 0, 100});
  }
  if (depth == 0) throw InvalidRequest("report needs at least one ledger");
  const LayerTopology topology(depth);

  std::vector<EvalRequest> requests;
  for (const ReportRow& row : rows) {
    const KeptLayers kept = topology.kept_after(row.chain);
    for (std::uint64_t seed : seeds) requests.push_back(scheduler.request(kept, seed));
  }
  const std::vector<EvalResult> results = scheduler.run_step(requests);

  std::size_t at = 0;
  for (ReportRow& row : rows) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      row.scores.push_back(results[at++].metric.value);
    }
    row.median = median_of_runs(row.scores);
  }
  for (ReportRow& row : rows) {
    row.relative = std::isfinite(row.median) && std::isfinite(rows[0].median) &&
                           rows[0].median != 0.0
                       ? relative_performance(row.median, rows[0].median)
                       : std::nan("");
  }
  report.baseline = rows[0];
  report.rows.assign(rows.begin() + 1, rows.end());
  return report;
}

std::string format_report(const Report& report) {
  std::ostringstream os;
  os << "task " << report.task << ", " << metric_name(report.metric)
     << ", median of " << report.seeds.size() << " seed"
     << (report.seeds.size() == 1 ? "" : "s") << "\n";
  os << pad("model", 10) << pad("median", 10) << pad("Rel.", 8) << "pruned\n";
  auto line = [&os](const ReportRow& r) {
    os << pad(r.label, 10) << pad(fixed(r.median, 4), 10)
       << pad(fixed(r.relative, 1), 8) << format_layers(r.chain) << "\n";
  };
  line(report.baseline);
  for (const ReportRow& r : report.rows) line(r);
  return os.str();
}

std::string format_report_tsv(const Report& report) {
  std::ostringstream os;
  os << "task\tmetric\tmodel\tmedian\trel\tpruned";
  for (std::uint64_t s : report.seeds) os << "\tseed_" << s;
  os << "\n";
  auto line = [&](const ReportRow& r) {
    os << report.task << '\t' << metric_name(report.metric) << '\t' << r.label << '\t'
       << fixed(r.median, 6) << '\t' << fixed(r.relative, 1) << '\t'
       << format_layers(r.chain);
    for (double v : r.scores) os << '\t' << fixed(v, 6);
    os << "\n";
  };
  line(report.baseline);
  for (const ReportRow& r : report.rows) line(r);
  return os.str();
}

std::string format_chains(std::span<const PruneLedger> ledgers) {
  std::size_t longest = 0;
  for (const PruneLedger& l : ledgers) longest = std::max(longest, l.steps.size());
  std::ostringstream os;
  os << pad("step", 6);
  for (const PruneLedger& l : ledgers) os << pad(std::string(algorithm_name(l.algorithm)), 10);
  os << "\n";
  for (std::size_t k = 0; k < longest; ++k) {
    os << pad(std::to_string(k + 1), 6);
    for (const PruneLedger& l : ledgers) {
      os << pad(k < l.steps.size() ? std::to_string(l.steps[k].chosen) : "", 10);
    }
    os << "\n";
  }
  return os.str();
}

std::string format_step_table(const PruneLedger& ledger) {
  std::ostringstream os;
  os << pad("layer", 7);
  for (const StepRecord& s : ledger.steps) os << pad("step " + std::to_string(s.step_index), 10);
  os << "\n";
  for (LayerId id = 0; id < ledger.depth; ++id) {
    os << pad(std::to_string(id), 7);
    for (const StepRecord& s : ledger.steps) {
      const auto it = s.candidates.find(id);
      std::string cell = it == s.candidates.end() ? "." : fixed(it->second, 4);
      if (s.chosen == id) cell += "*";
      os << pad(cell, 10);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace glp
