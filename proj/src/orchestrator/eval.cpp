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

#include "glp/orchestrator/eval.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "glp/error.hpp"

namespace glp {
namespace {

bool same_double(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b) ||
         (std::isnan(a) && std::isnan(b));
}

}  // namespace

std::string task_identity(const TaskSpec& task) {
  std::ostringstream os;
  os.precision(17);
  os << task.name << '\n' << metric_name(task.metric) << '\n'
     << task.num_labels << '\n' << task.split_seed << '\n';
  for (const Example& e : task.examples) {
    for (int t : e.tokens) os << t << ' ';
    os << '|' << e.label << '\n';
  }
  return task.name + "#" + to_hex(fnv1a64(os.str()));
}

EvalRequest EvalRequest::make(const TaskSpec& task,
                              std::span<const LayerId> kept, std::uint64_t seed,
                              const ScoreOracle& oracle) {
  EvalRequest r;
  r.task_id = task_identity(task);
  r.kept.assign(kept.begin(), kept.end());
  r.seed = seed;
  r.oracle_fingerprint = oracle.fingerprint();
  r.hyperparameter_hash = oracle.hyperparameter_hash();
  return r;
}

std::string EvalRequest::key() const {
  std::string k = "task=" + task_id + ";kept=";
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0) k += ',';
    k += std::to_string(kept[i]);
  }
  k += ";seed=" + std::to_string(seed) + ";oracle=" + oracle_fingerprint +
       ";hparams=" + hyperparameter_hash;
  return k;
}

void validate(const EvalRequest& request, int depth) {
  if (request.kept.empty()) throw InvalidRequest("request keeps no layers");
  for (std::size_t i = 0; i < request.kept.size(); ++i) {
    const LayerId id = request.kept[i];
    if (id < 0 || id >= depth || (i > 0 && id <= request.kept[i - 1])) {
      throw InvalidRequest("request kept layers " + format_layers(request.kept) +
                           " are not ascending ids below " + std::to_string(depth));
    }
  }
}

std::string_view status_name(EvalStatus status) {
  return status == EvalStatus::kOk ? "ok" : "failed";
}

EvalStatus parse_status(std::string_view name) {
  if (name == "ok") return EvalStatus::kOk;
  if (name == "failed") return EvalStatus::kFailed;
  throw InvalidRequest("unknown evaluation status '" + std::string(name) + "'");
}

EvalResult EvalResult::from(const Evaluation& evaluation, const TaskSpec& task,
                            std::string key, double wall_seconds) {
  EvalResult r;
  r.key = std::move(key);
  r.wall_seconds = wall_seconds;
  r.detail = evaluation.detail;
  r.metric.kind = task.metric;
  r.validation_loss = evaluation.validation_loss;
  if (evaluation.ok && std::isfinite(evaluation.metric)) {
    r.metric.value = evaluation.metric;
  } else {
    r.status = EvalStatus::kFailed;
    r.metric.value = kFailedScore;
    if (evaluation.ok) r.detail = "non-finite metric";
  }
  return r;
}

double EvalResult::selection_score(const TaskSpec& task) const {
  Evaluation e;
  e.ok = ok();
  e.metric = metric.value;
  e.validation_loss = validation_loss;
  return e.selection_score(task);
}

bool EvalResult::operator==(const EvalResult& o) const {
  return key == o.key && status == o.status && metric.kind == o.metric.kind &&
         same_double(metric.value, o.metric.value) &&
         same_double(validation_loss, o.validation_loss) &&
         same_double(wall_seconds, o.wall_seconds) && detail == o.detail;
}

}  // namespace glp
