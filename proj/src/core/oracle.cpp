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

#include "glp/core/oracle.hpp"

#include <cmath>

namespace glp {

double Evaluation::selection_score(const TaskSpec& task) const {
  if (!ok) return kFailedScore;
  const double s = task.loss_ablation ? -validation_loss : metric;
  return std::isfinite(s) ? s : kFailedScore;
}

Evaluation Evaluation::failed(std::string detail) {
  Evaluation e;
  e.ok = false;
  e.metric = kFailedScore;
  e.detail = std::move(detail);
  return e;
}

std::string ScoreOracle::fingerprint() const {
  const std::string k = kind();
  return k + ":" + to_hex(fnv1a64(k + "\n" + hyperparameters()));
}

std::string ScoreOracle::hyperparameter_hash() const {
  return to_hex(fnv1a64(hyperparameters()));
}

MetricValue ScoreOracle::score(std::span<const LayerId> kept,
                               const TaskSpec& task, std::uint64_t seed) const {
  return {evaluate(kept, task, seed).selection_score(task),
          task.selection_metric()};
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace glp
