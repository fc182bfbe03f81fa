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

#include "glp/metrics/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "glp/error.hpp"

namespace glp {
namespace {

std::size_t holdout_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

void take_holdout(std::vector<std::size_t> pool, std::size_t count,
                  std::mt19937_64& rng, Split& out) {
  std::shuffle(pool.begin(), pool.end(), rng);
  out.validation.insert(out.validation.end(), pool.begin(),
                        pool.begin() + static_cast<std::ptrdiff_t>(count));
  out.train.insert(out.train.end(),
                   pool.begin() + static_cast<std::ptrdiff_t>(count),
                   pool.end());
}

}  // namespace

Split split_train_validation(const TaskSpec& task, const SplitSpec& spec) {
  if (!(spec.validation_fraction > 0 && spec.validation_fraction < 1)) {
    throw InvalidRequest("validation_fraction must lie strictly in (0, 1)");
  }
  const std::size_t n = task.examples.size();
  if (n < 2) {
    throw InvalidRequest("task '" + task.name +
                         "' needs at least 2 examples to split");
  }

  Split out;
  std::mt19937_64 rng(spec.seed);
  bool stratify = spec.stratified && !task.is_regression();

  std::map<int, std::vector<std::size_t>> by_class;
  if (stratify) {
    for (std::size_t i = 0; i < n; ++i) {
      by_class[static_cast<int>(task.examples[i].label)].push_back(i);
    }
    for (const auto& [label, members] : by_class) {
      if (members.size() < 2) {
        out.warnings.push_back("class " + std::to_string(label) +
                               " has a single example; split is unstratified");
        stratify = false;
        break;
      }
    }
  }

  if (stratify) {
    for (const auto& [label, members] : by_class) {
      take_holdout(members, holdout_count(members.size(),
                                          spec.validation_fraction),
                   rng, out);
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const std::size_t count = std::clamp<std::size_t>(
        holdout_count(n, spec.validation_fraction), 1, n - 1);
    take_holdout(std::move(all), count, rng, out);
  }

  if (out.validation.empty() || out.train.empty()) {
    throw InvalidRequest("task '" + task.name +
                         "' is too small for the requested split");
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

}  // namespace glp
