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

#ifndef GLP_TOY_TASKS_HPP_
#define GLP_TOY_TASKS_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "glp/metrics/task.hpp"

namespace glp::toy {

// Token ids of the synthetic vocabulary. Id 0 is the mask token and never
// occurs in task data; ids below kFirstFillerToken carry task signal.
inline constexpr int kMaskToken = 0;
inline constexpr int kFirstGroupA = 1;   // 1..6
inline constexpr int kFirstGroupB = 7;   // 7..12
inline constexpr int kGroupSize = 6;
inline constexpr int kOrderFirst = 13;
inline constexpr int kOrderSecond = 14;
inline constexpr int kMarkerToken = 15;
inline constexpr int kFirstFillerToken = 16;

// A sparse first-order Markov chain over the filler tokens: the background
// "text" shared by pretraining and every task.
class SyntheticLanguage {
 public:
  SyntheticLanguage(int vocab_size, std::uint64_t seed);

  // `length` filler tokens.
  std::vector<int> sample(int length, std::mt19937_64& rng) const;
  int vocab_size() const { return vocab_size_; }

 private:
  int vocab_size_;
  // successors_[t] lists the likely next tokens after filler token t.
  std::vector<std::vector<int>> successors_;
};

// Seed of the language every built-in task and the pretraining corpus use.
inline constexpr std::uint64_t kLanguageSeed = 2021;

struct SyntheticTaskOptions {
  int vocab_size = 64;
  int seq_len = 16;
  int examples = 1200;
};

// Desk-scale stand-ins for a benchmark suite, one per natural metric:
//   "unigram"    accuracy  more group-A than group-B tokens (no layer needed)
//   "order"      f1        does the first order token precede the second
//   "regression" spearman  (#group-A - #group-B) plus noise
//   "marker"     matthews  marker token occurs at least twice (~30% positive)
// Byte-identical for a fixed seed.
std::vector<TaskSpec> make_synthetic_tasks(std::uint64_t seed,
                                           const SyntheticTaskOptions& options = {});

// Looks a task up by name; throws InvalidRequest listing the known names.
const TaskSpec& find_task(const std::vector<TaskSpec>& tasks,
                          std::string_view name);

}  // namespace glp::toy

#endif  // GLP_TOY_TASKS_HPP_
