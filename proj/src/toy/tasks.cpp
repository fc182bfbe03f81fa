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

#include "glp/toy/tasks.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "glp/error.hpp"

namespace glp::toy {
namespace {

constexpr int kSuccessors = 2;
constexpr double kJumpProbability = 0.1;

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Distinct positions in [0, length).
std::vector<int> pick_positions(int count, int length, std::mt19937_64& rng) {
  std::vector<int> all(static_cast<std::size_t>(length));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(count));
  return all;
}

void plant(std::vector<int>& seq, int count, int first, int group_size,
           std::vector<int>& free_positions, std::mt19937_64& rng) {
  for (int i = 0; i < count; ++i) {
    seq[static_cast<std::size_t>(free_positions.back())] =
        first + uniform_int(rng, 0, group_size - 1);
    free_positions.pop_back();
  }
}

TaskSpec base_task(std::string name, MetricKind metric, int labels,
                   const SyntheticTaskOptions& o, std::uint64_t split_seed) {
  TaskSpec t;
  t.name = std::move(name);
  t.metric = metric;
  t.num_labels = labels;
  t.vocab_size = o.vocab_size;
  t.seq_len = o.seq_len;
  t.split_seed = split_seed;
  t.locator = "builtin:" + t.name;
  return t;
}

}  // namespace

SyntheticLanguage::SyntheticLanguage(int vocab_size, std::uint64_t seed)
    : vocab_size_(vocab_size) {
  if (vocab_size <= kFirstFillerToken + kSuccessors) {
    throw InvalidRequest("synthetic vocabulary too small: " +
                         std::to_string(vocab_size));
  }
  std::mt19937_64 rng(seed);
  successors_.resize(static_cast<std::size_t>(vocab_size));
  for (int t = kFirstFillerToken; t < vocab_size; ++t) {
    auto& next = successors_[static_cast<std::size_t>(t)];
    for (int k = 0; k < kSuccessors; ++k) {
      next.push_back(uniform_int(rng, kFirstFillerToken, vocab_size - 1));
    }
  }
}

std::vector<int> SyntheticLanguage::sample(int length,
                                           std::mt19937_64& rng) const {
  std::bernoulli_distribution jump(kJumpProbability);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(length));
  int t = uniform_int(rng, kFirstFillerToken, vocab_size_ - 1);
  for (int i = 0; i < length; ++i) {
    out.push_back(t);
    if (jump(rng)) {
      t = uniform_int(rng, kFirstFillerToken, vocab_size_ - 1);
    } else {
      const auto& next = successors_[static_cast<std::size_t>(t)];
      t = next[static_cast<std::size_t>(uniform_int(rng, 0, kSuccessors - 1))];
    }
  }
  return out;
}

std::vector<TaskSpec> make_synthetic_tasks(std::uint64_t seed,
                                           const SyntheticTaskOptions& o) {
  if (o.seq_len < 8 || o.examples < 20) {
    throw InvalidRequest("synthetic tasks need seq_len >= 8 and >= 20 examples");
  }
  const SyntheticLanguage language(o.vocab_size, kLanguageSeed);
  std::mt19937_64 rng(seed);
  const int len = o.seq_len;

  TaskSpec unigram = base_task("unigram", MetricKind::kAccuracy, 2, o, seed + 1);
  TaskSpec order = base_task("order", MetricKind::kF1, 2, o, seed + 2);
  TaskSpec regression = base_task("regression", MetricKind::kSpearmanCorr, 0, o, seed + 3);
  TaskSpec marker = base_task("marker", MetricKind::kMatthewsCorr, 2, o, seed + 4);

  std::normal_distribution<double> noise(0.0, 0.3);
  std::bernoulli_distribution positive(0.3);
  for (int i = 0; i < o.examples; ++i) {
    {
      int a = uniform_int(rng, 1, 4);
      int b = uniform_int(rng, 1, 3);
      if (b >= a) ++b;  // a != b
      std::vector<int> seq = language.sample(len, rng);
      std::vector<int> free = pick_positions(a + b, len, rng);
      plant(seq, a, kFirstGroupA, kGroupSize, free, rng);
      plant(seq, b, kFirstGroupB, kGroupSize, free, rng);
      unigram.examples.push_back({std::move(seq), a > b ? 1.0 : 0.0});
    }
    {
      std::vector<int> seq = language.sample(len, rng);
      const std::vector<int> pos = pick_positions(2, len, rng);
      seq[static_cast<std::size_t>(pos[0])] = kOrderFirst;
      seq[static_cast<std::size_t>(pos[1])] = kOrderSecond;
      order.examples.push_back({std::move(seq), pos[0] < pos[1] ? 1.0 : 0.0});
    }
    {
      const int a = uniform_int(rng, 0, 5);
      const int b = uniform_int(rng, 0, 5);
      std::vector<int> seq = language.sample(len, rng);
      std::vector<int> free = pick_positions(a + b, len, rng);
      plant(seq, a, kFirstGroupA, kGroupSize, free, rng);
      plant(seq, b, kFirstGroupB, kGroupSize, free, rng);
      regression.examples.push_back({std::move(seq), a - b + noise(rng)});
    }
    {
      const bool pos = positive(rng);
      const int count = pos ? uniform_int(rng, 2, 3) : uniform_int(rng, 0, 1);
      std::vector<int> seq = language.sample(len, rng);
      std::vector<int> free = pick_positions(count, len, rng);
      plant(seq, count, kMarkerToken, 1, free, rng);
      marker.examples.push_back({std::move(seq), pos ? 1.0 : 0.0});
    }
  }
  return {unigram, order, regression, marker};
}

const TaskSpec& find_task(const std::vector<TaskSpec>& tasks,
                          std::string_view name) {
  for (const TaskSpec& t : tasks) {
    if (t.name == name) return t;
  }
  std::string known;
  for (const TaskSpec& t : tasks) known += (known.empty() ? "" : ", ") + t.name;
  throw InvalidRequest("unknown task '" + std::string(name) + "' (known: " +
                       known + ")");
}

}  // namespace glp::toy
