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

#include "glp/toy/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "glp/error.hpp"
#include "glp/metrics/metric.hpp"
#include "glp/toy/model.hpp"

namespace glp::toy {

std::vector<BenchRow> bench_latency(const ToyConfig& config,
                                    std::span<const int> depths,
                                    const BenchOptions& options) {
  if (depths.empty()) throw InvalidRequest("bench needs at least one depth");
  if (options.batch <= 0 || options.repeats <= 0) {
    throw InvalidRequest("bench batch and repeats must be positive");
  }
  const int deepest = *std::max_element(depths.begin(), depths.end());
  if (*std::min_element(depths.begin(), depths.end()) < 0) {
    throw InvalidRequest("bench depths must be non-negative");
  }

  ToyConfig c = config;
  c.depth = std::max(deepest, 1);
  const ToyTransformer base = ToyTransformer::initialize(c, options.seed);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> token(0, c.vocab_size - 1);
  std::vector<std::vector<int>> batch(static_cast<std::size_t>(options.batch));
  for (auto& seq : batch) {
    seq.resize(static_cast<std::size_t>(c.max_seq_len));
    for (int& t : seq) t = token(rng);
  }

  std::vector<ToyTransformer> models;
  for (int d : depths) {
    ToyTransformer m = base;
    std::vector<LayerId> kept(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) kept[static_cast<std::size_t>(i)] = i;
    m.set_active_layers(kept);
    models.push_back(std::move(m));
  }

  using Clock = std::chrono::steady_clock;
  volatile double sink = 0.0;
  // Passes per sample, calibrated once per depth.
  std::vector<int> passes(models.size(), 1);
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (;;) {
      const auto t0 = Clock::now();
      for (int k = 0; k < passes[i]; ++k) sink = sink + models[i].forward(batch)(0, 0);
      const double s = std::chrono::duration<double>(Clock::now() - t0).count();
      if (s >= options.min_sample_seconds || passes[i] > (1 << 20)) break;
      passes[i] *= 2;
    }
  }

  std::vector<std::vector<double>> samples(models.size());
  for (int r = 0; r < options.repeats; ++r) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      const auto t0 = Clock::now();
      for (int k = 0; k < passes[i]; ++k) sink = sink + models[i].forward(batch)(0, 0);
      const double s = std::chrono::duration<double>(Clock::now() - t0).count();
      samples[i].push_back(s / passes[i]);
    }
  }

  std::vector<BenchRow> rows;
  double deepest_latency = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    BenchRow row;
    row.depth = depths[i];
    row.median_seconds = median_of_runs(samples[i]);
    if (row.depth == deepest) deepest_latency = row.median_seconds;
    rows.push_back(row);
  }
  for (BenchRow& row : rows) row.speedup = deepest_latency / row.median_seconds;
  return rows;
}

}  // namespace glp::toy
