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

#ifndef GLP_TOY_BENCH_HPP_
#define GLP_TOY_BENCH_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "glp/toy/config.hpp"

namespace glp::toy {

struct BenchOptions {
  int batch = 1;
  int repeats = 31;
  // Each sample times enough forward passes to last at least this long.
  double min_sample_seconds = 2e-3;
  std::uint64_t seed = 0;
};

struct BenchRow {
  int depth = 0;
  // Median wall time of one forward pass.
  double median_seconds = 0.0;
  // Latency of the deepest benchmarked model divided by this one.
  double speedup = 1.0;
};

// Forward latency of `config` truncated to each depth in `depths`, on
// max_seq_len-token inputs. Depths are sampled round-robin so drift in
// machine load affects all rows alike.
std::vector<BenchRow> bench_latency(const ToyConfig& config,
                                    std::span<const int> depths,
                                    const BenchOptions& options = {});

}  // namespace glp::toy

#endif  // GLP_TOY_BENCH_HPP_
