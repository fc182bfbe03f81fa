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

#ifndef GLP_CORE_HASHED_ORACLE_HPP_
#define GLP_CORE_HASHED_ORACLE_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "glp/core/oracle.hpp"
#include "glp/core/topology.hpp"

namespace glp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a hash.
inline double hash_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Synthetic score of a kept-layer set: 0.5 plus a per-layer gain in
// [0, 0.05) and a pairwise term in [-0.01, 0.01) for every kept pair, all
// drawn from hashes of `fn_seed`. Deterministic and free of ties in
// practice, with interactions that keep greedy and optimal apart.
inline double hashed_score(std::span<const LayerId> kept, std::uint64_t fn_seed) {
  double s = 0.5;
  for (std::size_t a = 0; a < kept.size(); ++a) {
    const auto i = static_cast<std::uint64_t>(kept[a]);
    s += 0.05 * hash_unit(splitmix64(fn_seed ^ splitmix64(i)));
    for (std::size_t b = a + 1; b < kept.size(); ++b) {
      const auto j = static_cast<std::uint64_t>(kept[b]);
      s += 0.02 * hash_unit(splitmix64(fn_seed + splitmix64(i * 1000003ULL + j))) - 0.01;
    }
  }
  return s;
}

// ScoreOracle around hashed_score(). Instant, so it stands in for a real
// fine-tuner in demos and tests; the task and seed are ignored.
class HashedOracle : public ScoreOracle {
 public:
  explicit HashedOracle(std::uint64_t fn_seed) : fn_seed_(fn_seed) {}

  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec&,
                      std::uint64_t) const override {
    Evaluation e;
    e.metric = hashed_score(kept, fn_seed_);
    e.validation_loss = 1.0 - e.metric;
    return e;
  }
  std::string kind() const override { return "hashed"; }
  std::string hyperparameters() const override {
    return "fn_seed=" + std::to_string(fn_seed_);
  }

 private:
  std::uint64_t fn_seed_;
};

}  // namespace glp

#endif  // GLP_CORE_HASHED_ORACLE_HPP_
