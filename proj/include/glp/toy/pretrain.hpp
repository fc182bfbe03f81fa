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

#ifndef GLP_TOY_PRETRAIN_HPP_
#define GLP_TOY_PRETRAIN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "glp/toy/config.hpp"
#include "glp/toy/model.hpp"

namespace glp::toy {

// Masked-token pretraining on the synthetic language.
struct PretrainSpec {
  ToyConfig config;
  int steps = 6000;
  int batch_size = 16;
  int seq_len = 16;
  double mask_rate = 0.15;
  double learning_rate = 1e-3;
  // Chance of replacing a filler token with a task-signal token, so that
  // every embedding row receives gradient.
  double signal_rate = 0.1;
  std::uint64_t seed = 7;
};

struct PretrainResult {
  ToyTransformer model;
  // Mean masked-token cross-entropy per step.
  std::vector<double> losses;
};

// `progress(step, loss)` is called after every step when set.
PretrainResult pretrain(const PretrainSpec& spec,
                        const std::function<void(int, double)>& progress = {});

}  // namespace glp::toy

#endif  // GLP_TOY_PRETRAIN_HPP_
