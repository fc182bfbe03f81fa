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

#ifndef GLP_TOY_CONFIG_HPP_
#define GLP_TOY_CONFIG_HPP_

#include <cstdint>
#include <string>

namespace glp::toy {

struct ToyConfig {
  int depth = 6;
  int width = 32;
  int heads = 2;
  int ffn_width = 64;
  int vocab_size = 64;
  int max_seq_len = 32;
  // Classifier outputs; 1 for regression heads.
  int num_classes = 2;
  double dropout = 0.1;

  int head_width() const { return width / heads; }

  // Throws InvalidRequest on non-positive dims, width % heads != 0 or a
  // dropout rate outside [0, 1).
  void validate() const;
  // Stable "key=value;..." text used in oracle fingerprints.
  std::string canonical() const;

  bool operator==(const ToyConfig&) const = default;
};

// Fine-tuning hyperparameters: AdamW with decoupled weight decay.
struct TrainSpec {
  double learning_rate = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  int batch_size = 32;
  int epochs = 3;
  std::uint64_t seed = 0;

  // The learning rate the desk-scale toy model needs to move in 3 epochs.
  static TrainSpec toy_defaults();

  void validate() const;
  std::string canonical() const;

  bool operator==(const TrainSpec&) const = default;
};

}  // namespace glp::toy

#endif  // GLP_TOY_CONFIG_HPP_
