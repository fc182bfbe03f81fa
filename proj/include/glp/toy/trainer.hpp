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

#ifndef GLP_TOY_TRAINER_HPP_
#define GLP_TOY_TRAINER_HPP_

#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "glp/error.hpp"
#include "glp/toy/config.hpp"
#include "glp/toy/model.hpp"

namespace glp::toy {

// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Adam with decoupled weight decay. State is keyed by tensor name, so
// tensors outside the model (e.g. a pretraining head) can share one
// optimizer.
class AdamW {
 public:
  explicit AdamW(const TrainSpec& spec) : spec_(spec) {}

  // Advances the shared step counter; call once per optimizer step before
  // update().
  void begin_step() { ++step_; }
  void update(const std::string& name, Matrix& param, const Matrix& grad,
              bool decay);

  long step_count() const { return step_; }

 private:
  struct Moments {
    Matrix m, v;
  };
  TrainSpec spec_;
  long step_ = 0;
  std::map<std::string, Moments> state_;
};

// Embedding and projection matrices decay; biases and norm parameters don't.
bool decays(const std::string& tensor_name);

// One optimizer step on `batch`. Only the embeddings, the active layers and
// the classifier are updated. Returns the pre-step mean loss; throws
// DivergenceError (with per-layer weight and gradient norms) when the loss
// or gradient is not finite.
double backward_and_step(ToyTransformer& model,
                         const std::vector<std::vector<int>>& batch,
                         std::span<const double> targets, LossKind loss,
                         AdamW& optimizer, std::mt19937_64* dropout_rng);

}  // namespace glp::toy

#endif  // GLP_TOY_TRAINER_HPP_
