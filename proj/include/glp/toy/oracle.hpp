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

#ifndef GLP_TOY_ORACLE_HPP_
#define GLP_TOY_ORACLE_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "glp/core/oracle.hpp"
#include "glp/toy/config.hpp"
#include "glp/toy/model.hpp"

namespace glp::toy {

// Copies `pretrained`, keeps only `kept`, attaches a fresh head, fine-tunes
// on the training split and scores the validation split. `seed` drives the
// head init, shuffling and dropout; `spec.seed` is ignored. Divergence and
// degenerate predictions come back as failed evaluations. An empty `kept`
// trains the embeddings-only model.
Evaluation fine_tune_and_score(const ToyTransformer& pretrained,
                               std::span<const LayerId> kept,
                               const TaskSpec& task, std::uint64_t seed,
                               const TrainSpec& spec,
                               double validation_fraction = 0.15);

// The built-in oracle. Stateless apart from the frozen checkpoint, so one
// instance may serve concurrent evaluate() calls.
class ToyOracle : public ScoreOracle {
 public:
  ToyOracle(ToyTransformer pretrained, TrainSpec spec);

  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec& task,
                      std::uint64_t seed) const override;
  std::string kind() const override { return "toy"; }
  std::string hyperparameters() const override;

  const ToyTransformer& pretrained() const { return pretrained_; }
  const TrainSpec& train_spec() const { return spec_; }

 private:
  ToyTransformer pretrained_;
  TrainSpec spec_;
  std::string checkpoint_hash_;
};

// Overwrites every tensor of `layer` with N(0, scale^2) noise.
void sabotage_layer(ToyTransformer& model, LayerId layer, double scale,
                    std::uint64_t seed);

}  // namespace glp::toy

#endif  // GLP_TOY_ORACLE_HPP_
