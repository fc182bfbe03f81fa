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

#ifndef GLP_TOY_MODEL_HPP_
#define GLP_TOY_MODEL_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "glp/core/topology.hpp"
#include "glp/toy/config.hpp"

namespace glp::toy {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Parameters of one post-norm encoder layer. Biases and norm parameters are
// 1 x n matrices so every tensor shares one type.
struct LayerWeights {
  Matrix query_w, query_b;
  Matrix key_w, key_b;
  Matrix value_w, value_b;
  Matrix output_w, output_b;
  Matrix attn_norm_gain, attn_norm_bias;
  Matrix ffn_in_w, ffn_in_b;
  Matrix ffn_out_w, ffn_out_b;
  Matrix ffn_norm_gain, ffn_norm_bias;

  struct Tensor {
    const char* name;
    Matrix LayerWeights::*member;
  };
  static constexpr std::array<Tensor, 16> kTensors = {{
      {"query_w", &LayerWeights::query_w},
      {"query_b", &LayerWeights::query_b},
      {"key_w", &LayerWeights::key_w},
      {"key_b", &LayerWeights::key_b},
      {"value_w", &LayerWeights::value_w},
      {"value_b", &LayerWeights::value_b},
      {"output_w", &LayerWeights::output_w},
      {"output_b", &LayerWeights::output_b},
      {"attn_norm_gain", &LayerWeights::attn_norm_gain},
      {"attn_norm_bias", &LayerWeights::attn_norm_bias},
      {"ffn_in_w", &LayerWeights::ffn_in_w},
      {"ffn_in_b", &LayerWeights::ffn_in_b},
      {"ffn_out_w", &LayerWeights::ffn_out_w},
      {"ffn_out_b", &LayerWeights::ffn_out_b},
      {"ffn_norm_gain", &LayerWeights::ffn_norm_gain},
      {"ffn_norm_bias", &LayerWeights::ffn_norm_bias},
  }};

  bool operator==(const LayerWeights&) const;
};

struct ModelWeights {
  Matrix token_embedding;     // vocab x width
  Matrix position_embedding;  // max_seq_len x width
  std::vector<LayerWeights> layers;
  Matrix classifier_w;  // width x classes
  Matrix classifier_b;  // 1 x classes

  // Same shapes, all zeros.
  ModelWeights zeros_like() const;
  bool operator==(const ModelWeights&) const;
};

// Calls f(name, tensor_of_w0, tensor_of_w1, ...) for the embeddings, each
// layer listed in `layers` and the classifier, in that order.
template <class F, class... W>
void zip_tensors(std::span<const LayerId> layers, F&& f, W&... w) {
  f(std::string("token_embedding"), w.token_embedding...);
  f(std::string("position_embedding"), w.position_embedding...);
  for (LayerId id : layers) {
    const std::string prefix = "layer" + std::to_string(id) + ".";
    for (const LayerWeights::Tensor& t : LayerWeights::kTensors) {
      f(prefix + t.name, (w.layers[static_cast<std::size_t>(id)].*t.member)...);
    }
  }
  f(std::string("classifier_w"), w.classifier_w...);
  f(std::string("classifier_b"), w.classifier_b...);
}

enum class LossKind { kCrossEntropy, kSquaredError };

// A small transformer encoder with removable layers, mean pooling and a
// linear classifier.
//
// The model always stores all `depth` layer blocks; pruning only edits the
// active list, so the parameters of other layers are never touched.
class ToyTransformer {
 public:
  // Random initialization from `seed`.
  static ToyTransformer initialize(const ToyConfig& config, std::uint64_t seed);

  // Throws InvalidRequest when weight shapes disagree with `config`.
  ToyTransformer(ToyConfig config, ModelWeights weights);

  const ToyConfig& config() const { return config_; }
  const ModelWeights& weights() const { return weights_; }
  ModelWeights& mutable_weights() { return weights_; }

  std::span<const LayerId> active_layers() const { return active_; }
  // Restricts the forward pass to `kept` (any order; stored ascending).
  void set_active_layers(std::span<const LayerId> kept);
  void prune(LayerId layer);

  // Replaces the classifier with a fresh one of `num_classes` outputs.
  void reset_classifier(int num_classes, std::uint64_t seed);

  // Logits (batch x classes) in inference mode. Throws InvalidRequest on
  // out-of-vocabulary tokens or sequences longer than max_seq_len.
  Matrix forward(const std::vector<std::vector<int>>& batch) const;
  // Final hidden states (tokens x width) of one sequence.
  Matrix encode(std::span<const int> tokens) const;

  // Mean loss over the batch and its gradient, accumulated into `grads`
  // (which must be zeros_like() shaped). Dropout is applied when
  // `dropout_rng` is non-null.
  double loss_and_gradient(const std::vector<std::vector<int>>& batch,
                           std::span<const double> targets, LossKind loss,
                           ModelWeights& grads,
                           std::mt19937_64* dropout_rng) const;

  // Mean loss without gradients, inference mode.
  double loss(const std::vector<std::vector<int>>& batch,
              std::span<const double> targets, LossKind loss) const;

  // Per-token hidden states with the bookkeeping backward needs; exposed
  // for heads other than the classifier (masked-token pretraining).
  struct Trace;
  Matrix encode_traced(std::span<const int> tokens, std::mt19937_64* dropout_rng,
                       Trace& trace) const;
  // Back-propagates d(loss)/d(hidden) of a traced sequence into `grads`.
  void encode_backward(const Trace& trace, const Matrix& d_hidden,
                       ModelWeights& grads) const;

 private:
  void check_tokens(std::span<const int> tokens) const;

  ToyConfig config_;
  ModelWeights weights_;
  std::vector<LayerId> active_;
};

struct LayerTrace {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> attention;  // per head, tokens x tokens
  Matrix context;
  Matrix attn_dropout_mask;
  Matrix attn_norm_xhat;
  Eigen::VectorXd attn_norm_inv_std;
  Matrix after_attn;
  Matrix ffn_pre;
  Matrix ffn_act;
  Matrix ffn_dropout_mask;
  Matrix ffn_norm_xhat;
  Eigen::VectorXd ffn_norm_inv_std;
};

struct ToyTransformer::Trace {
  std::vector<int> tokens;
  std::vector<LayerId> layers;
  std::vector<LayerTrace> steps;
};

// Copy of `model` whose depth is the number of its active layers: the kept
// blocks renumbered 0..k-1. Used to check that pruning is structural.
ToyTransformer compact(const ToyTransformer& model);

std::size_t parameter_count(const ModelWeights& weights,
                            std::span<const LayerId> layers);

}  // namespace glp::toy

#endif  // GLP_TOY_MODEL_HPP_
