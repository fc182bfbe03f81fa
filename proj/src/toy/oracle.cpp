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

#include "glp/toy/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "glp/error.hpp"
#include "glp/metrics/split.hpp"
#include "glp/toy/checkpoint.hpp"
#include "glp/toy/trainer.hpp"

namespace glp::toy {
namespace {

struct Batch {
  std::vector<std::vector<int>> tokens;
  std::vector<double> targets;
};

Batch gather(const TaskSpec& task, std::span<const std::size_t> indices) {
  Batch b;
  b.tokens.reserve(indices.size());
  b.targets.reserve(indices.size());
  for (std::size_t i : indices) {
    b.tokens.push_back(task.examples[i].tokens);
    b.targets.push_back(task.examples[i].label);
  }
  return b;
}

MetricValue natural_metric(const TaskSpec& task, const Matrix& logits,
                           std::span<const double> targets) {
  if (task.is_regression()) {
    std::vector<double> preds(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      preds[static_cast<std::size_t>(r)] = logits(r, 0);
    }
    return spearman_corr(preds, targets);
  }
  std::vector<int> preds(static_cast<std::size_t>(logits.rows()));
  std::vector<int> golds(targets.size());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    preds[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    golds[i] = static_cast<int>(targets[i]);
  }
  switch (task.metric) {
    case MetricKind::kAccuracy:
      return accuracy(preds, golds);
    case MetricKind::kF1:
      return f1_binary(preds, golds);
    case MetricKind::kMatthewsCorr:
      return matthews_corr(preds, golds);
    default:
      throw InvalidRequest("metric " + std::string(metric_name(task.metric)) +
                           " does not apply to classification");
  }
}

}  // namespace

Evaluation fine_tune_and_score(const ToyTransformer& pretrained,
                               std::span<const LayerId> kept,
                               const TaskSpec& task, std::uint64_t seed,
                               const TrainSpec& spec,
                               double validation_fraction) {
  spec.validate();
  validate(task);
  const ToyConfig& c = pretrained.config();
  if (task.vocab_size > c.vocab_size || task.seq_len > c.max_seq_len) {
    throw InvalidRequest("task '" + task.name +
                         "' does not fit the checkpoint's vocabulary or length");
  }

  const Split split =
      split_train_validation(task, SplitSpec{validation_fraction, task.split_seed, true});

  ToyTransformer model = pretrained;
  model.set_active_layers(kept);
  model.reset_classifier(task.is_regression() ? 1 : task.num_labels, seed);
  const LossKind loss =
      task.is_regression() ? LossKind::kSquaredError : LossKind::kCrossEntropy;

  std::mt19937_64 shuffle_rng(seed ^ 0x5eedf00dULL);
  std::mt19937_64 dropout_rng(seed ^ 0xd40d40ULL);
  AdamW optimizer(spec);
  std::vector<std::size_t> order = split.train;
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  try {
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (std::size_t at = 0; at < order.size(); at += batch) {
        const std::size_t end = std::min(order.size(), at + batch);
        const Batch b = gather(task, std::span(order).subspan(at, end - at));
        backward_and_step(model, b.tokens, b.targets, loss, optimizer, &dropout_rng);
      }
    }
  } catch (const DivergenceError& e) {
    return Evaluation::failed(e.what());
  }

  const Batch val = gather(task, split.validation);
  const Matrix logits = model.forward(val.tokens);
  if (!logits.allFinite()) return Evaluation::failed("non-finite validation logits");
  Evaluation out;
  try {
    out.metric = natural_metric(task, logits, val.targets).value;
  } catch (const InvalidRequest& e) {
    // Spearman of constant predictions is undefined.
    return Evaluation::failed(e.what());
  }
  out.validation_loss = model.loss(val.tokens, val.targets, loss);
  return out;
}

ToyOracle::ToyOracle(ToyTransformer pretrained, TrainSpec spec)
    : pretrained_(std::move(pretrained)), spec_(spec) {
  spec_.validate();
  checkpoint_hash_ = to_hex(fnv1a64(serialize_checkpoint(pretrained_)));
}

Evaluation ToyOracle::evaluate(std::span<const LayerId> kept,
                               const TaskSpec& task, std::uint64_t seed) const {
  if (kept.empty()) throw InvalidRequest("kept_layers must be non-empty");
  return fine_tune_and_score(pretrained_, kept, task, seed, spec_);
}

std::string ToyOracle::hyperparameters() const {
  return pretrained_.config().canonical() + ";" + spec_.canonical() +
         ";validation=0.15;checkpoint=" + checkpoint_hash_;
}

void sabotage_layer(ToyTransformer& model, LayerId layer, double scale,
                    std::uint64_t seed) {
  if (layer < 0 || layer >= model.config().depth) {
    throw InvalidRequest("no layer " + std::to_string(layer) + " to sabotage");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, scale);
  LayerWeights& w = model.mutable_weights().layers[static_cast<std::size_t>(layer)];
  for (const LayerWeights::Tensor& t : LayerWeights::kTensors) {
    Matrix& m = w.*t.member;
    m = Matrix::NullaryExpr(m.rows(), m.cols(), [&] { return noise(rng); });
  }
}

}  // namespace glp::toy
