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

#include "glp/toy/pretrain.hpp"

#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "glp/error.hpp"
#include "glp/toy/tasks.hpp"
#include "glp/toy/trainer.hpp"

namespace glp::toy {
namespace {

struct Head {
  Matrix w;  // width x vocab
  Matrix b;  // 1 x vocab
};

}  // namespace

PretrainResult pretrain(const PretrainSpec& spec,
                        const std::function<void(int, double)>& progress) {
  spec.config.validate();
  if (spec.seq_len > spec.config.max_seq_len || spec.seq_len < 2) {
    throw InvalidRequest("pretraining seq_len must be in [2, max_seq_len]");
  }
  if (spec.mask_rate <= 0.0 || spec.mask_rate >= 1.0) {
    throw InvalidRequest("mask_rate must be in (0, 1)");
  }
  const int vocab = spec.config.vocab_size;
  const SyntheticLanguage language(vocab, kLanguageSeed);
  std::mt19937_64 rng(spec.seed);

  PretrainResult result{ToyTransformer::initialize(spec.config, spec.seed), {}};
  ToyTransformer& model = result.model;
  const int width = spec.config.width;

  Head head;
  std::normal_distribution<double> init(0.0, 1.0 / std::sqrt(width));
  head.w = Matrix::NullaryExpr(width, vocab, [&] { return init(rng); });
  head.b = Matrix::Zero(1, vocab);

  TrainSpec opt_spec;
  opt_spec.learning_rate = spec.learning_rate;
  AdamW optimizer(opt_spec);

  std::bernoulli_distribution signal(spec.signal_rate);
  std::bernoulli_distribution mask(spec.mask_rate);
  std::uniform_int_distribution<int> signal_token(1, kFirstFillerToken - 1);
  std::uniform_int_distribution<int> any_position(0, spec.seq_len - 1);

  for (int step = 0; step < spec.steps; ++step) {
    ModelWeights grads = model.weights().zeros_like();
    Head head_grad{Matrix::Zero(width, vocab), Matrix::Zero(1, vocab)};
    double total = 0.0;
    int masked_total = 0;

    struct Item {
      ToyTransformer::Trace trace;
      Matrix hidden;
      std::vector<int> original;
      std::vector<int> positions;
    };
    std::vector<Item> items(static_cast<std::size_t>(spec.batch_size));
    for (Item& item : items) {
      item.original = language.sample(spec.seq_len, rng);
      for (int& t : item.original) {
        if (signal(rng)) t = signal_token(rng);
      }
      std::vector<int> input = item.original;
      for (int p = 0; p < spec.seq_len; ++p) {
        if (mask(rng)) item.positions.push_back(p);
      }
      if (item.positions.empty()) item.positions.push_back(any_position(rng));
      for (int p : item.positions) input[static_cast<std::size_t>(p)] = kMaskToken;
      item.hidden = model.encode_traced(input, &rng, item.trace);
      masked_total += static_cast<int>(item.positions.size());
    }

    for (Item& item : items) {
      Matrix d_hidden = Matrix::Zero(item.hidden.rows(), item.hidden.cols());
      for (int p : item.positions) {
        const Matrix h = item.hidden.row(p);
        Matrix logits = h * head.w + head.b;
        const double m = logits.maxCoeff();
        Matrix prob = (logits.array() - m).exp().matrix();
        const double z = prob.sum();
        prob /= z;
        const int gold = item.original[static_cast<std::size_t>(p)];
        total += -(logits(0, gold) - m - std::log(z));
        prob(0, gold) -= 1.0;
        prob /= masked_total;
        head_grad.w.noalias() += h.transpose() * prob;
        head_grad.b += prob;
        d_hidden.row(p) += prob * head.w.transpose();
      }
      model.encode_backward(item.trace, d_hidden, grads);
    }
    const double loss = total / masked_total;
    if (!std::isfinite(loss)) {
      throw DivergenceError("pretraining diverged at step " + std::to_string(step));
    }

    optimizer.begin_step();
    const std::vector<LayerId> active(model.active_layers().begin(),
                                      model.active_layers().end());
    zip_tensors(active,
                [&optimizer](const std::string& name, Matrix& p, const Matrix& g) {
                  if (name.starts_with("classifier")) return;
                  optimizer.update(name, p, g, decays(name));
                },
                model.mutable_weights(), std::as_const(grads));
    optimizer.update("mlm_head_w", head.w, head_grad.w, true);
    optimizer.update("mlm_head_b", head.b, head_grad.b, false);

    result.losses.push_back(loss);
    if (progress) progress(step, loss);
  }
  return result;
}

}  // namespace glp::toy
