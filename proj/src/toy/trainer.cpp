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

#include "glp/toy/trainer.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace glp::toy {
namespace {

std::string divergence_report(const ToyTransformer& model,
                              const ModelWeights& grads, double loss) {
  std::ostringstream os;
  os << "training diverged: loss=" << loss;
  zip_tensors(model.active_layers(),
              [&os](const std::string& name, const Matrix& w, const Matrix& g) {
                os << "\n  " << name << " |w|=" << w.norm() << " |g|=" << g.norm();
              },
              model.weights(), grads);
  return os.str();
}

}  // namespace

bool decays(const std::string& tensor_name) {
  return tensor_name.ends_with("_w") || tensor_name.ends_with("embedding");
}

void AdamW::update(const std::string& name, Matrix& param, const Matrix& grad,
                   bool decay) {
  Moments& s = state_[name];
  if (s.m.size() == 0) {
    s.m = Matrix::Zero(param.rows(), param.cols());
    s.v = Matrix::Zero(param.rows(), param.cols());
  }
  const double t = static_cast<double>(step_ > 0 ? step_ : 1);
  s.m = spec_.beta1 * s.m + (1.0 - spec_.beta1) * grad;
  s.v = spec_.beta2 * s.v + (1.0 - spec_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(spec_.beta1, t);
  const double c2 = 1.0 - std::pow(spec_.beta2, t);
  const double lr = spec_.learning_rate;
  if (decay && spec_.weight_decay != 0.0) param *= 1.0 - lr * spec_.weight_decay;
  param.array() -=
      lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + spec_.epsilon);
}

double backward_and_step(ToyTransformer& model,
                         const std::vector<std::vector<int>>& batch,
                         std::span<const double> targets, LossKind loss,
                         AdamW& optimizer, std::mt19937_64* dropout_rng) {
  ModelWeights grads = model.weights().zeros_like();
  const double value =
      model.loss_and_gradient(batch, targets, loss, grads, dropout_rng);
  bool finite = std::isfinite(value);
  zip_tensors(model.active_layers(),
              [&finite](const std::string&, const Matrix& g) {
                finite = finite && g.allFinite();
              },
              grads);
  if (!finite) throw DivergenceError(divergence_report(model, grads, value));

  optimizer.begin_step();
  const std::vector<LayerId> active(model.active_layers().begin(),
                                    model.active_layers().end());
  zip_tensors(active,
              [&optimizer](const std::string& name, Matrix& p, const Matrix& g) {
                optimizer.update(name, p, g, decays(name));
              },
              model.mutable_weights(), std::as_const(grads));
  return value;
}

}  // namespace glp::toy
