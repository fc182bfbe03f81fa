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

#include "glp/toy/model.hpp"

#include <algorithm>
#include <cmath>

#include "glp/error.hpp"

namespace glp::toy {
namespace {

constexpr double kNormEps = 1e-5;
// sqrt(2 / pi) for the tanh approximation of GELU.
constexpr double kGeluC = 0.7978845608028654;
constexpr double kGeluA = 0.044715;

Matrix random_matrix(int rows, int cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

LayerWeights random_layer(const ToyConfig& c, std::mt19937_64& rng) {
  const double sw = 1.0 / std::sqrt(static_cast<double>(c.width));
  const double sf = 1.0 / std::sqrt(static_cast<double>(c.ffn_width));
  LayerWeights l;
  l.query_w = random_matrix(c.width, c.width, sw, rng);
  l.key_w = random_matrix(c.width, c.width, sw, rng);
  l.value_w = random_matrix(c.width, c.width, sw, rng);
  l.output_w = random_matrix(c.width, c.width, sw, rng);
  l.ffn_in_w = random_matrix(c.width, c.ffn_width, sw, rng);
  l.ffn_out_w = random_matrix(c.ffn_width, c.width, sf, rng);
  l.query_b = l.key_b = l.value_b = l.output_b = Matrix::Zero(1, c.width);
  l.ffn_in_b = Matrix::Zero(1, c.ffn_width);
  l.ffn_out_b = Matrix::Zero(1, c.width);
  l.attn_norm_gain = l.ffn_norm_gain = Matrix::Ones(1, c.width);
  l.attn_norm_bias = l.ffn_norm_bias = Matrix::Zero(1, c.width);
  return l;
}

void add_bias(Matrix& m, const Matrix& bias) { m.rowwise() += bias.row(0); }

void layer_norm(const Matrix& u, const Matrix& gain, const Matrix& bias,
                Matrix& xhat, Eigen::VectorXd& inv_std, Matrix& out) {
  xhat.resize(u.rows(), u.cols());
  inv_std.resize(u.rows());
  for (Eigen::Index t = 0; t < u.rows(); ++t) {
    const double mean = u.row(t).mean();
    const Eigen::RowVectorXd centered = u.row(t).array() - mean;
    const double var = centered.squaredNorm() / static_cast<double>(u.cols());
    inv_std(t) = 1.0 / std::sqrt(var + kNormEps);
    xhat.row(t) = centered * inv_std(t);
  }
  out = xhat.array().rowwise() * gain.row(0).array();
  add_bias(out, bias);
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& xhat,
                           const Eigen::VectorXd& inv_std, const Matrix& gain,
                           Matrix& d_gain, Matrix& d_bias) {
  d_gain += (dy.array() * xhat.array()).colwise().sum().matrix();
  d_bias += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * gain.row(0).array();
  Matrix du(dy.rows(), dy.cols());
  for (Eigen::Index t = 0; t < dy.rows(); ++t) {
    const double m1 = dxhat.row(t).mean();
    const double m2 = dxhat.row(t).dot(xhat.row(t)) / static_cast<double>(dy.cols());
    du.row(t) = inv_std(t) * (dxhat.row(t).array() - m1 - xhat.row(t).array() * m2);
  }
  return du;
}

void softmax_rows(Matrix& s) {
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    s.row(r) = (s.row(r).array() - mx).exp();
    s.row(r) /= s.row(r).sum();
  }
}

// Inverted dropout mask, empty when dropout is inactive.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                    std::mt19937_64* rng) {
  if (rng == nullptr || rate <= 0) return {};
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix m(rows, cols);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(*rng) ? scale : 0.0;
  return m;
}

void apply_mask(Matrix& m, const Matrix& mask) {
  if (mask.size() != 0) m.array() *= mask.array();
}

Matrix layer_forward(const ToyConfig& c, const LayerWeights& w, const Matrix& x,
                     std::mt19937_64* rng, LayerTrace& tr) {
  const int dh = c.head_width();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  tr.input = x;
  tr.q = x * w.query_w;
  add_bias(tr.q, w.query_b);
  tr.k = x * w.key_w;
  add_bias(tr.k, w.key_b);
  tr.v = x * w.value_w;
  add_bias(tr.v, w.value_b);

  tr.context.resize(x.rows(), c.width);
  tr.attention.resize(static_cast<std::size_t>(c.heads));
  for (int h = 0; h < c.heads; ++h) {
    Matrix s = scale * tr.q.middleCols(h * dh, dh) *
               tr.k.middleCols(h * dh, dh).transpose();
    softmax_rows(s);
    tr.context.middleCols(h * dh, dh) = s * tr.v.middleCols(h * dh, dh);
    tr.attention[static_cast<std::size_t>(h)] = std::move(s);
  }
  Matrix attn_out = tr.context * w.output_w;
  add_bias(attn_out, w.output_b);
  tr.attn_dropout_mask = dropout_mask(x.rows(), c.width, c.dropout, rng);
  apply_mask(attn_out, tr.attn_dropout_mask);
  layer_norm(x + attn_out, w.attn_norm_gain, w.attn_norm_bias,
             tr.attn_norm_xhat, tr.attn_norm_inv_std, tr.after_attn);

  tr.ffn_pre = tr.after_attn * w.ffn_in_w;
  add_bias(tr.ffn_pre, w.ffn_in_b);
  tr.ffn_act = tr.ffn_pre.unaryExpr([](double v) {
    return 0.5 * v * (1.0 + std::tanh(kGeluC * (v + kGeluA * v * v * v)));
  });
  Matrix ffn_out = tr.ffn_act * w.ffn_out_w;
  add_bias(ffn_out, w.ffn_out_b);
  tr.ffn_dropout_mask = dropout_mask(x.rows(), c.width, c.dropout, rng);
  apply_mask(ffn_out, tr.ffn_dropout_mask);

  Matrix out;
  layer_norm(tr.after_attn + ffn_out, w.ffn_norm_gain, w.ffn_norm_bias,
             tr.ffn_norm_xhat, tr.ffn_norm_inv_std, out);
  return out;
}

Matrix layer_backward(const ToyConfig& c, const LayerWeights& w,
                      const LayerTrace& tr, const Matrix& d_out,
                      LayerWeights& g) {
  const int dh = c.head_width();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  // Feed-forward sublayer.
  const Matrix dz = layer_norm_backward(d_out, tr.ffn_norm_xhat,
                                        tr.ffn_norm_inv_std, w.ffn_norm_gain,
                                        g.ffn_norm_gain, g.ffn_norm_bias);
  Matrix d_ffn_out = dz;
  apply_mask(d_ffn_out, tr.ffn_dropout_mask);
  g.ffn_out_w.noalias() += tr.ffn_act.transpose() * d_ffn_out;
  g.ffn_out_b += d_ffn_out.colwise().sum();
  Matrix d_act = d_ffn_out * w.ffn_out_w.transpose();
  const Matrix gelu_grad = tr.ffn_pre.unaryExpr([](double v) {
    const double t = std::tanh(kGeluC * (v + kGeluA * v * v * v));
    return 0.5 * (1.0 + t) +
           0.5 * v * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * v * v);
  });
  const Matrix d_pre = d_act.array() * gelu_grad.array();
  g.ffn_in_w.noalias() += tr.after_attn.transpose() * d_pre;
  g.ffn_in_b += d_pre.colwise().sum();
  const Matrix d_after_attn = dz + d_pre * w.ffn_in_w.transpose();

  // Attention sublayer.
  const Matrix du = layer_norm_backward(d_after_attn, tr.attn_norm_xhat,
                                        tr.attn_norm_inv_std, w.attn_norm_gain,
                                        g.attn_norm_gain, g.attn_norm_bias);
  Matrix d_attn_out = du;
  apply_mask(d_attn_out, tr.attn_dropout_mask);
  g.output_w.noalias() += tr.context.transpose() * d_attn_out;
  g.output_b += d_attn_out.colwise().sum();
  const Matrix d_context = d_attn_out * w.output_w.transpose();

  Matrix dq(tr.q.rows(), c.width), dk(tr.k.rows(), c.width),
      dv(tr.v.rows(), c.width);
  for (int h = 0; h < c.heads; ++h) {
    const Matrix& a = tr.attention[static_cast<std::size_t>(h)];
    const auto dc = d_context.middleCols(h * dh, dh);
    dv.middleCols(h * dh, dh) = a.transpose() * dc;
    const Matrix da = dc * tr.v.middleCols(h * dh, dh).transpose();
    const Eigen::VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
    const Matrix ds = a.array() * (da.colwise() - row_dot).array();
    dq.middleCols(h * dh, dh) = scale * ds * tr.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh) = scale * ds.transpose() * tr.q.middleCols(h * dh, dh);
  }
  g.query_w.noalias() += tr.input.transpose() * dq;
  g.query_b += dq.colwise().sum();
  g.key_w.noalias() += tr.input.transpose() * dk;
  g.key_b += dk.colwise().sum();
  g.value_w.noalias() += tr.input.transpose() * dv;
  g.value_b += dv.colwise().sum();

  Matrix dx = du;
  dx.noalias() += dq * w.query_w.transpose();
  dx.noalias() += dk * w.key_w.transpose();
  dx.noalias() += dv * w.value_w.transpose();
  return dx;
}

bool same_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  return m.rows() == rows && m.cols() == cols;
}

void check_shapes(const ToyConfig& c, const ModelWeights& w) {
  const auto fail = [](const std::string& what) {
    throw InvalidRequest("toy weights do not match config: " + what);
  };
  if (!same_shape(w.token_embedding, c.vocab_size, c.width)) fail("token_embedding");
  if (!same_shape(w.position_embedding, c.max_seq_len, c.width)) fail("position_embedding");
  if (static_cast<int>(w.layers.size()) != c.depth) fail("layer count");
  for (const LayerWeights& l : w.layers) {
    for (const auto& t : LayerWeights::kTensors) {
      const std::string_view name = t.name;
      const bool is_vector = !name.ends_with("_w");
      Eigen::Index rows = is_vector ? 1 : c.width;
      Eigen::Index cols = c.width;
      if (name.starts_with("ffn_in")) cols = c.ffn_width;
      if (name == "ffn_out_w") rows = c.ffn_width;
      if (!same_shape(l.*t.member, rows, cols)) fail(t.name);
    }
  }
  if (!same_shape(w.classifier_w, c.width, c.num_classes)) fail("classifier_w");
  if (!same_shape(w.classifier_b, 1, c.num_classes)) fail("classifier_b");
}

}  // namespace

bool LayerWeights::operator==(const LayerWeights& other) const {
  for (const Tensor& t : kTensors) {
    const Matrix& a = this->*t.member;
    const Matrix& b = other.*t.member;
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

bool ModelWeights::operator==(const ModelWeights& other) const {
  auto eq = [](const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return eq(token_embedding, other.token_embedding) &&
         eq(position_embedding, other.position_embedding) &&
         layers == other.layers && eq(classifier_w, other.classifier_w) &&
         eq(classifier_b, other.classifier_b);
}

ModelWeights ModelWeights::zeros_like() const {
  ModelWeights z = *this;
  std::vector<LayerId> all(layers.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<LayerId>(i);
  zip_tensors(all, [](const std::string&, Matrix& m) { m.setZero(); }, z);
  return z;
}

ToyTransformer ToyTransformer::initialize(const ToyConfig& config,
                                          std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  ModelWeights w;
  w.token_embedding = random_matrix(config.vocab_size, config.width, 1.0, rng);
  w.position_embedding = random_matrix(config.max_seq_len, config.width, 0.5, rng);
  for (int i = 0; i < config.depth; ++i) w.layers.push_back(random_layer(config, rng));
  w.classifier_w = random_matrix(config.width, config.num_classes,
                                 1.0 / std::sqrt(static_cast<double>(config.width)), rng);
  w.classifier_b = Matrix::Zero(1, config.num_classes);
  return ToyTransformer(config, std::move(w));
}

ToyTransformer::ToyTransformer(ToyConfig config, ModelWeights weights)
    : config_(config), weights_(std::move(weights)) {
  config_.validate();
  check_shapes(config_, weights_);
  for (int i = 0; i < config_.depth; ++i) active_.push_back(i);
}

void ToyTransformer::set_active_layers(std::span<const LayerId> kept) {
  std::vector<LayerId> sorted(kept.begin(), kept.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= config_.depth ||
        (i > 0 && sorted[i] == sorted[i - 1])) {
      throw InvalidRequest("invalid kept layer list " + format_layers(kept));
    }
  }
  active_ = std::move(sorted);
}

void ToyTransformer::prune(LayerId layer) {
  const auto it = std::find(active_.begin(), active_.end(), layer);
  if (it == active_.end()) {
    throw InvalidRequest("layer " + std::to_string(layer) + " is not active");
  }
  active_.erase(it);
}

void ToyTransformer::reset_classifier(int num_classes, std::uint64_t seed) {
  if (num_classes <= 0) throw InvalidRequest("classifier needs >= 1 output");
  std::mt19937_64 rng(seed);
  config_.num_classes = num_classes;
  weights_.classifier_w = random_matrix(
      config_.width, num_classes,
      1.0 / std::sqrt(static_cast<double>(config_.width)), rng);
  weights_.classifier_b = Matrix::Zero(1, num_classes);
}

void ToyTransformer::check_tokens(std::span<const int> tokens) const {
  if (tokens.empty()) throw InvalidRequest("empty token sequence");
  if (static_cast<int>(tokens.size()) > config_.max_seq_len) {
    throw InvalidRequest("sequence of " + std::to_string(tokens.size()) +
                         " tokens exceeds max_seq_len " +
                         std::to_string(config_.max_seq_len));
  }
  for (int t : tokens) {
    if (t < 0 || t >= config_.vocab_size) {
      throw InvalidRequest("token " + std::to_string(t) +
                           " outside vocabulary of " +
                           std::to_string(config_.vocab_size));
    }
  }
}

Matrix ToyTransformer::encode_traced(std::span<const int> tokens,
                                     std::mt19937_64* dropout_rng,
                                     Trace& trace) const {
  check_tokens(tokens);
  const auto n = static_cast<Eigen::Index>(tokens.size());
  Matrix h(n, config_.width);
  for (Eigen::Index t = 0; t < n; ++t) {
    h.row(t) = weights_.token_embedding.row(tokens[static_cast<std::size_t>(t)]) +
               weights_.position_embedding.row(t);
  }
  trace.tokens.assign(tokens.begin(), tokens.end());
  trace.layers = active_;
  trace.steps.assign(active_.size(), LayerTrace{});
  for (std::size_t i = 0; i < active_.size(); ++i) {
    h = layer_forward(config_, weights_.layers[static_cast<std::size_t>(active_[i])],
                      h, dropout_rng, trace.steps[i]);
  }
  return h;
}

void ToyTransformer::encode_backward(const Trace& trace, const Matrix& d_hidden,
                                     ModelWeights& grads) const {
  Matrix dh = d_hidden;
  for (std::size_t i = trace.layers.size(); i-- > 0;) {
    const auto id = static_cast<std::size_t>(trace.layers[i]);
    dh = layer_backward(config_, weights_.layers[id], trace.steps[i], dh,
                        grads.layers[id]);
  }
  for (Eigen::Index t = 0; t < dh.rows(); ++t) {
    grads.token_embedding.row(trace.tokens[static_cast<std::size_t>(t)]) += dh.row(t);
    grads.position_embedding.row(t) += dh.row(t);
  }
}

Matrix ToyTransformer::encode(std::span<const int> tokens) const {
  Trace trace;
  return encode_traced(tokens, nullptr, trace);
}

Matrix ToyTransformer::forward(const std::vector<std::vector<int>>& batch) const {
  Matrix logits(static_cast<Eigen::Index>(batch.size()), config_.num_classes);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Matrix h = encode(batch[b]);
    logits.row(static_cast<Eigen::Index>(b)) =
        h.colwise().mean() * weights_.classifier_w + weights_.classifier_b;
  }
  return logits;
}

namespace {

// Loss of one example and d(loss)/d(logits).
double head_loss(const Eigen::RowVectorXd& logits, double target, LossKind kind,
                 Eigen::RowVectorXd& d_logits) {
  if (kind == LossKind::kSquaredError) {
    const double diff = logits(0) - target;
    d_logits = Eigen::RowVectorXd::Zero(logits.size());
    d_logits(0) = 2.0 * diff;
    return diff * diff;
  }
  const auto cls = static_cast<Eigen::Index>(target);
  if (cls < 0 || cls >= logits.size()) {
    throw InvalidRequest("label " + std::to_string(target) +
                         " outside the classifier's classes");
  }
  const double mx = logits.maxCoeff();
  const Eigen::RowVectorXd e = (logits.array() - mx).exp();
  const double z = e.sum();
  d_logits = e / z;
  d_logits(cls) -= 1.0;
  return -(logits(cls) - mx - std::log(z));
}

}  // namespace

double ToyTransformer::loss_and_gradient(
    const std::vector<std::vector<int>>& batch, std::span<const double> targets,
    LossKind loss, ModelWeights& grads, std::mt19937_64* dropout_rng) const {
  if (batch.size() != targets.size() || batch.empty()) {
    throw InvalidRequest("batch and targets must be non-empty and equal length");
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  Eigen::RowVectorXd d_logits;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    Trace trace;
    const Matrix h = encode_traced(batch[b], dropout_rng, trace);
    const Eigen::RowVectorXd pooled = h.colwise().mean();
    const Eigen::RowVectorXd logits =
        pooled * weights_.classifier_w + weights_.classifier_b;
    total += head_loss(logits, targets[b], loss, d_logits);
    d_logits *= inv_b;
    grads.classifier_w.noalias() += pooled.transpose() * d_logits;
    grads.classifier_b += d_logits;
    const Eigen::RowVectorXd d_pooled =
        d_logits * weights_.classifier_w.transpose() /
        static_cast<double>(h.rows());
    const Matrix d_hidden = d_pooled.replicate(h.rows(), 1);
    encode_backward(trace, d_hidden, grads);
  }
  return total * inv_b;
}

double ToyTransformer::loss(const std::vector<std::vector<int>>& batch,
                            std::span<const double> targets,
                            LossKind kind) const {
  if (batch.size() != targets.size() || batch.empty()) {
    throw InvalidRequest("batch and targets must be non-empty and equal length");
  }
  const Matrix logits = forward(batch);
  double total = 0.0;
  Eigen::RowVectorXd unused;
  for (Eigen::Index b = 0; b < logits.rows(); ++b) {
    total += head_loss(logits.row(b), targets[static_cast<std::size_t>(b)], kind,
                       unused);
  }
  return total / static_cast<double>(batch.size());
}

ToyTransformer compact(const ToyTransformer& model) {
  ToyConfig config = model.config();
  config.depth = static_cast<int>(model.active_layers().size());
  ModelWeights w = model.weights();
  w.layers.clear();
  for (LayerId id : model.active_layers()) {
    w.layers.push_back(model.weights().layers[static_cast<std::size_t>(id)]);
  }
  return ToyTransformer(config, std::move(w));
}

std::size_t parameter_count(const ModelWeights& weights,
                            std::span<const LayerId> layers) {
  std::size_t n = 0;
  zip_tensors(layers, [&n](const std::string&, const Matrix& m) {
    n += static_cast<std::size_t>(m.size());
  }, weights);
  return n;
}

}  // namespace glp::toy
