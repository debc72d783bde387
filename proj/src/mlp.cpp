// SPDX-License-Identifier: Apache-2.0
#include "beampred/mlp.hpp"

#include <beampred/error.hpp>
#include <beampred/rng.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace beampred {

void MlpArchitecture::validate() const {
  if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("layer sizes must be >= 1");
  for (std::size_t h : hidden_dims) {
    if (h < 1) throw std::invalid_argument("layer sizes must be >= 1");
  }
}

MlpModel::MlpModel(MlpArchitecture architecture, std::vector<DenseLayer> layers,
                   std::uint64_t seed)
    : architecture_(std::move(architecture)), layers_(std::move(layers)), seed_(seed) {
  architecture_.validate();
  if (layers_.size() != architecture_.hidden_dims.size() + 1)
    throw std::invalid_argument("layer count does not match the architecture");
  auto fan_in = static_cast<Eigen::Index>(architecture_.input_dim);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto fan_out = static_cast<Eigen::Index>(
        l < architecture_.hidden_dims.size() ? architecture_.hidden_dims[l]
                                             : architecture_.output_dim);
    if (layers_[l].weight.rows() != fan_out || layers_[l].weight.cols() != fan_in ||
        layers_[l].bias.size() != fan_out)
      throw std::invalid_argument("layer " + std::to_string(l) + " has inconsistent shape");
    fan_in = fan_out;
  }
}

namespace {

std::vector<DenseLayer> zero_layers(const MlpArchitecture& arch) {
  std::vector<DenseLayer> layers;
  auto fan_in = static_cast<Eigen::Index>(arch.input_dim);
  for (std::size_t l = 0; l <= arch.hidden_dims.size(); ++l) {
    const auto fan_out = static_cast<Eigen::Index>(
        l < arch.hidden_dims.size() ? arch.hidden_dims[l] : arch.output_dim);
    layers.push_back({Eigen::MatrixXd::Zero(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)});
    fan_in = fan_out;
  }
  return layers;
}

}  // namespace

MlpModel MlpModel::zeros(const MlpArchitecture& architecture) {
  architecture.validate();
  return MlpModel(architecture, zero_layers(architecture));
}

MlpModel MlpModel::initialize(const MlpArchitecture& architecture, std::uint64_t seed) {
  architecture.validate();
  auto layers = zero_layers(architecture);
  Rng rng(seed);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& w = layers[l].weight;
    const bool output_layer = l + 1 == layers.size();
    const double stddev = output_layer ? 1.0 : std::sqrt(2.0 / static_cast<double>(w.cols()));
    // Row-major fill keeps the draw order independent of Eigen's storage order.
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.normal() * stddev;
  }
  return MlpModel(architecture, std::move(layers), seed);
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_)
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

Eigen::MatrixXd MlpModel::logits(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != architecture_.input_dim)
    throw std::invalid_argument("feature length does not match the model input size");
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

namespace {

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    p.col(c) = (logits.col(c).array() - m).exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

// Index of the largest entry of column c, lowest index on ties.
Eigen::Index argmax_column(const Eigen::MatrixXd& m, Eigen::Index c) {
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < m.rows(); ++r)
    if (m(r, c) > m(best, c)) best = r;
  return best;
}

}  // namespace

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  return softmax_columns(model.logits(inputs));
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& features) {
  return forward_batch(model, features);
}

namespace {

// Fills `grads` (same shapes as the model) and returns (mean loss, correct count).
std::pair<double, std::size_t> backprop(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                        std::span<const std::size_t> labels,
                                        std::vector<DenseLayer>& grads) {
  const auto& layers = model.layers();
  const auto batch = inputs.cols();
  if (batch == 0) throw std::invalid_argument("empty batch");
  if (static_cast<std::size_t>(batch) != labels.size())
    throw std::invalid_argument("one label per input column required");
  if (static_cast<std::size_t>(inputs.rows()) != model.architecture().input_dim)
    throw std::invalid_argument("feature length does not match the model input size");
  const auto out_dim = static_cast<std::size_t>(model.architecture().output_dim);
  for (std::size_t y : labels) {
    if (y >= out_dim) throw std::invalid_argument("label outside the output range");
  }

  // activations[l] is the input to layer l; the last entry holds the logits.
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(layers.size() + 1);
  activations.push_back(inputs);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = layers[l].weight * activations.back();
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size()) z = z.cwiseMax(0.0);
    activations.push_back(std::move(z));
  }

  // Log-sum-exp cross-entropy. delta = (softmax - onehot) / B.
  Eigen::MatrixXd delta = std::move(activations.back());
  activations.pop_back();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  double loss = 0.0;
  std::size_t correct = 0;
  for (Eigen::Index c = 0; c < batch; ++c) {
    const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(c)]);
    if (argmax_column(delta, c) == y) ++correct;
    const double m = delta.col(c).maxCoeff();
    const double lse = m + std::log((delta.col(c).array() - m).exp().sum());
    loss += lse - delta(y, c);
    delta.col(c) = (delta.col(c).array() - lse).exp() * inv_batch;
    delta(y, c) -= inv_batch;
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const Eigen::MatrixXd& a_prev = activations[l];
    grads[l].weight.noalias() = delta * a_prev.transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = layers[l].weight.transpose() * delta;
    // ReLU derivative: a_prev holds max(z, 0), so a_prev > 0 iff z > 0.
    delta = (a_prev.array() > 0.0).select(back, 0.0);
  }
  return {loss * inv_batch, correct};
}

}  // namespace

LossAndGradients loss_and_gradients(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                    std::span<const std::size_t> labels) {
  LossAndGradients out;
  out.gradients.layers = zero_layers(model.architecture());
  std::tie(out.loss, out.correct) = backprop(model, inputs, labels, out.gradients.layers);
  return out;
}

LossAndGradients loss_and_gradients(const MlpModel& model, std::span<const LabeledExample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto dim = static_cast<Eigen::Index>(model.architecture().input_dim);
  Eigen::MatrixXd inputs(dim, static_cast<Eigen::Index>(batch.size()));
  std::vector<std::size_t> labels;
  labels.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].features.size() != dim)
      throw std::invalid_argument("feature length does not match the model input size");
    inputs.col(static_cast<Eigen::Index>(i)) = batch[i].features;
    labels.push_back(batch[i].label.index);
  }
  return loss_and_gradients(model, inputs, labels);
}

AdamState AdamState::zeros_like(const MlpModel& model) {
  AdamState state;
  state.first_moment = zero_layers(model.architecture());
  state.second_moment = zero_layers(model.architecture());
  return state;
}

namespace {

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& param, const Grad& grad, Moment& m, Moment& v, double step_size,
                 double correction2, const AdamParams& p) {
  m.array() = p.beta1 * m.array() + (1.0 - p.beta1) * grad.array();
  v.array() = p.beta2 * v.array() + (1.0 - p.beta2) * grad.array().square();
  param.array() -= step_size * m.array() / ((v.array() / correction2).sqrt() + p.eps);
}

}  // namespace

void adam_step(MlpModel& model, const Gradients& gradients, AdamState& state, double lr,
               const AdamParams& params) {
  auto& layers = model.layers();
  if (gradients.layers.size() != layers.size() || state.first_moment.size() != layers.size() ||
      state.second_moment.size() != layers.size())
    throw std::invalid_argument("gradient or optimizer state does not match the model");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& g = gradients.layers[l];
    if (g.weight.rows() != layers[l].weight.rows() || g.weight.cols() != layers[l].weight.cols() ||
        g.bias.size() != layers[l].bias.size() ||
        state.first_moment[l].weight.size() != layers[l].weight.size())
      throw std::invalid_argument("gradient shape does not match layer " + std::to_string(l));
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(params.beta1, t);
  const double correction2 = 1.0 - std::pow(params.beta2, t);
  const double step_size = lr / correction1;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    adam_update(layers[l].weight, gradients.layers[l].weight, state.first_moment[l].weight,
                state.second_moment[l].weight, step_size, correction2, params);
    adam_update(layers[l].bias, gradients.layers[l].bias, state.first_moment[l].bias,
                state.second_moment[l].bias, step_size, correction2, params);
  }
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(initial_lr >= 0.0) || !std::isfinite(initial_lr))
    throw std::invalid_argument("learning rate must be finite and nonnegative");
  if (!(lr_factor > 0.0 && lr_factor < 1.0))
    throw std::invalid_argument("learning-rate factor must lie in (0, 1)");
  if (epochs < 1) throw std::invalid_argument("need at least one epoch");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.eps > 0.0))
    throw std::invalid_argument("invalid Adam parameters");
}

double learning_rate_at(const TrainConfig& cfg, std::size_t epoch) {
  double lr = cfg.initial_lr;
  for (std::size_t milestone : cfg.lr_decay_epochs)
    if (epoch >= milestone) lr *= cfg.lr_factor;
  return lr;
}

namespace {

bool canonical_less(const LabeledExample& a, const LabeledExample& b) {
  if (a.label.index != b.label.index) return a.label.index < b.label.index;
  return std::lexicographical_compare(a.features.begin(), a.features.end(), b.features.begin(),
                                      b.features.end());
}

bool all_finite(const MlpModel& model) {
  return std::all_of(model.layers().begin(), model.layers().end(), [](const DenseLayer& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

}  // namespace

TrainResult train(MlpModel model, std::span<const LabeledExample> train_set, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("empty training set");
  const auto dim = static_cast<Eigen::Index>(model.architecture().input_dim);

  std::vector<std::size_t> canonical(train_set.size());
  std::iota(canonical.begin(), canonical.end(), std::size_t{0});
  std::stable_sort(canonical.begin(), canonical.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(train_set[a], train_set[b]);
  });
  const auto n = static_cast<Eigen::Index>(train_set.size());
  Eigen::MatrixXd inputs(dim, n);
  std::vector<std::size_t> labels(train_set.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ex = train_set[canonical[static_cast<std::size_t>(i)]];
    if (ex.features.size() != dim)
      throw std::invalid_argument("feature length does not match the model input size");
    if (ex.label.index >= model.architecture().output_dim)
      throw std::invalid_argument("label outside the output range");
    inputs.col(i) = ex.features;
    labels[static_cast<std::size_t>(i)] = ex.label.index;
  }

  AdamState state = AdamState::zeros_like(model);
  Gradients grads{zero_layers(model.architecture())};
  std::vector<std::size_t> order(train_set.size());
  std::vector<std::size_t> batch_labels;
  Eigen::MatrixXd batch_inputs;
  TrainResult result{model, {}};
  result.history.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(cfg.seed, "train/epoch/" + std::to_string(epoch)));
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    const double lr = learning_rate_at(cfg, epoch);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      batch_inputs.resize(dim, static_cast<Eigen::Index>(count));
      batch_labels.resize(count);
      for (std::size_t j = 0; j < count; ++j) {
        batch_inputs.col(static_cast<Eigen::Index>(j)) =
            inputs.col(static_cast<Eigen::Index>(order[start + j]));
        batch_labels[j] = labels[order[start + j]];
      }
      const auto [loss, batch_correct] = backprop(result.model, batch_inputs, batch_labels,
                                                  grads.layers);
      if (!std::isfinite(loss))
        throw NumericError("non-finite training loss in epoch " + std::to_string(epoch + 1));
      loss_sum += loss * static_cast<double>(count);
      correct += batch_correct;
      adam_step(result.model, grads, state, lr, cfg.adam);
    }
    if (!all_finite(result.model))
      throw NumericError("non-finite parameters after epoch " + std::to_string(epoch + 1));
    const auto total = static_cast<double>(order.size());
    result.history.push_back({epoch + 1, lr, loss_sum / total, static_cast<double>(correct) / total});
  }
  return result;
}

std::vector<BeamLabel> predict_topk(const MlpModel& model, const Eigen::VectorXd& features,
                                    std::size_t k) {
  const Eigen::VectorXd probs = forward(model, features);
  std::vector<BeamLabel> out;
  for (std::size_t index : topk_indices(std::span<const double>(probs.data(), probs.size()), k))
    out.push_back({index, static_cast<std::size_t>(probs.size())});
  return out;
}

}  // namespace beampred
