// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/dataset.hpp>
#include <beampred/oracle.hpp>

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace beampred {

/// Fully connected classifier: ReLU hidden layers, softmax output.
struct MlpArchitecture {
  std::size_t input_dim = 2;
  std::vector<std::size_t> hidden_dims{512, 512};
  std::size_t output_dim = 32;

  void validate() const;
  friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

/// Affine layer y = W x + b with W stored as (out x in).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

class MlpModel {
 public:
  MlpModel(MlpArchitecture architecture, std::vector<DenseLayer> layers, std::uint64_t seed = 0);

  /// Hidden layers ~ N(0, 2 / fan_in), output layer ~ N(0, 1), zero biases.
  static MlpModel initialize(const MlpArchitecture& architecture, std::uint64_t seed);
  static MlpModel zeros(const MlpArchitecture& architecture);

  const MlpArchitecture& architecture() const { return architecture_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t parameter_count() const;

  /// Pre-softmax scores for a batch stored column-wise (input_dim x B) -> (output_dim x B).
  Eigen::MatrixXd logits(const Eigen::MatrixXd& inputs) const;

 private:
  MlpArchitecture architecture_;
  std::vector<DenseLayer> layers_;
  std::uint64_t seed_ = 0;
};

/// Softmax probabilities for one feature vector.
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& features);

/// Column-wise softmax probabilities for a batch.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

struct Gradients {
  std::vector<DenseLayer> layers;
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients gradients;
  /// Batch examples whose highest logit (lowest index on ties) is the label.
  std::size_t correct = 0;
};

/// Mean cross-entropy over the batch and its exact gradient.
LossAndGradients loss_and_gradients(const MlpModel& model, std::span<const LabeledExample> batch);

/// Matrix form: inputs are columns, one label index per column.
LossAndGradients loss_and_gradients(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                    std::span<const std::size_t> labels);

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;
  std::int64_t step = 0;

  static AdamState zeros_like(const MlpModel& model);
};

void adam_step(MlpModel& model, const Gradients& gradients, AdamState& state, double lr,
               const AdamParams& params = {});

struct TrainConfig {
  std::size_t batch_size = 32;
  double initial_lr = 1e-2;
  std::vector<std::size_t> lr_decay_epochs{20, 40, 80};
  double lr_factor = 0.1;
  std::size_t epochs = 100;
  AdamParams adam;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Step schedule: the rate is multiplied by lr_factor once for every decay epoch <= epoch
/// (0-based epoch counter).
double learning_rate_at(const TrainConfig& cfg, std::size_t epoch);

struct EpochRecord {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double loss = 0.0;
  double top1 = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochRecord> history;
};

/// Mini-batch Adam. The example list is put into a canonical order first, so the result
/// depends only on the example multiset and cfg.seed.
TrainResult train(MlpModel model, std::span<const LabeledExample> train_set,
                  const TrainConfig& cfg);

/// The k most probable beams, ties by ascending index.
std::vector<BeamLabel> predict_topk(const MlpModel& model, const Eigen::VectorXd& features,
                                    std::size_t k);

}  // namespace beampred
