// Copyright 2026 The vcforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VCFORGE_NET_HPP_
#define VCFORGE_NET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vcforge/matrix.hpp"

namespace vc {

enum class Activation : std::uint32_t { kLinear = 0, kTanh = 1 };

struct Layer {
  Matrix weights;               // out x in, row-major
  std::vector<double> biases;   // out
  Activation activation = Activation::kLinear;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }
};

// Feed-forward network: tanh hidden layers, linear output. Serves the
// spectrum, F0, intensity and duration models. Optional per-dimension
// input z-scoring is part of the model and is stored in the model file.
class FeedForwardNet {
 public:
  FeedForwardNet() = default;
  explicit FeedForwardNet(std::vector<Layer> layers);

  std::size_t input_dim() const { return layers_.front().in_dim(); }
  std::size_t output_dim() const { return layers_.back().out_dim(); }
  std::size_t layer_count() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_[i]; }
  Layer& layer(std::size_t i) { return layers_[i]; }

  bool has_normalization() const { return !input_mean_.empty(); }
  const std::vector<double>& input_mean() const { return input_mean_; }
  const std::vector<double>& input_std() const { return input_std_; }
  void set_normalization(std::vector<double> mean, std::vector<double> stddev);

  // Optional affine output head: forward() returns core * std + mean. The
  // trainer fits the core layers against z-scored targets and stores the
  // statistics here so inference works in raw units.
  bool has_output_scaling() const { return !output_mean_.empty(); }
  const std::vector<double>& output_mean() const { return output_mean_; }
  const std::vector<double>& output_std() const { return output_std_; }
  void set_output_scaling(std::vector<double> mean,
                          std::vector<double> stddev);

  // Thread-safe on a const net.
  std::vector<double> forward(const std::vector<double>& x) const;
  void forward(const double* x, double* y) const;

  // Sum over rows of |y - t|^2 / (rows * output_dim).
  double mean_squared_error(const Matrix& inputs, const Matrix& targets) const;

 private:
  std::vector<Layer> layers_;
  std::vector<double> input_mean_;
  std::vector<double> input_std_;
  std::vector<double> output_mean_;
  std::vector<double> output_std_;
};

// Uniform weights in [-r, r] with r = sqrt(6 / (fan_in + fan_out)), biases
// exactly zero. Same seed, same net.
FeedForwardNet init_random(const std::vector<std::size_t>& dims,
                           std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.3;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 20;
  double l1_lambda = 0.0;            // autoencoder pretraining only
  std::uint64_t seed = 0;
  std::size_t patience = 0;          // 0 disables early stopping
  double validation_fraction = 0.0;  // slice held out when patience > 0
  bool normalize_inputs = false;     // z-score inputs, stats kept in the net
  bool normalize_outputs = false;    // fit the core against z-scored targets
  std::size_t dlp_stage_epochs = 5;  // per-stage budget for layer-wise
                                     // pretraining

  void validate() const;
};

struct TrainLog {
  std::vector<double> train_mse;  // per epoch, accumulated during the pass
  std::vector<double> val_mse;    // empty when no validation split
  std::size_t best_epoch = 0;
};

// Per-layer gradients of the batch loss.
struct NetGradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

// Loss the trainer minimizes: 1/2 sum_rows |y - t|^2, plus
// l1_lambda * sum |w| over weights (biases excluded) when l1_lambda > 0.
// y here is the core network output (the affine output head, when present,
// is inference-only; the trainer pre-scales its targets instead).
double batch_loss(const FeedForwardNet& net, const Matrix& inputs,
                  const Matrix& targets, double l1_lambda = 0.0);

// Exact gradients of batch_loss (back-propagation; the L1 subgradient at 0
// is taken as 0).
NetGradients compute_gradients(const FeedForwardNet& net, const Matrix& inputs,
                               const Matrix& targets, double l1_lambda = 0.0);

// Runs every row of `inputs` through the net; row r of the result is the
// net's output for row r.
Matrix forward_all(const FeedForwardNet& net, const Matrix& inputs);

// Minibatch SGD with momentum on 1/2 |y - t|^2 summed over each minibatch.
// Epochs reshuffle with the seeded RNG; identical configs and seeds give
// bit-identical nets.
TrainLog train(FeedForwardNet& net, const Matrix& inputs,
               const Matrix& targets, const TrainConfig& config);

// Autoencoder pretraining: trains on (x -> static prefix of x) with the L1
// weight penalty, keeping the conversion architecture unchanged. The
// returned net carries no penalty state. The reconstruction target is the
// first output_dim dims of each input row. Warns when l1_lambda == 0.
TrainLog pretrain_autoencoder(FeedForwardNet& net, const Matrix& source_inputs,
                              const TrainConfig& config);

// Discriminative layer-wise pretraining: grows the network one hidden layer
// at a time, training each stage against the real targets for
// dlp_stage_epochs (early termination per stage). The final architecture
// equals the input net's architecture.
TrainLog pretrain_dlp(FeedForwardNet& net, const Matrix& inputs,
                      const Matrix& targets, const TrainConfig& config);

// Model file: magic "VCNN", version, layer count, per-layer dims +
// activation tag + weights + biases, then normalization statistics. All
// values 64-bit little-endian IEEE-754.
void save_net(const FeedForwardNet& net, const std::string& path);
FeedForwardNet load_net(const std::string& path);

}  // namespace vc

#endif  // VCFORGE_NET_HPP_
