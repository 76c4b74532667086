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

#include "vcforge/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "vcforge/binary_io.hpp"
#include "vcforge/kernels.hpp"

namespace vc {

namespace {

constexpr char kNetMagic[4] = {'V', 'C', 'N', 'N'};
constexpr std::uint32_t kNetVersion = 1;

double sign_of(double w) { return w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0); }

// Scratch for one sample's forward/backward pass.
struct Workspace {
  std::vector<double> normalized_input;
  std::vector<std::vector<double>> activations;  // per layer output
  std::vector<std::vector<double>> deltas;       // per layer error

  explicit Workspace(const FeedForwardNet& net) {
    normalized_input.resize(net.input_dim());
    activations.resize(net.layer_count());
    deltas.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      activations[l].resize(net.layer(l).out_dim());
      deltas[l].resize(net.layer(l).out_dim());
    }
  }
};

const double* normalize_input(const FeedForwardNet& net, const double* x,
                              std::vector<double>& buf) {
  if (!net.has_normalization()) return x;
  const auto& mean = net.input_mean();
  const auto& stddev = net.input_std();
  for (std::size_t i = 0; i < mean.size(); ++i) {
    buf[i] = (x[i] - mean[i]) / stddev[i];
  }
  return buf.data();
}

// Forward pass storing activations; returns pointer to the output vector.
const double* forward_stored(const FeedForwardNet& net, const double* x,
                             Workspace& ws) {
  const auto& k = kernels::active();
  const double* in = normalize_input(net, x, ws.normalized_input);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Layer& layer = net.layer(l);
    double* out = ws.activations[l].data();
    k.matvec(layer.weights.data(), layer.out_dim(), layer.in_dim(), in,
             layer.biases.data(), out);
    if (layer.activation == Activation::kTanh) {
      for (std::size_t i = 0; i < layer.out_dim(); ++i) {
        out[i] = std::tanh(out[i]);
      }
    }
    in = out;
  }
  return in;
}

// Backward pass for one sample; accumulates gradients of
// 1/2 |y - t|^2 into grads. Forward state must be in ws.
void backward_accumulate(const FeedForwardNet& net, const double* x,
                         const double* target, Workspace& ws,
                         NetGradients& grads) {
  const auto& k = kernels::active();
  const std::size_t last = net.layer_count() - 1;
  const std::size_t out_dim = net.output_dim();

  // d(1/2 |y-t|^2)/dy = y - t; the output layer is linear.
  for (std::size_t i = 0; i < out_dim; ++i) {
    ws.deltas[last][i] = ws.activations[last][i] - target[i];
  }
  for (std::size_t l = last; l-- > 0;) {
    const Layer& above = net.layer(l + 1);
    k.matvec_transposed(above.weights.data(), above.out_dim(), above.in_dim(),
                        ws.deltas[l + 1].data(), ws.deltas[l].data());
    if (net.layer(l).activation == Activation::kTanh) {
      for (std::size_t i = 0; i < ws.deltas[l].size(); ++i) {
        double a = ws.activations[l][i];
        ws.deltas[l][i] *= 1.0 - a * a;
      }
    }
  }
  const double* in = normalize_input(net, x, ws.normalized_input);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double* layer_in = l == 0 ? in : ws.activations[l - 1].data();
    const Layer& layer = net.layer(l);
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      k.axpy(ws.deltas[l][r], layer_in, grads.weights[l].row(r),
             layer.in_dim());
    }
    k.axpy(1.0, ws.deltas[l].data(), grads.biases[l].data(),
           layer.out_dim());
  }
}

NetGradients make_zero_gradients(const FeedForwardNet& net) {
  NetGradients g;
  g.weights.reserve(net.layer_count());
  g.biases.reserve(net.layer_count());
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.weights.emplace_back(net.layer(l).out_dim(), net.layer(l).in_dim());
    g.biases.emplace_back(net.layer(l).out_dim(), 0.0);
  }
  return g;
}

void zero_gradients(NetGradients& g) {
  for (auto& m : g.weights) std::fill(m.data(), m.data() + m.size(), 0.0);
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);
}

void add_l1_subgradient(const FeedForwardNet& net, double l1_lambda,
                        NetGradients& grads) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.layer(l).weights;
    Matrix& g = grads.weights[l];
    for (std::size_t i = 0; i < w.size(); ++i) {
      g.data()[i] += l1_lambda * sign_of(w.data()[i]);
    }
  }
}

struct SgdState {
  std::vector<Matrix> weight_velocity;
  std::vector<std::vector<double>> bias_velocity;

  explicit SgdState(const FeedForwardNet& net) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      weight_velocity.emplace_back(net.layer(l).out_dim(),
                                   net.layer(l).in_dim());
      bias_velocity.emplace_back(net.layer(l).out_dim(), 0.0);
    }
  }
};

void apply_update(FeedForwardNet& net, const NetGradients& grads,
                  SgdState& state, const TrainConfig& config) {
  const auto& k = kernels::active();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Matrix& w = net.layer(l).weights;
    Matrix& vw = state.weight_velocity[l];
    k.scale(config.momentum, vw.data(), vw.size());
    k.axpy(-config.learning_rate, grads.weights[l].data(), vw.data(),
           vw.size());
    k.axpy(1.0, vw.data(), w.data(), w.size());

    auto& b = net.layer(l).biases;
    auto& vb = state.bias_velocity[l];
    k.scale(config.momentum, vb.data(), vb.size());
    k.axpy(-config.learning_rate, grads.biases[l].data(), vb.data(),
           vb.size());
    k.axpy(1.0, vb.data(), b.data(), b.size());
  }
}

std::pair<std::vector<double>, std::vector<double>> column_stats(
    const Matrix& m) {
  std::vector<double> mean = column_means(m);
  std::vector<double> stddev(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double d = row[c] - mean[c];
      stddev[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double s = std::sqrt(stddev[c] / static_cast<double>(m.rows()));
    // Constant dimensions carry no information; map them to zero instead of
    // blowing up.
    stddev[c] = s < 1e-8 ? 1.0 : s;
  }
  return {std::move(mean), std::move(stddev)};
}

void maybe_set_normalization(FeedForwardNet& net, const Matrix& inputs,
                             const TrainConfig& config) {
  if (!config.normalize_inputs || net.has_normalization()) return;
  auto [mean, stddev] = column_stats(inputs);
  net.set_normalization(std::move(mean), std::move(stddev));
}

void maybe_set_output_scaling(FeedForwardNet& net, const Matrix& targets,
                              const TrainConfig& config) {
  if (!config.normalize_outputs || net.has_output_scaling()) return;
  auto [mean, stddev] = column_stats(targets);
  net.set_output_scaling(std::move(mean), std::move(stddev));
}

// Targets mapped into the core's z-scored output space.
Matrix scale_targets(const FeedForwardNet& net, const Matrix& targets) {
  Matrix scaled = targets;
  const auto& mean = net.output_mean();
  const auto& stddev = net.output_std();
  for (std::size_t r = 0; r < scaled.rows(); ++r) {
    double* row = scaled.row(r);
    for (std::size_t c = 0; c < scaled.cols(); ++c) {
      row[c] = (row[c] - mean[c]) / stddev[c];
    }
  }
  return scaled;
}

struct NetSnapshot {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

NetSnapshot snapshot(const FeedForwardNet& net) {
  NetSnapshot s;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    s.weights.push_back(net.layer(l).weights);
    s.biases.push_back(net.layer(l).biases);
  }
  return s;
}

void restore(FeedForwardNet& net, const NetSnapshot& s) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    net.layer(l).weights = s.weights[l];
    net.layer(l).biases = s.biases[l];
  }
}

TrainLog train_impl(FeedForwardNet& net, const Matrix& inputs,
                    const Matrix& raw_targets, const TrainConfig& config,
                    bool use_l1) {
  config.validate();
  if (inputs.rows() != raw_targets.rows()) {
    throw ValidationError("train: input and target row counts differ");
  }
  if (inputs.rows() == 0) throw ValidationError("train: no training rows");
  if (inputs.cols() != net.input_dim() ||
      raw_targets.cols() != net.output_dim()) {
    throw ValidationError("train: data dims do not match net dims");
  }
  maybe_set_normalization(net, inputs, config);
  maybe_set_output_scaling(net, raw_targets, config);
  const Matrix scaled = net.has_output_scaling()
                            ? scale_targets(net, raw_targets)
                            : Matrix();
  const Matrix& targets = net.has_output_scaling() ? scaled : raw_targets;

  DetRng rng(config.seed);
  std::vector<std::size_t> order(inputs.rows());
  std::iota(order.begin(), order.end(), 0);

  // Optional validation split for early stopping, carved out once.
  std::size_t n_val = 0;
  if (config.patience > 0 && config.validation_fraction > 0.0) {
    rng.shuffle(order);
    n_val = static_cast<std::size_t>(
        std::floor(config.validation_fraction *
                   static_cast<double>(inputs.rows())));
    n_val = std::min(n_val, inputs.rows() - 1);
  }
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> train_rows(order.begin() + n_val, order.end());

  const std::size_t batch =
      config.batch_size == 0 ? train_rows.size() : config.batch_size;
  const double l1 = use_l1 ? config.l1_lambda : 0.0;

  Workspace ws(net);
  NetGradients grads = make_zero_gradients(net);
  SgdState sgd(net);
  TrainLog log;
  NetSnapshot best;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(train_rows);
    double epoch_sse = 0.0;
    for (std::size_t begin = 0; begin < train_rows.size(); begin += batch) {
      std::size_t end = std::min(begin + batch, train_rows.size());
      zero_gradients(grads);
      double batch_sse = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const double* x = inputs.row(train_rows[i]);
        const double* t = targets.row(train_rows[i]);
        const double* y = forward_stored(net, x, ws);
        batch_sse += kernels::active().sumsq_diff(y, t, net.output_dim());
        backward_accumulate(net, x, t, ws, grads);
      }
      if (!std::isfinite(batch_sse)) {
        throw TrainingError("non-finite loss at epoch " +
                            std::to_string(epoch) + "; lower the learning "
                            "rate or check the input scaling");
      }
      if (l1 > 0.0) add_l1_subgradient(net, l1, grads);
      apply_update(net, grads, sgd, config);
      epoch_sse += batch_sse;
    }
    log.train_mse.push_back(epoch_sse / (static_cast<double>(
                                             train_rows.size()) *
                                         static_cast<double>(
                                             net.output_dim())));

    if (n_val > 0) {
      double val_sse = 0.0;
      for (std::size_t r : val_rows) {
        const double* y = forward_stored(net, inputs.row(r), ws);
        val_sse +=
            kernels::active().sumsq_diff(y, targets.row(r), net.output_dim());
      }
      double val_mse = val_sse / (static_cast<double>(n_val) *
                                  static_cast<double>(net.output_dim()));
      log.val_mse.push_back(val_mse);
      if (val_mse < best_val) {
        best_val = val_mse;
        best = snapshot(net);
        log.best_epoch = epoch;
        epochs_since_best = 0;
      } else if (++epochs_since_best >= config.patience) {
        restore(net, best);
        return log;
      }
    } else {
      log.best_epoch = epoch;
    }
  }
  if (n_val > 0 && !best.weights.empty()) restore(net, best);
  return log;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ValidationError("TrainConfig: learning rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ValidationError("TrainConfig: momentum must be in [0, 1)");
  }
  if (l1_lambda < 0.0) {
    throw ValidationError("TrainConfig: l1_lambda must be >= 0");
  }
}

FeedForwardNet::FeedForwardNet(std::vector<Layer> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw ValidationError("FeedForwardNet: no layers");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw ValidationError("FeedForwardNet: empty layer");
    }
    if (layer.biases.size() != layer.out_dim()) {
      throw ValidationError("FeedForwardNet: bias length != out dim");
    }
    if (l > 0 && layer.in_dim() != layers_[l - 1].out_dim()) {
      throw ValidationError("FeedForwardNet: layer dims do not chain");
    }
    bool is_last = l + 1 == layers_.size();
    if (is_last && layer.activation != Activation::kLinear) {
      throw ValidationError("FeedForwardNet: output layer must be linear");
    }
    if (!is_last && layer.activation != Activation::kTanh) {
      throw ValidationError("FeedForwardNet: hidden layers must be tanh");
    }
  }
}

void FeedForwardNet::set_normalization(std::vector<double> mean,
                                       std::vector<double> stddev) {
  if (mean.size() != input_dim() || stddev.size() != input_dim()) {
    throw ValidationError("set_normalization: stats length != input dim");
  }
  for (double s : stddev) {
    if (!(s > 0.0)) {
      throw ValidationError("set_normalization: stddev must be positive");
    }
  }
  input_mean_ = std::move(mean);
  input_std_ = std::move(stddev);
}

void FeedForwardNet::set_output_scaling(std::vector<double> mean,
                                        std::vector<double> stddev) {
  if (mean.size() != output_dim() || stddev.size() != output_dim()) {
    throw ValidationError("set_output_scaling: stats length != output dim");
  }
  for (double s : stddev) {
    if (!(s > 0.0)) {
      throw ValidationError("set_output_scaling: stddev must be positive");
    }
  }
  output_mean_ = std::move(mean);
  output_std_ = std::move(stddev);
}

std::vector<double> FeedForwardNet::forward(
    const std::vector<double>& x) const {
  if (x.size() != input_dim()) {
    throw ValidationError("forward: input dim mismatch");
  }
  std::vector<double> y(output_dim());
  forward(x.data(), y.data());
  return y;
}

void FeedForwardNet::forward(const double* x, double* y) const {
  Workspace ws(*this);
  const double* out = forward_stored(*this, x, ws);
  if (has_output_scaling()) {
    for (std::size_t i = 0; i < output_dim(); ++i) {
      y[i] = out[i] * output_std_[i] + output_mean_[i];
    }
  } else {
    std::copy(out, out + output_dim(), y);
  }
}

double FeedForwardNet::mean_squared_error(const Matrix& inputs,
                                          const Matrix& targets) const {
  if (inputs.rows() != targets.rows()) {
    throw ValidationError("mean_squared_error: row counts differ");
  }
  std::vector<double> y(output_dim());
  double sse = 0.0;
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    forward(inputs.row(r), y.data());
    sse += kernels::active().sumsq_diff(y.data(), targets.row(r),
                                        output_dim());
  }
  return sse / (static_cast<double>(inputs.rows()) *
                static_cast<double>(output_dim()));
}

FeedForwardNet init_random(const std::vector<std::size_t>& dims,
                           std::uint64_t seed) {
  if (dims.size() < 2) {
    throw ValidationError("init_random: need at least input and output dims");
  }
  for (std::size_t d : dims) {
    if (d == 0) throw ValidationError("init_random: zero layer width");
  }
  DetRng rng(seed);
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.weights = Matrix(dims[l + 1], dims[l]);
    layer.biases.assign(dims[l + 1], 0.0);
    layer.activation =
        (l + 2 == dims.size()) ? Activation::kLinear : Activation::kTanh;
    double r = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      layer.weights.data()[i] = rng.uniform(-r, r);
    }
    layers.push_back(std::move(layer));
  }
  return FeedForwardNet(std::move(layers));
}

double batch_loss(const FeedForwardNet& net, const Matrix& inputs,
                  const Matrix& targets, double l1_lambda) {
  Workspace ws(net);
  double loss = 0.0;
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const double* y = forward_stored(net, inputs.row(r), ws);
    loss +=
        0.5 * kernels::active().sumsq_diff(y, targets.row(r),
                                           net.output_dim());
  }
  if (l1_lambda > 0.0) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      const Matrix& w = net.layer(l).weights;
      for (std::size_t i = 0; i < w.size(); ++i) {
        loss += l1_lambda * std::fabs(w.data()[i]);
      }
    }
  }
  return loss;
}

NetGradients compute_gradients(const FeedForwardNet& net, const Matrix& inputs,
                               const Matrix& targets, double l1_lambda) {
  Workspace ws(net);
  NetGradients grads = make_zero_gradients(net);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    forward_stored(net, inputs.row(r), ws);
    backward_accumulate(net, inputs.row(r), targets.row(r), ws, grads);
  }
  if (l1_lambda > 0.0) add_l1_subgradient(net, l1_lambda, grads);
  return grads;
}

Matrix forward_all(const FeedForwardNet& net, const Matrix& inputs) {
  if (inputs.cols() != net.input_dim()) {
    throw ValidationError("forward_all: input dim mismatch");
  }
  Workspace ws(net);
  Matrix out(inputs.rows(), net.output_dim());
  const bool scaled = net.has_output_scaling();
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const double* y = forward_stored(net, inputs.row(r), ws);
    double* dst = out.row(r);
    for (std::size_t i = 0; i < net.output_dim(); ++i) {
      dst[i] = scaled ? y[i] * net.output_std()[i] + net.output_mean()[i]
                      : y[i];
    }
  }
  return out;
}

TrainLog train(FeedForwardNet& net, const Matrix& inputs,
               const Matrix& targets, const TrainConfig& config) {
  return train_impl(net, inputs, targets, config, /*use_l1=*/false);
}

TrainLog pretrain_autoencoder(FeedForwardNet& net, const Matrix& source_inputs,
                              const TrainConfig& config) {
  if (net.output_dim() > source_inputs.cols()) {
    throw ValidationError("pretrain_autoencoder: output dim exceeds input "
                          "dim; no static prefix to reconstruct");
  }
  if (config.l1_lambda == 0.0) {
    std::fprintf(stderr, "warning: pretrain_autoencoder with l1_lambda = 0 "
                         "degenerates to a plain autoencoder\n");
  }
  // Reconstruction target: the static prefix of each input row.
  Matrix targets(source_inputs.rows(), net.output_dim());
  for (std::size_t r = 0; r < source_inputs.rows(); ++r) {
    const double* row = source_inputs.row(r);
    std::copy(row, row + net.output_dim(), targets.row(r));
  }
  return train_impl(net, source_inputs, targets, config, /*use_l1=*/true);
}

TrainLog pretrain_dlp(FeedForwardNet& net, const Matrix& inputs,
                      const Matrix& targets, const TrainConfig& config) {
  const std::size_t hidden_count = net.layer_count() - 1;
  TrainConfig stage_config = config;
  stage_config.max_epochs = config.dlp_stage_epochs;
  if (hidden_count == 0) {
    return train_impl(net, inputs, targets, stage_config, /*use_l1=*/false);
  }

  maybe_set_normalization(net, inputs, config);
  maybe_set_output_scaling(net, targets, config);
  TrainLog combined;
  for (std::size_t stage = 1; stage <= hidden_count; ++stage) {
    std::vector<Layer> stage_layers;
    for (std::size_t l = 0; l < stage; ++l) stage_layers.push_back(net.layer(l));
    if (stage == hidden_count) {
      stage_layers.push_back(net.layer(hidden_count));
    } else {
      // Temporary linear readout for this stage, discarded afterwards.
      Layer temp;
      std::size_t in = net.layer(stage - 1).out_dim();
      std::size_t out = net.output_dim();
      temp.weights = Matrix(out, in);
      temp.biases.assign(out, 0.0);
      temp.activation = Activation::kLinear;
      DetRng rng(config.seed ^ (0x9e3779b97f4a7c15ull * stage));
      double r = std::sqrt(6.0 / static_cast<double>(in + out));
      for (std::size_t i = 0; i < temp.weights.size(); ++i) {
        temp.weights.data()[i] = rng.uniform(-r, r);
      }
      stage_layers.push_back(std::move(temp));
    }
    FeedForwardNet stage_net(std::move(stage_layers));
    if (net.has_normalization()) {
      stage_net.set_normalization(net.input_mean(), net.input_std());
    }
    if (net.has_output_scaling()) {
      stage_net.set_output_scaling(net.output_mean(), net.output_std());
    }
    TrainLog log =
        train_impl(stage_net, inputs, targets, stage_config, /*use_l1=*/false);
    combined.train_mse.insert(combined.train_mse.end(), log.train_mse.begin(),
                              log.train_mse.end());
    for (std::size_t l = 0; l < stage; ++l) net.layer(l) = stage_net.layer(l);
    if (stage == hidden_count) {
      net.layer(hidden_count) = stage_net.layer(stage);
    }
  }
  combined.best_epoch =
      combined.train_mse.empty() ? 0 : combined.train_mse.size() - 1;
  return combined;
}

void save_net(const FeedForwardNet& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  bio::put_magic(os, kNetMagic);
  bio::put_u32(os, kNetVersion);
  bio::put_u32(os, static_cast<std::uint32_t>(net.layer_count()));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Layer& layer = net.layer(l);
    bio::put_u32(os, static_cast<std::uint32_t>(layer.in_dim()));
    bio::put_u32(os, static_cast<std::uint32_t>(layer.out_dim()));
    bio::put_u32(os, static_cast<std::uint32_t>(layer.activation));
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      bio::put_f64(os, layer.weights.data()[i]);
    }
    for (double b : layer.biases) bio::put_f64(os, b);
  }
  bio::put_u32(os, net.has_normalization() ? 1 : 0);
  if (net.has_normalization()) {
    bio::put_u32(os, static_cast<std::uint32_t>(net.input_dim()));
    for (double v : net.input_mean()) bio::put_f64(os, v);
    for (double v : net.input_std()) bio::put_f64(os, v);
  }
  bio::put_u32(os, net.has_output_scaling() ? 1 : 0);
  if (net.has_output_scaling()) {
    bio::put_u32(os, static_cast<std::uint32_t>(net.output_dim()));
    for (double v : net.output_mean()) bio::put_f64(os, v);
    for (double v : net.output_std()) bio::put_f64(os, v);
  }
  if (!os) throw IoError("write failed: " + path);
}

FeedForwardNet load_net(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  bio::check_magic(is, kNetMagic, "VCNN model");
  std::uint32_t version = bio::get_u32(is, "version");
  if (version != kNetVersion) {
    throw FormatError("unsupported VCNN version " + std::to_string(version));
  }
  std::uint32_t layer_count = bio::get_u32(is, "layer count");
  if (layer_count == 0) throw FormatError("VCNN with zero layers");
  std::vector<Layer> layers;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    std::uint32_t in = bio::get_u32(is, "layer input dim");
    std::uint32_t out = bio::get_u32(is, "layer output dim");
    std::uint32_t act = bio::get_u32(is, "activation tag");
    if (act > 1) throw FormatError("unknown activation tag");
    Layer layer;
    layer.weights = Matrix(out, in);
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      layer.weights.data()[i] = bio::get_f64(is, "weights");
    }
    layer.biases.resize(out);
    for (auto& b : layer.biases) b = bio::get_f64(is, "biases");
    layer.activation = static_cast<Activation>(act);
    layers.push_back(std::move(layer));
  }
  FeedForwardNet net(std::move(layers));
  std::uint32_t has_norm = bio::get_u32(is, "normalization flag");
  if (has_norm == 1) {
    std::uint32_t dim = bio::get_u32(is, "normalization dim");
    if (dim != net.input_dim()) {
      throw FormatError("normalization dim != net input dim");
    }
    std::vector<double> mean(dim), stddev(dim);
    for (auto& v : mean) v = bio::get_f64(is, "input mean");
    for (auto& v : stddev) v = bio::get_f64(is, "input std");
    net.set_normalization(std::move(mean), std::move(stddev));
  } else if (has_norm != 0) {
    throw FormatError("bad normalization flag");
  }
  std::uint32_t has_out = bio::get_u32(is, "output scaling flag");
  if (has_out == 1) {
    std::uint32_t dim = bio::get_u32(is, "output scaling dim");
    if (dim != net.output_dim()) {
      throw FormatError("output scaling dim != net output dim");
    }
    std::vector<double> mean(dim), stddev(dim);
    for (auto& v : mean) v = bio::get_f64(is, "output mean");
    for (auto& v : stddev) v = bio::get_f64(is, "output std");
    net.set_output_scaling(std::move(mean), std::move(stddev));
  } else if (has_out != 0) {
    throw FormatError("bad output scaling flag");
  }
  return net;
}

}  // namespace vc
