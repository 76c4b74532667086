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
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "vcforge/common.hpp"

using namespace vc;
namespace fs = std::filesystem;

namespace {

Matrix random_matrix(DetRng& rng, std::size_t rows, std::size_t cols,
                     double scale = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = scale * rng.gaussian();
  }
  return m;
}

bool nets_identical(const FeedForwardNet& a, const FeedForwardNet& b) {
  if (a.layer_count() != b.layer_count()) return false;
  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    const Layer& la = a.layer(l);
    const Layer& lb = b.layer(l);
    if (la.weights.rows() != lb.weights.rows() ||
        la.weights.cols() != lb.weights.cols()) {
      return false;
    }
    for (std::size_t i = 0; i < la.weights.size(); ++i) {
      if (la.weights.data()[i] != lb.weights.data()[i]) return false;
    }
    for (std::size_t i = 0; i < la.biases.size(); ++i) {
      if (la.biases[i] != lb.biases[i]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("init_random: determinism, zero biases, bounded weights") {
  std::vector<std::size_t> dims = {5, 7, 3};
  FeedForwardNet a = init_random(dims, 42);
  FeedForwardNet b = init_random(dims, 42);
  CHECK(nets_identical(a, b));
  FeedForwardNet c = init_random(dims, 43);
  CHECK_FALSE(nets_identical(a, c));

  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    double r = std::sqrt(6.0 / static_cast<double>(a.layer(l).in_dim() +
                                                   a.layer(l).out_dim()));
    for (double b_i : a.layer(l).biases) CHECK(b_i == 0.0);
    for (std::size_t i = 0; i < a.layer(l).weights.size(); ++i) {
      CHECK(std::fabs(a.layer(l).weights.data()[i]) <= r);
    }
  }
  CHECK(a.layer(0).activation == Activation::kTanh);
  CHECK(a.layer(1).activation == Activation::kLinear);
  CHECK_THROWS_AS(init_random({5}, 1), ValidationError);
}

TEST_CASE("forward: zero net, single linear layer, composition oracle") {
  SUBCASE("all-zero weights give zero output") {
    Layer l;
    l.weights = Matrix(3, 4);
    l.biases.assign(3, 0.0);
    FeedForwardNet net({l});
    auto y = net.forward({1.0, -2.0, 3.0, 4.0});
    for (double v : y) CHECK(v == 0.0);
  }
  SUBCASE("single linear layer is exactly Wx + b") {
    Layer l;
    l.weights = Matrix{{1.0, 2.0}, {3.0, -1.0}};
    l.biases = {0.5, -0.25};
    FeedForwardNet net({l});
    auto y = net.forward({2.0, 1.0});
    CHECK(y[0] == doctest::Approx(4.5));
    CHECK(y[1] == doctest::Approx(4.75));
  }
  SUBCASE("matches an independent composition on a random net") {
    DetRng rng(5);
    FeedForwardNet net = init_random({4, 6, 5, 3}, 17);
    std::vector<double> x = {0.3, -0.8, 1.2, 0.05};
    // Direct re-evaluation with plain loops.
    std::vector<double> h = x;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      const Layer& layer = net.layer(l);
      std::vector<double> next(layer.out_dim());
      for (std::size_t r = 0; r < layer.out_dim(); ++r) {
        double acc = layer.biases[r];
        for (std::size_t c = 0; c < layer.in_dim(); ++c) {
          acc += layer.weights(r, c) * h[c];
        }
        next[r] = layer.activation == Activation::kTanh ? std::tanh(acc) : acc;
      }
      h = std::move(next);
    }
    auto y = net.forward(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK(std::fabs(y[i] - h[i]) < 1e-12);
    }
  }
  SUBCASE("dimension mismatch raises") {
    FeedForwardNet net = init_random({4, 3}, 1);
    CHECK_THROWS_AS(net.forward({1.0, 2.0}), ValidationError);
  }
}

TEST_CASE("backprop matches central finite differences on a 4-3-2 net") {
  DetRng rng(11);
  FeedForwardNet net = init_random({4, 3, 2}, 23);
  Matrix inputs = random_matrix(rng, 6, 4);
  Matrix targets = random_matrix(rng, 6, 2);
  NetGradients grads = compute_gradients(net, inputs, targets);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (std::size_t i = 0; i < net.layer(l).weights.size(); ++i) {
      double analytic = grads.weights[l].data()[i];
      double fd = oracle::fd_weight_gradient(net, inputs, targets, 0.0, l, i);
      CHECK(std::fabs(analytic - fd) <=
            1e-6 * std::max(1.0, std::fabs(analytic)));
    }
    for (std::size_t i = 0; i < net.layer(l).biases.size(); ++i) {
      double analytic = grads.biases[l][i];
      double fd = oracle::fd_bias_gradient(net, inputs, targets, 0.0, l, i);
      CHECK(std::fabs(analytic - fd) <=
            1e-6 * std::max(1.0, std::fabs(analytic)));
    }
  }
}

TEST_CASE("L1 subgradient checks out away from zeros") {
  DetRng rng(13);
  FeedForwardNet net = init_random({3, 4, 2}, 5);
  const double lambda = 0.05;
  Matrix inputs = random_matrix(rng, 4, 3);
  Matrix targets = random_matrix(rng, 4, 2);
  NetGradients grads = compute_gradients(net, inputs, targets, lambda);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (std::size_t i = 0; i < net.layer(l).weights.size(); ++i) {
      // Central differences straddle the kink at w = 0; skip near-zeros.
      if (std::fabs(net.layer(l).weights.data()[i]) < 1e-3) continue;
      double analytic = grads.weights[l].data()[i];
      double fd =
          oracle::fd_weight_gradient(net, inputs, targets, lambda, l, i);
      CHECK(std::fabs(analytic - fd) <=
            1e-6 * std::max(1.0, std::fabs(analytic)));
    }
  }
  // sign(0) = 0: a zero weight contributes no penalty gradient.
  FeedForwardNet zero_net = init_random({2, 2}, 3);
  zero_net.layer(0).weights = Matrix(2, 2);  // all zeros
  Matrix one_in = random_matrix(rng, 1, 2);
  Matrix zero_tgt(1, 2);
  for (std::size_t c = 0; c < 2; ++c) zero_tgt(0, c) = 0.0;
  NetGradients g0 = compute_gradients(zero_net, one_in, zero_tgt, lambda);
  // With zero weights and zero biases the data gradient is zero, so any
  // nonzero entry would come from the L1 term.
  for (std::size_t i = 0; i < 4; ++i) CHECK(g0.weights[0].data()[i] == 0.0);
}

TEST_CASE("a linear net learns the identity map") {
  DetRng rng(7);
  Matrix inputs = random_matrix(rng, 50, 1);
  TrainConfig config;
  config.learning_rate = 0.01;
  config.momentum = 0.0;
  config.batch_size = 0;  // full batch
  config.max_epochs = 200;
  config.seed = 3;
  FeedForwardNet net = init_random({1, 1}, 9);
  TrainLog log = train(net, inputs, inputs, config);
  CHECK(net.mean_squared_error(inputs, inputs) < 1e-6);
  CHECK(log.train_mse.size() == 200);
}

TEST_CASE("momentum 0 with full batch equals one plain gradient step") {
  DetRng rng(19);
  FeedForwardNet net = init_random({3, 4, 2}, 31);
  Matrix inputs = random_matrix(rng, 5, 3);
  Matrix targets = random_matrix(rng, 5, 2);
  NetGradients grads = compute_gradients(net, inputs, targets);

  FeedForwardNet trained = net;
  TrainConfig config;
  config.learning_rate = 0.01;
  config.momentum = 0.0;
  config.batch_size = 0;
  config.max_epochs = 1;
  config.seed = 12;
  train(trained, inputs, targets, config);

  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (std::size_t i = 0; i < net.layer(l).weights.size(); ++i) {
      double expect = net.layer(l).weights.data()[i] -
                      config.learning_rate * grads.weights[l].data()[i];
      CHECK(trained.layer(l).weights.data()[i] == doctest::Approx(expect));
    }
    for (std::size_t i = 0; i < net.layer(l).biases.size(); ++i) {
      double expect = net.layer(l).biases[i] -
                      config.learning_rate * grads.biases[l][i];
      CHECK(trained.layer(l).biases[i] == doctest::Approx(expect));
    }
  }
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  DetRng rng(23);
  Matrix inputs = random_matrix(rng, 30, 4);
  Matrix targets = random_matrix(rng, 30, 2);
  TrainConfig config;
  config.max_epochs = 5;
  config.seed = 77;
  FeedForwardNet a = init_random({4, 6, 2}, 55);
  FeedForwardNet b = init_random({4, 6, 2}, 55);
  train(a, inputs, targets, config);
  train(b, inputs, targets, config);
  CHECK(nets_identical(a, b));
}

TEST_CASE("autoencoder pretraining reconstructs better than random init") {
  DetRng rng(29);
  // Inputs whose static prefix is the reconstruction target.
  Matrix inputs = random_matrix(rng, 80, 6);
  FeedForwardNet net = init_random({6, 10, 3}, 41);
  Matrix static_prefix(inputs.rows(), 3);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    for (std::size_t c = 0; c < 3; ++c) static_prefix(r, c) = inputs(r, c);
  }
  double before = net.mean_squared_error(inputs, static_prefix);
  TrainConfig config;
  config.max_epochs = 40;
  config.learning_rate = 0.005;
  config.l1_lambda = 1e-4;
  config.seed = 3;
  pretrain_autoencoder(net, inputs, config);
  double after = net.mean_squared_error(inputs, static_prefix);
  CHECK(after < before);
}

TEST_CASE("pretraining-then-finetuning reaches the target mse at least as "
          "fast as random init (median over 5 seeds)") {
  // Small synthetic conversion task: targets are a fixed linear map of the
  // static input prefix, which mirrors the real use (output dim smaller
  // than input dim).
  DetRng task_rng(31);
  Matrix map = random_matrix(task_rng, 3, 6, 0.4);
  Matrix inputs = random_matrix(task_rng, 120, 6);
  Matrix targets(120, 3);
  for (std::size_t r = 0; r < 120; ++r) {
    for (std::size_t i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < 6; ++j) acc += map(i, j) * inputs(r, j);
      targets(r, i) = acc;
    }
  }
  auto epochs_to_reach = [&](FeedForwardNet net, std::uint64_t seed,
                             double threshold, std::size_t budget) {
    TrainConfig config;
    config.max_epochs = 1;
    config.learning_rate = 0.002;
    config.seed = seed;
    for (std::size_t e = 1; e <= budget; ++e) {
      train(net, inputs, targets, config);
      if (net.mean_squared_error(inputs, targets) < threshold) return e;
    }
    return budget + 1;
  };

  std::vector<long> deltas;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FeedForwardNet random_net = init_random({6, 10, 3}, seed * 101);
    FeedForwardNet pretrained = init_random({6, 10, 3}, seed * 101);
    TrainConfig pre;
    pre.max_epochs = 40;
    pre.learning_rate = 0.002;
    pre.l1_lambda = 1e-4;
    pre.seed = seed;
    pretrain_autoencoder(pretrained, inputs, pre);

    const double threshold = 0.05;
    const std::size_t budget = 120;
    auto e_random = epochs_to_reach(std::move(random_net), seed, threshold,
                                    budget);
    auto e_pre = epochs_to_reach(std::move(pretrained), seed, threshold,
                                 budget);
    deltas.push_back(static_cast<long>(e_random) - static_cast<long>(e_pre));
  }
  std::sort(deltas.begin(), deltas.end());
  CHECK(deltas[2] >= 0);  // median: pretrained needs no more epochs
}

TEST_CASE("pretrain_autoencoder validates the reconstruction prefix") {
  FeedForwardNet net = init_random({3, 4, 5}, 1);  // output wider than input
  Matrix inputs(4, 3, 0.1);
  TrainConfig config;
  CHECK_THROWS_AS(pretrain_autoencoder(net, inputs, config), ValidationError);
}

TEST_CASE("dlp on one hidden layer equals plain train with the stage budget") {
  DetRng rng(37);
  Matrix inputs = random_matrix(rng, 40, 5);
  Matrix targets = random_matrix(rng, 40, 2);
  TrainConfig config;
  config.seed = 9;
  config.dlp_stage_epochs = 4;
  config.max_epochs = 99;  // ignored by the single DLP stage

  FeedForwardNet a = init_random({5, 8, 2}, 21);
  FeedForwardNet b = init_random({5, 8, 2}, 21);
  pretrain_dlp(a, inputs, targets, config);
  TrainConfig plain = config;
  plain.max_epochs = config.dlp_stage_epochs;
  train(b, inputs, targets, plain);
  CHECK(nets_identical(a, b));
}

TEST_CASE("dlp grows to the requested architecture and reduces loss") {
  DetRng rng(41);
  Matrix inputs = random_matrix(rng, 60, 4);
  Matrix targets = random_matrix(rng, 60, 2);
  FeedForwardNet net = init_random({4, 6, 5, 2}, 71);
  double before = net.mean_squared_error(inputs, targets);
  TrainConfig config;
  config.seed = 2;
  config.dlp_stage_epochs = 6;
  config.learning_rate = 0.002;
  TrainLog log = pretrain_dlp(net, inputs, targets, config);
  CHECK(net.layer_count() == 3);
  CHECK(net.layer(0).out_dim() == 6);
  CHECK(net.layer(1).out_dim() == 5);
  CHECK(net.layer(2).out_dim() == 2);
  CHECK(log.train_mse.size() == 2 * 6);  // two stages
  CHECK(net.mean_squared_error(inputs, targets) < before);
}

TEST_CASE("early stopping restores the best weights") {
  DetRng rng(43);
  Matrix inputs = random_matrix(rng, 60, 3);
  Matrix targets = random_matrix(rng, 60, 2);
  TrainConfig config;
  config.max_epochs = 50;
  config.patience = 3;
  config.validation_fraction = 0.25;
  config.learning_rate = 0.05;  // aggressive on purpose
  config.seed = 8;
  FeedForwardNet net = init_random({3, 8, 2}, 3);
  TrainLog log = train(net, inputs, targets, config);
  REQUIRE(!log.val_mse.empty());
  double best = *std::min_element(log.val_mse.begin(), log.val_mse.end());
  CHECK(log.val_mse[log.best_epoch] == doctest::Approx(best));
}

TEST_CASE("non-finite loss aborts with a diagnostic") {
  DetRng rng(47);
  Matrix inputs = random_matrix(rng, 20, 3, 100.0);
  Matrix targets = random_matrix(rng, 20, 2, 100.0);
  TrainConfig config;
  config.learning_rate = 1e6;  // guaranteed blow-up
  config.max_epochs = 50;
  FeedForwardNet net = init_random({3, 4, 2}, 5);
  CHECK_THROWS_AS(train(net, inputs, targets, config), TrainingError);
}

TEST_CASE("model file round trip is bit-exact") {
  fs::path dir = fs::temp_directory_path() / "vcforge_net_tests";
  fs::create_directories(dir);
  fs::path path = dir / "model.vcnn";

  FeedForwardNet net = init_random({4, 7, 3}, 99);
  net.set_normalization({0.1, 0.2, 0.3, 0.4}, {1.0, 2.0, 3.0, 4.0});
  save_net(net, path.string());
  FeedForwardNet back = load_net(path.string());
  CHECK(nets_identical(net, back));
  REQUIRE(back.has_normalization());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.input_mean()[i] == net.input_mean()[i]);
    CHECK(back.input_std()[i] == net.input_std()[i]);
  }
  // Same forward outputs.
  std::vector<double> x = {0.5, -1.0, 2.0, 0.0};
  auto y1 = net.forward(x);
  auto y2 = back.forward(x);
  for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);

  // Magic check.
  std::ofstream(path, std::ios::binary) << "garbage";
  CHECK_THROWS_AS(load_net(path.string()), FormatError);
}

TEST_CASE("gradient property over random architectures and parameters") {
  DetRng rng(53);
  for (int arch = 0; arch < 3; ++arch) {
    std::vector<std::size_t> dims = {
        2 + static_cast<std::size_t>(rng.below(4)),
        2 + static_cast<std::size_t>(rng.below(5)),
        1 + static_cast<std::size_t>(rng.below(3))};
    if (arch == 2) dims.insert(dims.begin() + 1,
                               2 + static_cast<std::size_t>(rng.below(4)));
    FeedForwardNet net = init_random(dims, 1000 + arch);
    Matrix inputs = random_matrix(rng, 5, dims.front());
    Matrix targets = random_matrix(rng, 5, dims.back());
    double lambda = arch == 1 ? 0.01 : 0.0;
    NetGradients grads = compute_gradients(net, inputs, targets, lambda);
    for (int probe = 0; probe < 25; ++probe) {
      std::size_t l = static_cast<std::size_t>(rng.below(net.layer_count()));
      std::size_t i =
          static_cast<std::size_t>(rng.below(net.layer(l).weights.size()));
      if (lambda > 0.0 && std::fabs(net.layer(l).weights.data()[i]) < 1e-3) {
        continue;
      }
      double analytic = grads.weights[l].data()[i];
      double fd =
          oracle::fd_weight_gradient(net, inputs, targets, lambda, l, i);
      CHECK(std::fabs(analytic - fd) <=
            1e-5 * std::max(1.0, std::fabs(analytic)));
    }
  }
}

}  // TEST_SUITE
