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

// Test-only oracles, kept deliberately independent of the implementation
// paths they check: exhaustive DTW path enumeration, a direct
// inverse-and-determinant Gaussian mixture evaluation, a naive DFT, and
// central finite differences for network gradients.

#ifndef VCFORGE_TESTS_ORACLES_HPP_
#define VCFORGE_TESTS_ORACLES_HPP_

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "vcforge/gmm.hpp"
#include "vcforge/matrix.hpp"
#include "vcforge/net.hpp"

namespace vc::oracle {

// Minimum accumulated squared-Euclidean cost over every monotone path from
// (0,0) to (m-1,n-1) with steps {(1,0),(0,1),(1,1)}, by exhaustive
// recursion. Exponential; callers keep m*n small.
inline double dtw_brute_force(const Matrix& src, const Matrix& tgt) {
  const std::size_t m = src.rows();
  const std::size_t n = tgt.rows();
  auto local = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < src.cols(); ++d) {
      double diff = src(i, d) - tgt(j, d);
      acc += diff * diff;
    }
    return acc;
  };
  // Recursion from the end cell back to (0,0).
  std::vector<double> memo(m * n, -1.0);
  auto solve = [&](auto&& self, std::size_t i, std::size_t j) -> double {
    if (i == 0 && j == 0) return local(0, 0);
    double& slot = memo[i * n + j];
    if (slot >= 0.0) return slot;
    double best = std::numeric_limits<double>::infinity();
    if (i > 0 && j > 0) best = std::min(best, self(self, i - 1, j - 1));
    if (i > 0) best = std::min(best, self(self, i - 1, j));
    if (j > 0) best = std::min(best, self(self, i, j - 1));
    slot = best + local(i, j);
    return slot;
  };
  return solve(solve, m - 1, n - 1);
}

// Gauss-Jordan inverse and determinant; no Cholesky, no log domain.
inline Matrix invert_direct(const Matrix& a, double* det_out) {
  const std::size_t n = a.rows();
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1.0;
  }
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(aug(r, col)) > std::fabs(aug(pivot, col))) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < 2 * n; ++j) {
        std::swap(aug(pivot, j), aug(col, j));
      }
      det = -det;
    }
    det *= aug(col, col);
    double inv_p = 1.0 / aug(col, col);
    for (std::size_t j = 0; j < 2 * n; ++j) aug(col, j) *= inv_p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = aug(r, col);
      for (std::size_t j = 0; j < 2 * n; ++j) {
        aug(r, j) -= factor * aug(col, j);
      }
    }
  }
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  }
  if (det_out) *det_out = det;
  return inv;
}

inline double gaussian_density_direct(const std::vector<double>& x,
                                      const double* mean, const Matrix& cov) {
  const std::size_t d = x.size();
  double det = 0.0;
  Matrix inv = invert_direct(cov, &det);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < d; ++i) centered[i] = x[i] - mean[i];
  double qf = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      qf += centered[i] * inv(i, j) * centered[j];
    }
  }
  double norm = std::pow(2.0 * M_PI, -0.5 * static_cast<double>(d)) /
                std::sqrt(det);
  return norm * std::exp(-0.5 * qf);
}

// Direct transcription of the MMSE conversion: posterior-weighted
// per-component regressions, with densities evaluated via explicit matrix
// inverses.
inline std::vector<double> gmm_convert_direct(const JointGmmModel& model,
                                              const std::vector<double>& x) {
  const std::size_t d = model.source_dim;
  const std::size_t K = model.component_count;
  std::vector<double> numer(K);
  double denom = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    numer[k] = model.weights[k] *
               gaussian_density_direct(x, model.mean_x(k), model.cov_xx(k));
    denom += numer[k];
  }
  std::vector<double> y(d, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double post = numer[k] / denom;
    Matrix inv = invert_direct(model.cov_xx(k), nullptr);
    Matrix yx = model.cov_yx(k);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < d; ++i) centered[i] = x[i] - model.mean_x(k)[i];
    std::vector<double> tmp(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) tmp[i] += inv(i, j) * centered[j];
    }
    for (std::size_t i = 0; i < d; ++i) {
      double term = model.mean_y(k)[i];
      for (std::size_t j = 0; j < d; ++j) term += yx(i, j) * tmp[j];
      y[i] += post * term;
    }
  }
  return y;
}

// Naive O(n^2) DFT.
inline std::vector<std::complex<double>> dft_naive(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      double angle = -2.0 * M_PI * static_cast<double>(k * t) /
                     static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

// Central finite difference of batch_loss with respect to one weight.
inline double fd_weight_gradient(FeedForwardNet& net, const Matrix& inputs,
                                 const Matrix& targets, double l1_lambda,
                                 std::size_t layer, std::size_t flat_index,
                                 double epsilon = 1e-5) {
  double* w = net.layer(layer).weights.data() + flat_index;
  double saved = *w;
  *w = saved + epsilon;
  double up = batch_loss(net, inputs, targets, l1_lambda);
  *w = saved - epsilon;
  double down = batch_loss(net, inputs, targets, l1_lambda);
  *w = saved;
  return (up - down) / (2.0 * epsilon);
}

inline double fd_bias_gradient(FeedForwardNet& net, const Matrix& inputs,
                               const Matrix& targets, double l1_lambda,
                               std::size_t layer, std::size_t index,
                               double epsilon = 1e-5) {
  double& b = net.layer(layer).biases[index];
  double saved = b;
  b = saved + epsilon;
  double up = batch_loss(net, inputs, targets, l1_lambda);
  b = saved - epsilon;
  double down = batch_loss(net, inputs, targets, l1_lambda);
  b = saved;
  return (up - down) / (2.0 * epsilon);
}

}  // namespace vc::oracle

#endif  // VCFORGE_TESTS_ORACLES_HPP_
