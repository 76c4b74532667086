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

#include "vcforge/kernels.hpp"

// Reference kernels. Plain left-to-right accumulation; the SIMD variants
// are verified against these.

namespace vc::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void matvec_scalar(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = bias ? bias[r] : 0.0;
    const double* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_transposed_scalar(const double* w, std::size_t rows,
                              std::size_t cols, const double* d, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_scalar(d[r], w + r * cols, y, cols);
  }
}

void rank1_update_scalar(double* w, std::size_t rows, std::size_t cols,
                         double alpha, const double* u, const double* v) {
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_scalar(alpha * u[r], v, w + r * cols, cols);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",
      dot_scalar,
      axpy_scalar,
      scale_scalar,
      sum_scalar,
      sumsq_diff_scalar,
      matvec_scalar,
      matvec_transposed_scalar,
      rank1_update_scalar,
  };
  return ops;
}

}  // namespace vc::kernels
