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

#ifndef VCFORGE_KERNELS_HPP_
#define VCFORGE_KERNELS_HPP_

#include <cstddef>

// Double-precision arithmetic kernels behind everything hot: network
// forward/backward passes, Gaussian quadratic forms, DTW frame distances.
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant. The active table is chosen once at
// startup (CPUID probe, overridable via VCFORGE_KERNELS=scalar|avx2 or
// force_backend). Scalar and SIMD variants may differ in summation order,
// so cross-backend agreement is to tolerance, not bit-exact; within one
// backend results are deterministic.

namespace vc::kernels {

struct Ops {
  const char* name;

  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // sum_i (a[i]-b[i])^2
  double (*sumsq_diff)(const double* a, const double* b, std::size_t n);
  // y = W x (+ bias when non-null); W is rows x cols, row-major
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* y);
  // y = W^T d; y has cols entries and is overwritten
  void (*matvec_transposed)(const double* w, std::size_t rows,
                            std::size_t cols, const double* d, double* y);
  // W += alpha * u v^T
  void (*rank1_update)(double* w, std::size_t rows, std::size_t cols,
                       double alpha, const double* u, const double* v);
};

enum class Backend { kScalar, kAvx2 };

const Ops& scalar_ops();

// True when AVX2 kernels were compiled in and the running CPU supports
// AVX2+FMA.
bool avx2_available();
const Ops& avx2_ops();  // precondition: avx2_available()

// The dispatched table. Safe to call concurrently after first use.
const Ops& active();
Backend active_backend();

// Test/CLI hooks. force_backend(kAvx2) throws std::runtime_error when AVX2
// is unavailable. reset_backend() restores the startup choice.
void force_backend(Backend backend);
void reset_backend();

}  // namespace vc::kernels

#endif  // VCFORGE_KERNELS_HPP_
