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

// AVX2+FMA variants, 4 doubles per lane. This translation unit is compiled
// with -mavx2 -mfma; callers must gate on avx2_available() (CPUID probe in
// the dispatcher) before using this table.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace vc::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void matvec_avx2(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* y) {
  std::size_t r = 0;
  // Two rows at a time keeps both FMA pipes busy and halves loads of x.
  for (; r + 2 <= rows; r += 2) {
    const double* row0 = w + r * cols;
    const double* row1 = row0 + cols;
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d vx = _mm256_loadu_pd(x + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(row0 + c), vx, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(row1 + c), vx, a1);
    }
    double s0 = hsum(a0);
    double s1 = hsum(a1);
    for (; c < cols; ++c) {
      s0 += row0[c] * x[c];
      s1 += row1[c] * x[c];
    }
    y[r] = s0 + (bias ? bias[r] : 0.0);
    y[r + 1] = s1 + (bias ? bias[r + 1] : 0.0);
  }
  for (; r < rows; ++r) {
    y[r] = dot_avx2(w + r * cols, x, cols) + (bias ? bias[r] : 0.0);
  }
}

void matvec_transposed_avx2(const double* w, std::size_t rows,
                            std::size_t cols, const double* d, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_avx2(d[r], w + r * cols, y, cols);
  }
}

void rank1_update_avx2(double* w, std::size_t rows, std::size_t cols,
                       double alpha, const double* u, const double* v) {
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_avx2(alpha * u[r], v, w + r * cols, cols);
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {
      "avx2",
      dot_avx2,
      axpy_avx2,
      scale_avx2,
      sum_avx2,
      sumsq_diff_avx2,
      matvec_avx2,
      matvec_transposed_avx2,
      rank1_update_avx2,
  };
  return ops;
}

}  // namespace vc::kernels

#endif  // __AVX2__ && __FMA__
