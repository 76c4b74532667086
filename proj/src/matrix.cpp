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

#include "vcforge/matrix.hpp"

#include <cmath>

namespace vc {

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix Matrix::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    throw ValidationError("Matrix::slice_rows: range out of bounds");
  }
  Matrix out(end - begin, cols_);
  for (std::size_t r = begin; r < end; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(r - begin, c) = (*this)(r, c);
  }
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

std::vector<double> column_means(const Matrix& m) {
  if (m.rows() == 0) {
    throw ValidationError("column_means: matrix has no rows");
  }
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += row[c];
  }
  double inv = 1.0 / static_cast<double>(m.rows());
  for (double& v : mean) v *= inv;
  return mean;
}

Matrix covariance(const Matrix& m, const std::vector<double>& mean) {
  const std::size_t d = m.cols();
  Matrix cov(d, d);
  std::vector<double> centered(d);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    for (std::size_t c = 0; c < d; ++c) centered[c] = row[c] - mean[c];
    for (std::size_t i = 0; i < d; ++i) {
      double ci = centered[i];
      double* cov_row = cov.row(i);
      for (std::size_t j = i; j < d; ++j) cov_row[j] += ci * centered[j];
    }
  }
  double inv = 1.0 / static_cast<double>(m.rows());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) *= inv;
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) {
    throw ValidationError("cholesky: matrix must be square");
  }
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return std::nullopt;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

std::vector<double> cholesky_solve(const Matrix& chol_lower,
                                   const std::vector<double>& b) {
  const std::size_t n = chol_lower.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol_lower(i, k) * y[k];
    y[i] = s / chol_lower(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii > 0; --ii) {
    std::size_t i = ii - 1;
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= chol_lower(k, i) * x[k];
    x[i] = s / chol_lower(i, i);
  }
  return x;
}

double log_det_from_cholesky(const Matrix& chol_lower) {
  double acc = 0.0;
  for (std::size_t i = 0; i < chol_lower.rows(); ++i) {
    acc += std::log(chol_lower(i, i));
  }
  return 2.0 * acc;
}

}  // namespace vc
