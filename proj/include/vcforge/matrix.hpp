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

#ifndef VCFORGE_MATRIX_HPP_
#define VCFORGE_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

#include "vcforge/common.hpp"

namespace vc {

// Dense row-major matrix of doubles. Deliberately small: storage, row
// access, and the few linear-algebra routines the toolkit needs. Heavy
// loops go through vc::kernels.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows_list) {
    rows_ = rows_list.size();
    cols_ = rows_ == 0 ? 0 : rows_list.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows_list) {
      if (r.size() != cols_) {
        throw ValidationError("Matrix initializer rows have unequal widths");
      }
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::vector<double> row_copy(std::size_t r) const {
    return std::vector<double>(row(r), row(r) + cols_);
  }

  void set_row(std::size_t r, const std::vector<double>& values) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = values[c];
  }

  bool all_finite() const;

  // Rows [begin, end) as a new matrix.
  Matrix slice_rows(std::size_t begin, std::size_t end) const;

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Column means of a matrix with at least one row.
std::vector<double> column_means(const Matrix& m);

// Maximum-likelihood covariance (divide by N) of the rows of m around the
// given mean.
Matrix covariance(const Matrix& m, const std::vector<double>& mean);

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix,
// or nullopt when the matrix is not numerically PD.
std::optional<Matrix> cholesky(const Matrix& a);

// Solves A x = b given the Cholesky factor L of A (forward then back
// substitution).
std::vector<double> cholesky_solve(const Matrix& chol_lower,
                                   const std::vector<double>& b);

// log(det(A)) from its Cholesky factor.
double log_det_from_cholesky(const Matrix& chol_lower);

}  // namespace vc

#endif  // VCFORGE_MATRIX_HPP_
