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

#ifndef VCFORGE_GMM_HPP_
#define VCFORGE_GMM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vcforge/matrix.hpp"

namespace vc {

// Joint-density mixture over stacked source+target vectors z = [x; y].
// Means are rows of a K x 2d matrix; each covariance is a full 2d x 2d
// matrix partitioned into xx / xy / yx / yy blocks by the accessors.
struct JointGmmModel {
  std::size_t component_count = 0;  // K
  std::size_t source_dim = 0;       // d; joint dim is 2d
  std::vector<double> weights;      // K, positive, sums to 1
  Matrix means;                     // K x 2d
  std::vector<Matrix> covariances;  // K of 2d x 2d, symmetric PD

  std::size_t joint_dim() const { return 2 * source_dim; }
  const double* mean_x(std::size_t k) const { return means.row(k); }
  const double* mean_y(std::size_t k) const {
    return means.row(k) + source_dim;
  }
  Matrix cov_xx(std::size_t k) const;
  Matrix cov_xy(std::size_t k) const;
  Matrix cov_yx(std::size_t k) const;
  Matrix cov_yy(std::size_t k) const;

  // Checks weight positivity/normalization, symmetry, and the yx == xy^T
  // partition contract.
  void validate() const;
};

struct GmmTrainConfig {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;      // relative log-likelihood improvement
  double floor_factor = 1e-6;   // of the per-dimension data variance
  std::uint64_t seed = 0;
};

struct GmmTrainResult {
  JointGmmModel model;
  std::vector<double> log_likelihood;  // per EM iteration, non-decreasing
};

// EM on the joint density of paired rows. Initialization is k-means++ over
// joint vectors followed by one hard assignment. Degenerate data (fewer
// distinct rows than components after covariance flooring) raises
// TrainingError.
GmmTrainResult em_train(const Matrix& source, const Matrix& target,
                        std::size_t component_count,
                        const GmmTrainConfig& config = {});

// MMSE conversion. Factorizes the xx blocks once; converting is then a
// posterior-weighted sum of per-component linear regressions. Safe for
// concurrent use once constructed.
class GmmConverter {
 public:
  explicit GmmConverter(JointGmmModel model);

  const JointGmmModel& model() const { return model_; }

  // Posterior p_k(x) over components given a source vector; sums to 1.
  std::vector<double> posteriors(const std::vector<double>& x) const;

  std::vector<double> convert(const std::vector<double>& x) const;

 private:
  JointGmmModel model_;
  std::vector<Matrix> chol_xx_;         // Cholesky of each xx block
  std::vector<Matrix> regression_;      // Sigma_yx (Sigma_xx)^-1 per k
  std::vector<double> log_norm_const_;  // Gaussian normalizers, log domain
};

// Model file: magic "VCGM", version, K, d, then weights, means,
// covariances as 64-bit little-endian IEEE-754.
void save_gmm(const JointGmmModel& model, const std::string& path);
JointGmmModel load_gmm(const std::string& path);

}  // namespace vc

#endif  // VCFORGE_GMM_HPP_
