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

#include "vcforge/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "vcforge/binary_io.hpp"
#include "vcforge/kernels.hpp"

namespace vc {

namespace {

constexpr char kGmmMagic[4] = {'V', 'C', 'G', 'M'};
constexpr std::uint32_t kGmmVersion = 1;
constexpr double kLog2Pi = 1.8378770664093453;

Matrix block_of(const Matrix& cov, std::size_t row0, std::size_t col0,
                std::size_t d) {
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out(i, j) = cov(row0 + i, col0 + j);
  }
  return out;
}

// log N(v | mean, cov) given the Cholesky factor of cov.
double log_gaussian(const double* v, const double* mean, const Matrix& chol,
                    double log_norm_const, std::vector<double>& scratch) {
  const std::size_t d = chol.rows();
  scratch.resize(d);
  for (std::size_t i = 0; i < d; ++i) scratch[i] = v[i] - mean[i];
  // Solve L u = (v - mean); the quadratic form is |u|^2.
  double qf = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double s = scratch[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol(i, k) * scratch[k];
    scratch[i] = s / chol(i, i);
    qf += scratch[i] * scratch[i];
  }
  return log_norm_const - 0.5 * qf;
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Per-dimension variance floor; escalating diagonal jitter when a floored
// covariance still fails Cholesky.
struct FlooredCholesky {
  Matrix cov;
  Matrix chol;
};

FlooredCholesky floor_and_factor(Matrix cov,
                                 const std::vector<double>& floor_diag) {
  const std::size_t d = cov.rows();
  for (std::size_t i = 0; i < d; ++i) {
    cov(i, i) = std::max(cov(i, i), floor_diag[i]);
  }
  double base = 0.0;
  for (double f : floor_diag) base += f;
  base = std::max(base / static_cast<double>(d), 1e-12);
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 8; ++attempt) {
    Matrix trial = cov;
    if (jitter > 0.0) {
      for (std::size_t i = 0; i < d; ++i) trial(i, i) += jitter;
    }
    if (auto chol = cholesky(trial)) {
      return {std::move(trial), std::move(*chol)};
    }
    jitter = jitter == 0.0 ? base : jitter * 10.0;
  }
  throw TrainingError("covariance flooring exhausted: data too degenerate "
                      "for the requested component count");
}

}  // namespace

Matrix JointGmmModel::cov_xx(std::size_t k) const {
  return block_of(covariances[k], 0, 0, source_dim);
}
Matrix JointGmmModel::cov_xy(std::size_t k) const {
  return block_of(covariances[k], 0, source_dim, source_dim);
}
Matrix JointGmmModel::cov_yx(std::size_t k) const {
  return block_of(covariances[k], source_dim, 0, source_dim);
}
Matrix JointGmmModel::cov_yy(std::size_t k) const {
  return block_of(covariances[k], source_dim, source_dim, source_dim);
}

void JointGmmModel::validate() const {
  if (component_count == 0 || weights.size() != component_count ||
      means.rows() != component_count || means.cols() != joint_dim() ||
      covariances.size() != component_count) {
    throw ValidationError("JointGmmModel: inconsistent shape");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ValidationError("JointGmmModel: weight <= 0");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-10) {
    throw ValidationError("JointGmmModel: weights do not sum to 1");
  }
  for (std::size_t k = 0; k < component_count; ++k) {
    const Matrix& c = covariances[k];
    if (c.rows() != joint_dim() || c.cols() != joint_dim()) {
      throw ValidationError("JointGmmModel: covariance shape mismatch");
    }
    for (std::size_t i = 0; i < c.rows(); ++i) {
      for (std::size_t j = i + 1; j < c.cols(); ++j) {
        if (std::fabs(c(i, j) - c(j, i)) > 1e-9 * (1.0 + std::fabs(c(i, j)))) {
          throw ValidationError("JointGmmModel: covariance not symmetric");
        }
      }
    }
  }
}

GmmTrainResult em_train(const Matrix& source, const Matrix& target,
                        std::size_t component_count,
                        const GmmTrainConfig& config) {
  if (component_count == 0) {
    throw ValidationError("em_train: component count must be positive");
  }
  if (source.rows() != target.rows()) {
    throw ValidationError("em_train: paired row counts differ");
  }
  if (source.cols() != target.cols()) {
    throw ValidationError("em_train: source and target dims differ");
  }
  const std::size_t n = source.rows();
  const std::size_t d = source.cols();
  const std::size_t jd = 2 * d;
  const std::size_t K = component_count;
  if (n < K) {
    throw ValidationError("em_train: fewer rows than components");
  }

  // Stack into joint vectors.
  Matrix z(n, jd);
  for (std::size_t r = 0; r < n; ++r) {
    std::copy(source.row(r), source.row(r) + d, z.row(r));
    std::copy(target.row(r), target.row(r) + d, z.row(r) + d);
  }

  // Variance floor from the data itself.
  std::vector<double> data_mean = column_means(z);
  std::vector<double> floor_diag(jd, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = z.row(r);
    for (std::size_t c = 0; c < jd; ++c) {
      double dv = row[c] - data_mean[c];
      floor_diag[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < jd; ++c) {
    floor_diag[c] =
        std::max(config.floor_factor * floor_diag[c] / static_cast<double>(n),
                 1e-12);
  }

  const auto& kr = kernels::active();

  // k-means++ seeding on the joint vectors.
  DetRng rng(config.seed);
  std::vector<std::size_t> centers;
  centers.push_back(static_cast<std::size_t>(rng.below(n)));
  std::vector<double> dist2(n);
  for (std::size_t r = 0; r < n; ++r) {
    dist2[r] = kr.sumsq_diff(z.row(r), z.row(centers[0]), jd);
  }
  while (centers.size() < K) {
    double total = kr.sum(dist2.data(), n);
    std::size_t pick;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rng.below(n));  // all mass on centers
    } else {
      double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t r = 0; r < n; ++r) {
        acc += dist2[r];
        if (u < acc) {
          pick = r;
          break;
        }
      }
    }
    centers.push_back(pick);
    for (std::size_t r = 0; r < n; ++r) {
      dist2[r] =
          std::min(dist2[r], kr.sumsq_diff(z.row(r), z.row(pick), jd));
    }
  }

  // One hard assignment for the initial statistics.
  std::vector<std::size_t> assign(n);
  for (std::size_t r = 0; r < n; ++r) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < K; ++k) {
      double dd = kr.sumsq_diff(z.row(r), z.row(centers[k]), jd);
      if (dd < best) {
        best = dd;
        arg = k;
      }
    }
    assign[r] = arg;
  }

  JointGmmModel model;
  model.component_count = K;
  model.source_dim = d;
  model.weights.assign(K, 0.0);
  model.means = Matrix(K, jd);
  model.covariances.assign(K, Matrix(jd, jd));

  std::vector<Matrix> chols(K);
  std::vector<double> log_norm(K);
  const double min_resp_mass = 1e-10 * static_cast<double>(n);

  auto finalize_stats = [&](const std::vector<double>& resp_sums,
                            Matrix& mean_acc, std::vector<Matrix>& cov_acc) {
    for (std::size_t k = 0; k < K; ++k) {
      if (resp_sums[k] <= min_resp_mass) {
        throw TrainingError(
            "component " + std::to_string(k) +
            " starved during EM: data too degenerate for K = " +
            std::to_string(K) + " (covariance flooring cannot help)");
      }
      double inv = 1.0 / resp_sums[k];
      for (std::size_t c = 0; c < jd; ++c) model.means(k, c) = mean_acc(k, c) * inv;
      Matrix cov(jd, jd);
      for (std::size_t i = 0; i < jd; ++i) {
        for (std::size_t j = i; j < jd; ++j) {
          double v = cov_acc[k](i, j) * inv -
                     model.means(k, i) * model.means(k, j);
          cov(i, j) = v;
          cov(j, i) = v;
        }
      }
      FlooredCholesky fc = floor_and_factor(std::move(cov), floor_diag);
      model.covariances[k] = std::move(fc.cov);
      chols[k] = std::move(fc.chol);
      log_norm[k] = -0.5 * (static_cast<double>(jd) * kLog2Pi +
                            log_det_from_cholesky(chols[k]));
      model.weights[k] = resp_sums[k] / static_cast<double>(n);
    }
  };

  {
    // Hard-assignment statistics.
    std::vector<double> counts(K, 0.0);
    Matrix mean_acc(K, jd);
    std::vector<Matrix> cov_acc(K, Matrix(jd, jd));
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t k = assign[r];
      counts[k] += 1.0;
      const double* row = z.row(r);
      for (std::size_t i = 0; i < jd; ++i) {
        mean_acc(k, i) += row[i];
        for (std::size_t j = i; j < jd; ++j) {
          cov_acc[k](i, j) += row[i] * row[j];
        }
      }
    }
    finalize_stats(counts, mean_acc, cov_acc);
  }

  GmmTrainResult result;
  std::vector<double> log_terms(K);
  Matrix log_resp(n, K);
  std::vector<double> scratch(jd);

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    // E step in the log domain.
    double ll = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < K; ++k) {
        log_terms[k] = std::log(model.weights[k]) +
                       log_gaussian(z.row(r), model.means.row(k), chols[k],
                                    log_norm[k], scratch);
      }
      double lse = log_sum_exp(log_terms);
      ll += lse;
      for (std::size_t k = 0; k < K; ++k) {
        log_resp(r, k) = log_terms[k] - lse;
      }
    }
    result.log_likelihood.push_back(ll);

    // M step.
    std::vector<double> resp_sums(K, 0.0);
    Matrix mean_acc(K, jd);
    std::vector<Matrix> cov_acc(K, Matrix(jd, jd));
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = z.row(r);
      for (std::size_t k = 0; k < K; ++k) {
        double resp = std::exp(log_resp(r, k));
        if (resp < 1e-16) continue;
        resp_sums[k] += resp;
        double* macc = mean_acc.row(k);
        Matrix& cacc = cov_acc[k];
        for (std::size_t i = 0; i < jd; ++i) {
          macc[i] += resp * row[i];
          double ri = resp * row[i];
          double* crow = cacc.row(i);
          for (std::size_t j = i; j < jd; ++j) crow[j] += ri * row[j];
        }
      }
    }
    finalize_stats(resp_sums, mean_acc, cov_acc);

    if (iter > 0) {
      double rel = (ll - prev_ll) / std::max(std::fabs(prev_ll), 1e-12);
      if (rel < config.tolerance) break;
    }
    prev_ll = ll;
  }

  model.validate();
  result.model = std::move(model);
  return result;
}

GmmConverter::GmmConverter(JointGmmModel model) : model_(std::move(model)) {
  model_.validate();
  const std::size_t d = model_.source_dim;
  for (std::size_t k = 0; k < model_.component_count; ++k) {
    Matrix xx = model_.cov_xx(k);
    auto chol = cholesky(xx);
    if (!chol) {
      throw NumericError("GmmConverter: xx block of component " +
                         std::to_string(k) + " is singular");
    }
    // Regression matrix Sigma_yx (Sigma_xx)^-1, built column-wise: solve
    // Sigma_xx m = xy_col, then transpose.
    Matrix xy = model_.cov_xy(k);
    Matrix reg(d, d);
    std::vector<double> col(d);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) col[i] = xy(i, j);
      std::vector<double> solved = cholesky_solve(*chol, col);
      // row j of Sigma_yx (Sigma_xx)^-1 equals solved (by symmetry of xx).
      for (std::size_t i = 0; i < d; ++i) reg(j, i) = solved[i];
    }
    log_norm_const_.push_back(
        -0.5 * (static_cast<double>(d) * kLog2Pi +
                log_det_from_cholesky(*chol)));
    chol_xx_.push_back(std::move(*chol));
    regression_.push_back(std::move(reg));
  }
}

std::vector<double> GmmConverter::posteriors(
    const std::vector<double>& x) const {
  if (x.size() != model_.source_dim) {
    throw ValidationError("GmmConverter: source vector dim mismatch");
  }
  const std::size_t K = model_.component_count;
  std::vector<double> log_terms(K);
  std::vector<double> scratch(model_.source_dim);
  for (std::size_t k = 0; k < K; ++k) {
    log_terms[k] = std::log(model_.weights[k]) +
                   log_gaussian(x.data(), model_.mean_x(k), chol_xx_[k],
                                log_norm_const_[k], scratch);
  }
  double lse = log_sum_exp(log_terms);
  std::vector<double> post(K);
  for (std::size_t k = 0; k < K; ++k) post[k] = std::exp(log_terms[k] - lse);
  return post;
}

std::vector<double> GmmConverter::convert(const std::vector<double>& x) const {
  const std::size_t d = model_.source_dim;
  std::vector<double> post = posteriors(x);
  std::vector<double> y(d, 0.0);
  std::vector<double> centered(d);
  std::vector<double> term(d);
  const auto& kr = kernels::active();
  for (std::size_t k = 0; k < model_.component_count; ++k) {
    if (post[k] < 1e-300) continue;
    const double* mx = model_.mean_x(k);
    const double* my = model_.mean_y(k);
    for (std::size_t i = 0; i < d; ++i) centered[i] = x[i] - mx[i];
    kr.matvec(regression_[k].data(), d, d, centered.data(), my, term.data());
    kr.axpy(post[k], term.data(), y.data(), d);
  }
  return y;
}

void save_gmm(const JointGmmModel& model, const std::string& path) {
  model.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  bio::put_magic(os, kGmmMagic);
  bio::put_u32(os, kGmmVersion);
  bio::put_u32(os, static_cast<std::uint32_t>(model.component_count));
  bio::put_u32(os, static_cast<std::uint32_t>(model.source_dim));
  for (double w : model.weights) bio::put_f64(os, w);
  for (std::size_t i = 0; i < model.means.size(); ++i) {
    bio::put_f64(os, model.means.data()[i]);
  }
  for (const Matrix& c : model.covariances) {
    for (std::size_t i = 0; i < c.size(); ++i) bio::put_f64(os, c.data()[i]);
  }
  if (!os) throw IoError("write failed: " + path);
}

JointGmmModel load_gmm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  bio::check_magic(is, kGmmMagic, "VCGM model");
  std::uint32_t version = bio::get_u32(is, "version");
  if (version != kGmmVersion) {
    throw FormatError("unsupported VCGM version " + std::to_string(version));
  }
  JointGmmModel model;
  model.component_count = bio::get_u32(is, "component count");
  model.source_dim = bio::get_u32(is, "source dim");
  std::size_t jd = model.joint_dim();
  model.weights.resize(model.component_count);
  for (auto& w : model.weights) w = bio::get_f64(is, "weights");
  model.means = Matrix(model.component_count, jd);
  for (std::size_t i = 0; i < model.means.size(); ++i) {
    model.means.data()[i] = bio::get_f64(is, "means");
  }
  model.covariances.assign(model.component_count, Matrix(jd, jd));
  for (auto& c : model.covariances) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      c.data()[i] = bio::get_f64(is, "covariances");
    }
  }
  model.validate();
  return model;
}

}  // namespace vc
