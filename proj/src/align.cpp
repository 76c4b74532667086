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

#include "vcforge/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vcforge/kernels.hpp"

namespace vc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Backpointer codes, in tie-break preference order.
enum Step : unsigned char { kDiag = 0, kSrcAdvance = 1, kTgtAdvance = 2 };

DtwResult dtw_core(const Matrix& src, const Matrix& tgt,
                   const DtwConfig& config, bool allow_band) {
  const std::size_t m = src.rows();
  const std::size_t n = tgt.rows();
  const std::size_t d = src.cols();
  const auto& k = kernels::active();

  std::vector<double> cost(m * n, kInf);
  std::vector<unsigned char> back(m * n, kDiag);
  auto idx = [n](std::size_t i, std::size_t j) { return i * n + j; };

  const bool banded = allow_band && config.band_width.has_value();
  const double slope = static_cast<double>(n) / static_cast<double>(m);
  auto in_band = [&](std::size_t i, std::size_t j) {
    if (!banded) return true;
    double center = slope * (static_cast<double>(i) + 0.5);
    return std::fabs(static_cast<double>(j) + 0.5 - center) <=
           static_cast<double>(*config.band_width) + 0.5;
  };

  for (std::size_t i = 0; i < m; ++i) {
    const double* si = src.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_band(i, j)) continue;
      double local = k.sumsq_diff(si, tgt.row(j), d);
      if (i == 0 && j == 0) {
        cost[idx(0, 0)] = local;
        continue;
      }
      // Preference order on ties: diagonal, source-advance, target-advance.
      double best = kInf;
      unsigned char step = kDiag;
      if (i > 0 && j > 0 && cost[idx(i - 1, j - 1)] < best) {
        best = cost[idx(i - 1, j - 1)];
        step = kDiag;
      }
      if (i > 0 && cost[idx(i - 1, j)] < best) {
        best = cost[idx(i - 1, j)];
        step = kSrcAdvance;
      }
      if (j > 0 && cost[idx(i, j - 1)] < best) {
        best = cost[idx(i, j - 1)];
        step = kTgtAdvance;
      }
      if (best == kInf) continue;  // unreachable inside a tight band corner
      cost[idx(i, j)] = best + local;
      back[idx(i, j)] = step;
    }
  }

  if (cost[idx(m - 1, n - 1)] == kInf) {
    // Band too tight to connect the corners; redo unconstrained.
    return dtw_core(src, tgt, config, /*allow_band=*/false);
  }

  DtwResult result;
  result.cost = cost[idx(m - 1, n - 1)];
  std::size_t i = m - 1, j = n - 1;
  result.path.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (back[idx(i, j)]) {
      case kDiag:
        --i;
        --j;
        break;
      case kSrcAdvance:
        --i;
        break;
      case kTgtAdvance:
        --j;
        break;
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

}  // namespace

DtwResult dtw_align(const Matrix& src, const Matrix& tgt,
                    const DtwConfig& config) {
  if (src.rows() == 0 || tgt.rows() == 0) {
    throw ValidationError("dtw_align: empty input sequence");
  }
  if (src.cols() != tgt.cols()) {
    throw ValidationError("dtw_align: dimensionality mismatch");
  }
  if (config.band_width.has_value() && *config.band_width < 1) {
    throw ValidationError("dtw_align: band width must be >= 1");
  }
  return dtw_core(src, tgt, config, /*allow_band=*/true);
}

DtwResult dtw_align(const FeatureTrack& src, const FeatureTrack& tgt,
                    const DtwConfig& config) {
  return dtw_align(src.data(), tgt.data(), config);
}

UtterancePair two_stage_align(const UtterancePair& pair,
                              const DtwConfig& config) {
  const std::size_t m = pair.source().frames();
  const std::size_t n = pair.target().frames();
  AlignmentPath full;

  auto align_span = [&](std::size_t s0, std::size_t s1, std::size_t t0,
                        std::size_t t1) {
    if (s0 >= s1 || t0 >= t1) return;  // one side empty: no pairs to form
    Matrix src = pair.source().data().slice_rows(s0, s1);
    Matrix tgt = pair.target().data().slice_rows(t0, t1);
    DtwResult r = dtw_align(src, tgt, config);
    for (const auto& [i, j] : r.path) full.emplace_back(s0 + i, t0 + j);
  };

  const auto& sp = pair.source_phones();
  const auto& tp = pair.target_phones();
  std::size_t prev_s = 0, prev_t = 0;
  for (std::size_t p = 0; p < sp.size(); ++p) {
    // Residual gap before this phone (leading silence / inter-phone).
    align_span(prev_s, sp[p].start_frame, prev_t, tp[p].start_frame);
    align_span(sp[p].start_frame, sp[p].end_frame, tp[p].start_frame,
               tp[p].end_frame);
    prev_s = sp[p].end_frame;
    prev_t = tp[p].end_frame;
  }
  align_span(prev_s, m, prev_t, n);  // trailing residual

  if (full.empty()) {
    // No phones and one side empty cannot happen (tracks are non-empty when
    // phones exist); with no phones at all, fall back to plain DTW.
    DtwResult r = dtw_align(pair.source(), pair.target(), config);
    full = std::move(r.path);
  }
  return pair.with_alignment(std::move(full));
}

std::pair<Matrix, Matrix> paired_frames(const UtterancePair& pair) {
  const AlignmentPath& path = pair.alignment();
  Matrix src(path.size(), pair.source().dim());
  Matrix tgt(path.size(), pair.target().dim());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& [i, j] = path[k];
    const double* srow = pair.source().frame(i);
    const double* trow = pair.target().frame(j);
    std::copy(srow, srow + pair.source().dim(), src.row(k));
    std::copy(trow, trow + pair.target().dim(), tgt.row(k));
  }
  return {std::move(src), std::move(tgt)};
}

}  // namespace vc
