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

#ifndef VCFORGE_ALIGN_HPP_
#define VCFORGE_ALIGN_HPP_

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "vcforge/feature_track.hpp"

namespace vc {

// DTW over squared-Euclidean frame distances with local steps
// {(1,0),(0,1),(1,1)}. Ties between equal-cost predecessors resolve
// diagonal first, then source-advance, then target-advance, so paths are
// deterministic.
struct DtwConfig {
  // Sakoe-Chiba band half-width in frames around the scaled diagonal;
  // unset means unconstrained. Must be >= 1 when set.
  std::optional<std::size_t> band_width;
};

using AlignmentPath = UtterancePair::AlignmentPath;

struct DtwResult {
  AlignmentPath path;  // (0,0) ... (m-1, n-1), monotone
  double cost = 0.0;   // accumulated squared-Euclidean distance
};

// Aligns two non-empty frame matrices of equal dimensionality.
DtwResult dtw_align(const Matrix& src, const Matrix& tgt,
                    const DtwConfig& config = {});

// Convenience overload over whole tracks.
DtwResult dtw_align(const FeatureTrack& src, const FeatureTrack& tgt,
                    const DtwConfig& config = {});

// Two-stage alignment: per-phone DTW on the segments named by the pair's
// phone lists, plus DTW over the residual gap spans where both sides have
// frames. Returns the pair with its alignment populated.
UtterancePair two_stage_align(const UtterancePair& pair,
                              const DtwConfig& config = {});

// Materializes the aligned frame pairs: row k of each matrix is the
// feature vector at the k-th path element.
std::pair<Matrix, Matrix> paired_frames(const UtterancePair& pair);

}  // namespace vc

#endif  // VCFORGE_ALIGN_HPP_
