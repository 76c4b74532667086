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

#ifndef VCFORGE_FEATURE_TRACK_HPP_
#define VCFORGE_FEATURE_TRACK_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcforge/matrix.hpp"

namespace vc {

// Time-indexed matrix of per-frame feature vectors. The universal currency
// between modules: log spectral envelopes, F0+VUV, intensity, deltas.
// Immutable after construction; constructors reject non-finite values and
// non-positive frame shifts so downstream numerics never have to check.
class FeatureTrack {
 public:
  FeatureTrack(Matrix data, double frame_shift_s,
               std::vector<std::string> dim_labels = {});

  std::size_t frames() const { return data_.rows(); }
  std::size_t dim() const { return data_.cols(); }
  double frame_shift_s() const { return frame_shift_s_; }

  double value(std::size_t frame, std::size_t d) const {
    return data_(frame, d);
  }
  const double* frame(std::size_t t) const { return data_.row(t); }
  const Matrix& data() const { return data_; }
  const std::vector<std::string>& dim_labels() const { return dim_labels_; }

 private:
  Matrix data_;
  double frame_shift_s_ = 0.0;
  std::vector<std::string> dim_labels_;
};

// Frame/seconds conversion. The epsilon absorbs the round trip through
// seconds: to_frame_floor(frame_to_seconds(f)) == f for any f >= 0.
long seconds_to_frame_floor(double seconds, double frame_shift_s);
long seconds_to_frame_ceil(double seconds, double frame_shift_s);
double frame_to_seconds(long frame, double frame_shift_s);

struct PhoneSegment {
  std::string label;
  std::size_t start_frame = 0;  // inclusive
  std::size_t end_frame = 0;    // exclusive
};

// Ordered, non-overlapping phone segments. Construction validates ordering
// and non-overlap; the <= track-length bound is checked against a concrete
// track via validate_against().
class PhoneSegmentList {
 public:
  PhoneSegmentList() = default;
  explicit PhoneSegmentList(std::vector<PhoneSegment> entries);

  const std::vector<PhoneSegment>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const PhoneSegment& operator[](std::size_t i) const { return entries_[i]; }

  void validate_against(std::size_t track_frames) const;

  // Copy with end frames clamped to track_frames and segments starting at
  // or past the end dropped. Label files produced with ceil'd end times can
  // overrun the analysis frame count by a frame or two; this reconciles
  // them with a concrete track.
  PhoneSegmentList clipped(std::size_t track_frames) const;

 private:
  std::vector<PhoneSegment> entries_;
};

// Aligned source/target feature tracks plus phone boundaries for one
// parallel utterance. The parallel-corpus contract (equal phone label
// sequences) is enforced at construction.
class UtterancePair {
 public:
  using AlignmentPath = std::vector<std::pair<std::size_t, std::size_t>>;

  UtterancePair(FeatureTrack source, FeatureTrack target,
                PhoneSegmentList source_phones, PhoneSegmentList target_phones,
                std::optional<AlignmentPath> alignment = std::nullopt);

  const FeatureTrack& source() const { return source_; }
  const FeatureTrack& target() const { return target_; }
  const PhoneSegmentList& source_phones() const { return source_phones_; }
  const PhoneSegmentList& target_phones() const { return target_phones_; }
  bool has_alignment() const { return alignment_.has_value(); }
  const AlignmentPath& alignment() const;

  UtterancePair with_alignment(AlignmentPath path) const;

 private:
  FeatureTrack source_;
  FeatureTrack target_;
  PhoneSegmentList source_phones_;
  PhoneSegmentList target_phones_;
  std::optional<AlignmentPath> alignment_;
};

}  // namespace vc

#endif  // VCFORGE_FEATURE_TRACK_HPP_
