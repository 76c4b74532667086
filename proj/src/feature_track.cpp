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

#include "vcforge/feature_track.hpp"

#include <cmath>

namespace vc {

namespace {
// Tolerance for seconds->frame conversion; absorbs the rounding of
// frame * shift / shift without letting distinct frames collide (frame
// shifts are milliseconds-scale, the tolerance is nanoseconds-scale).
constexpr double kFrameEps = 1e-9;
}  // namespace

FeatureTrack::FeatureTrack(Matrix data, double frame_shift_s,
                           std::vector<std::string> dim_labels)
    : data_(std::move(data)),
      frame_shift_s_(frame_shift_s),
      dim_labels_(std::move(dim_labels)) {
  if (data_.cols() < 1) {
    throw ValidationError("FeatureTrack: dimension must be >= 1");
  }
  if (!(frame_shift_s_ > 0.0) || !std::isfinite(frame_shift_s_)) {
    throw ValidationError("FeatureTrack: frame shift must be positive");
  }
  if (!data_.all_finite()) {
    throw ValidationError("FeatureTrack: non-finite value in feature data");
  }
  if (!dim_labels_.empty() && dim_labels_.size() != data_.cols()) {
    throw ValidationError("FeatureTrack: dim_labels length != dimension");
  }
}

long seconds_to_frame_floor(double seconds, double frame_shift_s) {
  return static_cast<long>(std::floor(seconds / frame_shift_s + kFrameEps));
}

long seconds_to_frame_ceil(double seconds, double frame_shift_s) {
  return static_cast<long>(std::ceil(seconds / frame_shift_s - kFrameEps));
}

double frame_to_seconds(long frame, double frame_shift_s) {
  return static_cast<double>(frame) * frame_shift_s;
}

PhoneSegmentList::PhoneSegmentList(std::vector<PhoneSegment> entries)
    : entries_(std::move(entries)) {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const PhoneSegment& s = entries_[i];
    if (s.start_frame >= s.end_frame) {
      throw ValidationError("PhoneSegmentList: segment '" + s.label +
                            "' has start >= end");
    }
    if (i > 0 && s.start_frame < prev_end) {
      throw ValidationError("PhoneSegmentList: segment '" + s.label +
                            "' overlaps or precedes its predecessor");
    }
    prev_end = s.end_frame;
  }
}

void PhoneSegmentList::validate_against(std::size_t track_frames) const {
  if (!entries_.empty() && entries_.back().end_frame > track_frames) {
    throw ValidationError("PhoneSegmentList: last segment ends past track");
  }
}

PhoneSegmentList PhoneSegmentList::clipped(std::size_t track_frames) const {
  std::vector<PhoneSegment> kept;
  for (const PhoneSegment& s : entries_) {
    if (s.start_frame >= track_frames) break;
    PhoneSegment c = s;
    if (c.end_frame > track_frames) c.end_frame = track_frames;
    kept.push_back(std::move(c));
  }
  return PhoneSegmentList(std::move(kept));
}

UtterancePair::UtterancePair(FeatureTrack source, FeatureTrack target,
                             PhoneSegmentList source_phones,
                             PhoneSegmentList target_phones,
                             std::optional<AlignmentPath> alignment)
    : source_(std::move(source)),
      target_(std::move(target)),
      source_phones_(std::move(source_phones)),
      target_phones_(std::move(target_phones)),
      alignment_(std::move(alignment)) {
  if (source_phones_.size() != target_phones_.size()) {
    throw ValidationError("UtterancePair: phone list lengths differ");
  }
  for (std::size_t i = 0; i < source_phones_.size(); ++i) {
    if (source_phones_[i].label != target_phones_[i].label) {
      throw ValidationError("UtterancePair: phone label mismatch at index " +
                            std::to_string(i) + " ('" +
                            source_phones_[i].label + "' vs '" +
                            target_phones_[i].label + "')");
    }
  }
  source_phones_.validate_against(source_.frames());
  target_phones_.validate_against(target_.frames());
  if (alignment_.has_value()) {
    std::size_t prev_s = 0, prev_t = 0;
    for (std::size_t k = 0; k < alignment_->size(); ++k) {
      auto [s, t] = (*alignment_)[k];
      if (k > 0 && (s < prev_s || t < prev_t)) {
        throw ValidationError("UtterancePair: alignment not monotone");
      }
      if (s >= source_.frames() || t >= target_.frames()) {
        throw ValidationError("UtterancePair: alignment index out of range");
      }
      prev_s = s;
      prev_t = t;
    }
  }
}

const UtterancePair::AlignmentPath& UtterancePair::alignment() const {
  if (!alignment_.has_value()) {
    throw StateError("UtterancePair: alignment not computed");
  }
  return *alignment_;
}

UtterancePair UtterancePair::with_alignment(AlignmentPath path) const {
  return UtterancePair(source_, target_, source_phones_, target_phones_,
                       std::move(path));
}

}  // namespace vc
