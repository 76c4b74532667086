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

#ifndef VCFORGE_PROSODY_HPP_
#define VCFORGE_PROSODY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "vcforge/feature_track.hpp"

namespace vc {

// One contiguous voiced run: original per-frame values (F0 in Hz or log
// intensity), the trajectory resampled to a fixed length L, and the
// segment mean of the original values.
struct VoicedSegment {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // exclusive
  std::vector<double> original_values;
  std::vector<double> normalized;  // length L
  double segment_mean = 0.0;

  std::size_t length() const { return end_frame - start_frame; }
};

// Frame-to-frame differences of a length-normalized trajectory; the first
// element is exactly 0.
struct F0DiffFeature {
  std::vector<double> values;
};

// Global F0 mean/stddev over voiced frames of the two speakers' training
// data; drives the mean-variance transform.
struct MeanVarStats {
  double mean_src = 0.0;
  double std_src = 0.0;
  double mean_tgt = 0.0;
  double std_tgt = 0.0;

  void validate() const;
};

// One phone's duration-regression sample: N spectral frames sampled from
// the source phone, concatenated, plus the source/target duration ratio.
struct DurationSample {
  std::vector<double> input;  // N * envelope_dim
  double ratio = 0.0;         // source_frames / target_frames
};

// Linear resampling of a trajectory to new_len points with exact
// endpoints. new_len >= 1; inputs of length 1 replicate.
std::vector<double> resample_linear(const std::vector<double>& values,
                                    std::size_t new_len);

// Maximal vuv == 1 runs of an f0+vuv track, normalized to length L. Runs of
// a single frame are dropped.
std::vector<VoicedSegment> extract_voiced_segments(const FeatureTrack& f0vuv,
                                                   std::size_t L);

// Same segmentation, but the per-frame values come from column 0 of
// `values` (e.g. log intensity) while voicing is taken from the f0vuv
// track. Both tracks must have equal frame counts.
std::vector<VoicedSegment> extract_value_segments(const FeatureTrack& values,
                                                  const FeatureTrack& f0vuv,
                                                  std::size_t L);

// Adjacent differences of the normalized trajectory, first element 0.
F0DiffFeature f0_to_diff(const VoicedSegment& segment);

// Three-step reconstruction: cumulative sum from 0, mean adjustment to the
// predicted segment mean, then re-interpolation to the original length.
std::vector<double> reconstruct_f0(const F0DiffFeature& diff,
                                   double predicted_mean,
                                   std::size_t original_length);

// f_o = mean_tgt + (std_tgt / std_src) * (f_s - mean_src) for voiced values
// (f_s > 0); unvoiced zeros pass through unchanged.
double meanvar_transform(double f_s, const MeanVarStats& stats);

double predict_segment_mean(double source_segment_mean,
                            const MeanVarStats& stats);

MeanVarStats compute_meanvar_stats(const std::vector<double>& source_voiced_f0,
                                   const std::vector<double>& target_voiced_f0);

// Text model file holding exactly the four scalars.
void save_meanvar(const MeanVarStats& stats, const std::string& path);
MeanVarStats load_meanvar(const std::string& path);

// Everything a prosody training-set builder needs from one aligned
// utterance pair. `values` tracks are optional; when null the F0 values
// themselves are used.
struct ProsodyPair {
  const FeatureTrack* source_f0vuv = nullptr;
  const FeatureTrack* target_f0vuv = nullptr;
  const FeatureTrack* source_values = nullptr;  // e.g. intensity
  const FeatureTrack* target_values = nullptr;
  const UtterancePair::AlignmentPath* alignment = nullptr;
};

struct SegmentTrainingSet {
  Matrix inputs;   // one row per matched segment pair, length L
  Matrix targets;  // same shape
  std::size_t matched = 0;
  std::size_t dropped = 0;  // source segments with no target owner
};

// Source diff features paired with target diff features. A source segment
// pairs with the target segment owning the plurality of target frames its
// span aligns to; unmatched segments are dropped and counted.
SegmentTrainingSet build_f0_training_set(const std::vector<ProsodyPair>& pairs,
                                         std::size_t L);

// As build_f0_training_set but with raw length-normalized values (no
// differencing), using the F0-derived voicing mask.
SegmentTrainingSet build_intensity_training_set(
    const std::vector<ProsodyPair>& pairs, std::size_t L);

// Duration samples for every phone with at least 2 source frames. Sampled
// frame positions are round(i * (len-1) / (N-1)).
std::vector<DurationSample> build_duration_samples(
    const FeatureTrack& source_envelope, const PhoneSegmentList& source_phones,
    const PhoneSegmentList& target_phones, std::size_t N);

// Additively offsets the log envelope inside each segment span so the
// frame's implied log intensity equals the segment's per-frame predicted
// value (original_values holds the prediction at original length).
// Unvoiced frames are untouched.
FeatureTrack apply_intensity(const FeatureTrack& converted_envelope,
                             const std::vector<VoicedSegment>& predicted);

// The implied log intensity apply_intensity drives to: log RMS over the
// frame's linear-magnitude envelope.
double implied_log_intensity(const double* envelope, std::size_t dim);

enum class RetimeMode { kLinear, kNearest };

struct RetimedTracks {
  std::vector<FeatureTrack> tracks;
  PhoneSegmentList phones;
};

// Resamples each phone span to round(len / ratio) frames (ratios clamped to
// [0.5, 2]); gaps between phones keep their length. All tracks are retimed
// with the same mapping; nearest-neighbor mode keeps VUV binary.
RetimedTracks apply_duration(const std::vector<const FeatureTrack*>& tracks,
                             const std::vector<RetimeMode>& modes,
                             const PhoneSegmentList& phones,
                             const std::vector<double>& ratios);

// Segment dump for inspection: `utt_id seg_idx start end mean` then the
// normalized values.
void write_segments_text(const std::vector<VoicedSegment>& segments,
                         const std::string& utt_id, const std::string& path);

}  // namespace vc

#endif  // VCFORGE_PROSODY_HPP_
