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

#ifndef VCFORGE_METRICS_HPP_
#define VCFORGE_METRICS_HPP_

#include <string>
#include <vector>

#include "vcforge/feature_track.hpp"

namespace vc {

enum class SpectrumDomain { kLog, kLinearMagnitude };

// Log-spectral distortion ratio: 100 * sum_k d(converted_k, target_k) /
// sum_k d(source_k, target_k), with d the squared log-spectral difference
// summed over bins. Frames whose source-target distortion is zero are
// excluded from both sums. All three tracks must be frame-aligned.
double lsd_ratio(const FeatureTrack& source, const FeatureTrack& converted,
                 const FeatureTrack& target, SpectrumDomain domain);

struct F0RmseResult {
  double rmse_hz = 0.0;
  std::size_t shared_voiced_frames = 0;
  std::size_t voicing_mismatch_frames = 0;  // voiced in exactly one track
};

// RMSE over frames voiced in both tracks; mismatched-voicing frames are
// excluded and counted. Zero shared voiced frames raises NumericError.
F0RmseResult f0_rmse(const FeatureTrack& converted_f0vuv,
                     const FeatureTrack& target_f0vuv);

struct UtteranceEval {
  std::string utt_id;
  double lsd_percent = 0.0;
  double lsd_voiced_percent = 0.0;  // voiced-frames-only variant
  double f0_rmse_hz = 0.0;
  std::size_t frames_evaluated = 0;
  std::size_t voicing_mismatch_frames = 0;
};

struct EvalReport {
  double lsd_percent = 0.0;          // mean over utterances
  double lsd_voiced_percent = 0.0;
  double f0_rmse_hz = 0.0;
  std::size_t env_bins = 0;          // M of the distortion sum
  std::size_t frames_evaluated = 0;  // total frames entering the sums
  std::vector<UtteranceEval> per_utterance;
};

EvalReport aggregate_report(std::vector<UtteranceEval> rows,
                            std::size_t env_bins);

// Plain-text table, machine-readable key=value file, and per-utterance CSV.
void write_report_text(const EvalReport& report, const std::string& path);
void write_report_kv(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);

}  // namespace vc

#endif  // VCFORGE_METRICS_HPP_
