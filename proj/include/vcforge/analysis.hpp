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

#ifndef VCFORGE_ANALYSIS_HPP_
#define VCFORGE_ANALYSIS_HPP_

#include <cstdint>

#include "vcforge/feature_track.hpp"
#include "vcforge/wav.hpp"

namespace vc {

// Simplified analyzer/synthesizer standing in for a full vocoder: windowed
// FFT with cepstral smoothing for the envelope, normalized autocorrelation
// for F0, log RMS for intensity, pulse/noise excitation with overlap-add
// for resynthesis. Aperiodicity is not modeled.
struct AnalysisConfig {
  std::size_t fft_size = 1024;
  double frame_shift_s = 0.005;
  std::size_t envelope_order = 512;  // must equal fft_size / 2
  double f0_floor_hz = 60.0;
  double f0_ceil_hz = 400.0;
  std::size_t cepstral_lifter_order = 24;
  double log_floor = -20.0;          // natural-log magnitude floor
  double voicing_threshold = 0.3;    // normalized autocorrelation peak
  double silence_rms = 1e-5;         // frames quieter than this are unvoiced
  std::size_t f0_median_frames = 3;  // odd; median filter inside voiced
                                     // runs, 1 disables

  void validate(int sample_rate) const;
};

// All frame-based operations share one framing: frame t covers samples
// [t*hop, t*hop + fft_size), hop = frame_shift_s * sample_rate, and the
// frame count is 1 + floor((len - fft_size) / hop). Audio shorter than one
// window raises ValidationError.
std::size_t frame_count(std::size_t num_samples, int sample_rate,
                        const AnalysisConfig& config);

// Natural-log magnitude envelope, envelope_order bins per frame. Magnitude
// is floored at exp(log_floor) before the log; cepstral liftering smooths
// the result.
FeatureTrack extract_envelope(const Audio& audio, const AnalysisConfig& config);

// Two dims per frame: f0_hz and vuv (0.0 or 1.0). f0_hz is exactly 0 where
// vuv = 0 and lies in [f0_floor, f0_ceil] where vuv = 1.
FeatureTrack extract_f0(const Audio& audio, const AnalysisConfig& config);

// One dim per frame: log RMS energy of the Hann-windowed frame, normalized
// by the window's own RMS, floored at log_floor.
FeatureTrack extract_intensity(const Audio& audio,
                               const AnalysisConfig& config);

// [static | delta | delta-delta]: 3-point central differences with edge
// frames replicated before differencing.
FeatureTrack append_deltas(const FeatureTrack& track);

// Pulse-train (voiced) / white-noise (unvoiced) excitation filtered by the
// per-frame envelope magnitude, overlap-added, peak-normalized. The noise
// source is seeded for reproducibility.
Audio synthesize(const FeatureTrack& envelope, const FeatureTrack& f0vuv,
                 int sample_rate, const AnalysisConfig& config,
                 std::uint64_t noise_seed = 0);

// Orthonormal DCT-II truncation of each frame to the first `order`
// coefficients, and its zero-padded inverse. The low-dimensional spectral
// feature used by the mixture-model baseline.
Matrix dct_reduce_rows(const Matrix& rows, std::size_t order);
Matrix dct_expand_rows(const Matrix& rows, std::size_t envelope_order);
FeatureTrack dct_reduce(const FeatureTrack& envelope, std::size_t order);
FeatureTrack dct_expand(const FeatureTrack& reduced,
                        std::size_t envelope_order);

}  // namespace vc

#endif  // VCFORGE_ANALYSIS_HPP_
