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

#ifndef VCFORGE_SYNTHETIC_HPP_
#define VCFORGE_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace vc {

// Seeded desk-scale parallel corpus: a formant-synthesized "source speaker"
// and a "target" derived from it by known transformations — fixed formant
// warp, a segment-level F0 contour rule (affine level shift plus a
// sign-preserving quadratic shape term that a global mean-variance mapping
// cannot express), per-phone-class intensity gains, and per-phone-class
// duration scaling. Phone boundaries are exact by construction and written
// as label files.
struct SyntheticConfig {
  std::uint64_t seed = 1;
  std::size_t utterance_count = 40;
  int sample_rate = 16000;

  // Target derivation parameters. The F0 rule maps a run's level affinely
  // and distorts the within-run deviation with a bounded tanh term, so no
  // global affine transform can reproduce it while the whole target range
  // stays inside the trackable band.
  double formant_warp = 1.12;
  double bandwidth_warp = 0.7;    // target formants are sharper
  double f0_level_scale = 1.3;    // target level = scale * level + offset
  double f0_level_offset_hz = 20.0;
  double f0_shape_linear = 1.1;   // slope on the run deviation
  double f0_shape_tanh = 2.5;     // weight of 10 Hz * tanh(dev / 10 Hz)
};

struct SyntheticCorpus {
  std::vector<std::string> utt_ids;
  std::string manifest_path;  // `utt_id src_wav src_lab tgt_wav tgt_lab`
};

// Writes wav/ and lab/ trees plus manifest.txt under out_dir. Identical
// seeds and configs produce byte-identical corpora.
SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config,
                                      const std::string& out_dir);

}  // namespace vc

#endif  // VCFORGE_SYNTHETIC_HPP_
