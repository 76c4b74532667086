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

#ifndef VCFORGE_WAV_HPP_
#define VCFORGE_WAV_HPP_

#include <string>
#include <vector>

namespace vc {

struct Audio {
  std::vector<double> samples;  // scaled to [-1, 1]
  int sample_rate = 0;
};

// Reads a 16-bit PCM mono RIFF/WAVE file. Samples are scaled by 1/32768.
// Stereo or non-PCM content raises FormatError; truncated data raises
// IoError.
Audio read_wav(const std::string& path);

// Writes 16-bit PCM mono. Samples are clamped to [-1, 1] before
// quantization.
void write_wav(const Audio& audio, const std::string& path);

}  // namespace vc

#endif  // VCFORGE_WAV_HPP_
