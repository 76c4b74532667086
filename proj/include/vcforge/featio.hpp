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

#ifndef VCFORGE_FEATIO_HPP_
#define VCFORGE_FEATIO_HPP_

#include <string>

#include "vcforge/feature_track.hpp"

namespace vc {

// Feature file, binary little-endian:
//   magic "VCFT", version u32, frame count u32, dimension u32,
//   frame shift in microseconds u32, then frames*dims IEEE-754 f64.
// The round trip is bit-exact for the data; the frame shift is quantized
// to whole microseconds by the format.
void write_track(const FeatureTrack& track, const std::string& path);
FeatureTrack read_track(const std::string& path);

// Plain-text dump, one frame per line. Debugging aid, not a round-trip
// format.
void write_track_text(const FeatureTrack& track, const std::string& path);

// Phone label file: UTF-8 text, one `start_s end_s label` triple per line,
// `#` starts a comment. Start times floor to frames, end times ceil.
PhoneSegmentList read_phone_labels(const std::string& path,
                                   double frame_shift_s);
void write_phone_labels(const PhoneSegmentList& phones, double frame_shift_s,
                        const std::string& path);

// Alignment export/import: text, one `src_frame tgt_frame` pair per line.
void write_alignment(const UtterancePair::AlignmentPath& path,
                     const std::string& file_path);
UtterancePair::AlignmentPath read_alignment(const std::string& file_path);

}  // namespace vc

#endif  // VCFORGE_FEATIO_HPP_
