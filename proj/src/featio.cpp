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

#include "vcforge/featio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vcforge/binary_io.hpp"

namespace vc {

namespace {
constexpr char kTrackMagic[4] = {'V', 'C', 'F', 'T'};
constexpr std::uint32_t kTrackVersion = 1;
}  // namespace

void write_track(const FeatureTrack& track, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  double shift_us = track.frame_shift_s() * 1e6;
  auto shift_us_u32 = static_cast<std::uint32_t>(std::llround(shift_us));
  if (shift_us_u32 == 0) {
    throw FormatError("frame shift below 1 microsecond not representable");
  }
  bio::put_magic(os, kTrackMagic);
  bio::put_u32(os, kTrackVersion);
  bio::put_u32(os, static_cast<std::uint32_t>(track.frames()));
  bio::put_u32(os, static_cast<std::uint32_t>(track.dim()));
  bio::put_u32(os, shift_us_u32);
  const Matrix& m = track.data();
  for (std::size_t i = 0; i < m.size(); ++i) bio::put_f64(os, m.data()[i]);
  if (!os) throw IoError("write failed: " + path);
}

FeatureTrack read_track(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  bio::check_magic(is, kTrackMagic, "VCFT feature");
  std::uint32_t version = bio::get_u32(is, "version");
  if (version != kTrackVersion) {
    throw FormatError("unsupported VCFT version " + std::to_string(version));
  }
  std::uint32_t frames = bio::get_u32(is, "frame count");
  std::uint32_t dim = bio::get_u32(is, "dimension");
  std::uint32_t shift_us = bio::get_u32(is, "frame shift");
  if (dim == 0) throw FormatError("VCFT dimension is zero");
  if (shift_us == 0) throw FormatError("VCFT frame shift is zero");
  Matrix m(frames, dim);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = bio::get_f64(is, "feature data");
  }
  // A well-formed file ends exactly after the declared frames.
  char extra;
  if (is.read(&extra, 1)) {
    throw FormatError("VCFT file has trailing bytes beyond declared frames");
  }
  return FeatureTrack(std::move(m), static_cast<double>(shift_us) * 1e-6);
}

void write_track_text(const FeatureTrack& track, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "# frames " << track.frames() << " dim " << track.dim()
     << " frame_shift_s " << track.frame_shift_s() << "\n";
  os.precision(17);
  for (std::size_t t = 0; t < track.frames(); ++t) {
    const double* row = track.frame(t);
    for (std::size_t d = 0; d < track.dim(); ++d) {
      if (d > 0) os << ' ';
      os << row[d];
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

PhoneSegmentList read_phone_labels(const std::string& path,
                                   double frame_shift_s) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::vector<PhoneSegment> segments;
  std::string line;
  std::size_t line_no = 0;
  double prev_end_s = 0.0;
  std::size_t prev_end_frame = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double start_s, end_s;
    std::string label;
    if (!(ss >> start_s)) continue;  // blank line
    if (!(ss >> end_s >> label)) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": expected `start_s end_s label`");
    }
    if (start_s < 0.0 || end_s < start_s) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": segment times unordered");
    }
    if (!segments.empty() && start_s < prev_end_s - 1e-9) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": segment overlaps its predecessor");
    }
    PhoneSegment seg;
    seg.label = label;
    seg.start_frame =
        static_cast<std::size_t>(seconds_to_frame_floor(start_s,
                                                        frame_shift_s));
    seg.end_frame =
        static_cast<std::size_t>(seconds_to_frame_ceil(end_s, frame_shift_s));
    // Touching boundaries off the frame grid floor/ceil onto the same
    // frame; give that frame to the earlier segment.
    if (seg.start_frame < prev_end_frame) seg.start_frame = prev_end_frame;
    if (seg.end_frame <= seg.start_frame) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": segment collapses to zero frames");
    }
    prev_end_s = end_s;
    prev_end_frame = seg.end_frame;
    segments.push_back(std::move(seg));
  }
  // PhoneSegmentList construction re-checks ordering across segments.
  return PhoneSegmentList(std::move(segments));
}

void write_phone_labels(const PhoneSegmentList& phones, double frame_shift_s,
                        const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(9);
  for (const PhoneSegment& s : phones.entries()) {
    os << frame_to_seconds(static_cast<long>(s.start_frame), frame_shift_s)
       << ' '
       << frame_to_seconds(static_cast<long>(s.end_frame), frame_shift_s)
       << ' ' << s.label << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

void write_alignment(const UtterancePair::AlignmentPath& path,
                     const std::string& file_path) {
  std::ofstream os(file_path);
  if (!os) throw IoError("cannot open for writing: " + file_path);
  for (const auto& [s, t] : path) os << s << ' ' << t << '\n';
  if (!os) throw IoError("write failed: " + file_path);
}

UtterancePair::AlignmentPath read_alignment(const std::string& file_path) {
  std::ifstream is(file_path);
  if (!is) throw IoError("cannot open for reading: " + file_path);
  UtterancePair::AlignmentPath path;
  std::size_t s, t;
  while (is >> s >> t) path.emplace_back(s, t);
  return path;
}

}  // namespace vc
