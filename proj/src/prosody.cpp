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

#include "vcforge/prosody.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

namespace vc {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Voiced runs from the vuv column; single-frame runs are dropped because
// interpolation to L is undefined for them.
std::vector<std::pair<std::size_t, std::size_t>> voiced_runs(
    const FeatureTrack& f0vuv) {
  if (f0vuv.dim() < 2) {
    throw ValidationError("expected an f0+vuv track with >= 2 dims");
  }
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t start = 0;
  bool in_run = false;
  for (std::size_t t = 0; t < f0vuv.frames(); ++t) {
    bool voiced = f0vuv.value(t, 1) > 0.5;
    if (voiced && !in_run) {
      start = t;
      in_run = true;
    } else if (!voiced && in_run) {
      if (t - start >= 2) runs.emplace_back(start, t);
      in_run = false;
    }
  }
  if (in_run && f0vuv.frames() - start >= 2) {
    runs.emplace_back(start, f0vuv.frames());
  }
  return runs;
}

std::vector<VoicedSegment> segments_from_runs(
    const std::vector<std::pair<std::size_t, std::size_t>>& runs,
    const FeatureTrack& value_track, std::size_t value_col, std::size_t L) {
  if (L < 2) throw ValidationError("segment length L must be >= 2");
  std::vector<VoicedSegment> segments;
  for (const auto& [start, end] : runs) {
    VoicedSegment seg;
    seg.start_frame = start;
    seg.end_frame = end;
    seg.original_values.reserve(end - start);
    for (std::size_t t = start; t < end; ++t) {
      seg.original_values.push_back(value_track.value(t, value_col));
    }
    seg.normalized = resample_linear(seg.original_values, L);
    seg.segment_mean = mean_of(seg.original_values);
    segments.push_back(std::move(seg));
  }
  return segments;
}

}  // namespace

void MeanVarStats::validate() const {
  if (!(std_src > 0.0) || !(std_tgt > 0.0)) {
    throw ValidationError("MeanVarStats: standard deviations must be "
                          "positive");
  }
}

std::vector<double> resample_linear(const std::vector<double>& values,
                                    std::size_t new_len) {
  if (values.empty()) {
    throw ValidationError("resample_linear: empty input");
  }
  if (new_len == 0) {
    throw ValidationError("resample_linear: zero output length");
  }
  const std::size_t n = values.size();
  std::vector<double> out(new_len);
  if (n == 1 || new_len == 1) {
    std::fill(out.begin(), out.end(), values[0]);
    return out;
  }
  if (new_len == n) return values;  // identity, bit-exact
  const double step =
      static_cast<double>(n - 1) / static_cast<double>(new_len - 1);
  for (std::size_t i = 0; i < new_len; ++i) {
    if (i == new_len - 1) {
      out[i] = values[n - 1];  // exact endpoint
      continue;
    }
    double pos = step * static_cast<double>(i);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= n - 1) lo = n - 2;
    double frac = pos - static_cast<double>(lo);
    out[i] = values[lo] + frac * (values[lo + 1] - values[lo]);
  }
  return out;
}

std::vector<VoicedSegment> extract_voiced_segments(const FeatureTrack& f0vuv,
                                                   std::size_t L) {
  return segments_from_runs(voiced_runs(f0vuv), f0vuv, 0, L);
}

std::vector<VoicedSegment> extract_value_segments(const FeatureTrack& values,
                                                  const FeatureTrack& f0vuv,
                                                  std::size_t L) {
  if (values.frames() != f0vuv.frames()) {
    throw ValidationError("extract_value_segments: frame counts differ");
  }
  return segments_from_runs(voiced_runs(f0vuv), values, 0, L);
}

F0DiffFeature f0_to_diff(const VoicedSegment& segment) {
  const auto& t = segment.normalized;
  F0DiffFeature diff;
  diff.values.resize(t.size());
  diff.values[0] = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    diff.values[i] = t[i] - t[i - 1];
  }
  return diff;
}

std::vector<double> reconstruct_f0(const F0DiffFeature& diff,
                                   double predicted_mean,
                                   std::size_t original_length) {
  if (diff.values.empty()) {
    throw ValidationError("reconstruct_f0: empty diff feature");
  }
  if (original_length < 2) {
    throw ValidationError("reconstruct_f0: original length must be >= 2");
  }
  const std::size_t L = diff.values.size();
  // Step 1: cumulative sum with the first value pinned at 0.
  std::vector<double> traj(L);
  traj[0] = 0.0;
  for (std::size_t i = 1; i < L; ++i) traj[i] = traj[i - 1] + diff.values[i];
  // Step 2: mean adjustment to the predicted segmental level.
  double offset = predicted_mean - mean_of(traj);
  for (double& v : traj) v += offset;
  // Step 3: back to the original length.
  return resample_linear(traj, original_length);
}

double meanvar_transform(double f_s, const MeanVarStats& stats) {
  if (!(f_s > 0.0)) return 0.0;  // unvoiced passes through
  return stats.mean_tgt +
         (stats.std_tgt / stats.std_src) * (f_s - stats.mean_src);
}

double predict_segment_mean(double source_segment_mean,
                            const MeanVarStats& stats) {
  return meanvar_transform(source_segment_mean, stats);
}

MeanVarStats compute_meanvar_stats(
    const std::vector<double>& source_voiced_f0,
    const std::vector<double>& target_voiced_f0) {
  if (source_voiced_f0.size() < 2 || target_voiced_f0.size() < 2) {
    throw ValidationError("compute_meanvar_stats: need >= 2 voiced frames "
                          "per speaker");
  }
  auto stats_of = [](const std::vector<double>& v) {
    double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::pair<double, double>(
        m, std::sqrt(acc / static_cast<double>(v.size())));
  };
  auto [ms, ss] = stats_of(source_voiced_f0);
  auto [mt, st] = stats_of(target_voiced_f0);
  MeanVarStats stats{ms, ss, mt, st};
  stats.validate();
  return stats;
}

void save_meanvar(const MeanVarStats& stats, const std::string& path) {
  stats.validate();
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(17);
  os << stats.mean_src << ' ' << stats.std_src << ' ' << stats.mean_tgt << ' '
     << stats.std_tgt << '\n';
  if (!os) throw IoError("write failed: " + path);
}

MeanVarStats load_meanvar(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  MeanVarStats stats;
  if (!(is >> stats.mean_src >> stats.std_src >> stats.mean_tgt >>
        stats.std_tgt)) {
    throw FormatError(path + ": expected exactly four scalars");
  }
  double extra;
  if (is >> extra) {
    throw FormatError(path + ": trailing values after the four scalars");
  }
  stats.validate();
  return stats;
}

namespace {

// Plurality owner of the target frames a source span aligns to; nullopt
// when no aligned frame falls inside any target segment.
std::optional<std::size_t> majority_target_segment(
    const UtterancePair::AlignmentPath& path, std::size_t src_start,
    std::size_t src_end, const std::vector<VoicedSegment>& target_segments) {
  std::vector<std::size_t> votes(target_segments.size(), 0);
  for (const auto& [i, j] : path) {
    if (i < src_start || i >= src_end) continue;
    for (std::size_t s = 0; s < target_segments.size(); ++s) {
      if (j >= target_segments[s].start_frame &&
          j < target_segments[s].end_frame) {
        ++votes[s];
        break;
      }
    }
  }
  std::size_t best = 0, best_votes = 0;
  for (std::size_t s = 0; s < votes.size(); ++s) {
    if (votes[s] > best_votes) {
      best_votes = votes[s];
      best = s;
    }
  }
  if (best_votes == 0) return std::nullopt;
  return best;
}

SegmentTrainingSet build_segment_training_set(
    const std::vector<ProsodyPair>& pairs, std::size_t L, bool diff_features,
    bool use_value_tracks) {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  std::size_t dropped = 0;

  for (const ProsodyPair& p : pairs) {
    if (p.source_f0vuv == nullptr || p.target_f0vuv == nullptr ||
        p.alignment == nullptr) {
      throw ValidationError("build_segment_training_set: pair missing "
                            "tracks or alignment");
    }
    std::vector<VoicedSegment> src_segs, tgt_segs;
    if (use_value_tracks) {
      if (p.source_values == nullptr || p.target_values == nullptr) {
        throw ValidationError("build_segment_training_set: value tracks "
                              "required");
      }
      src_segs = extract_value_segments(*p.source_values, *p.source_f0vuv, L);
      tgt_segs = extract_value_segments(*p.target_values, *p.target_f0vuv, L);
    } else {
      src_segs = extract_voiced_segments(*p.source_f0vuv, L);
      tgt_segs = extract_voiced_segments(*p.target_f0vuv, L);
    }
    for (const VoicedSegment& s : src_segs) {
      auto owner = majority_target_segment(*p.alignment, s.start_frame,
                                           s.end_frame, tgt_segs);
      if (!owner) {
        ++dropped;
        continue;
      }
      const VoicedSegment& t = tgt_segs[*owner];
      if (diff_features) {
        inputs.push_back(f0_to_diff(s).values);
        targets.push_back(f0_to_diff(t).values);
      } else {
        inputs.push_back(s.normalized);
        targets.push_back(t.normalized);
      }
    }
  }
  if (inputs.empty()) {
    throw TrainingError("no matched voiced segments in the training pairs");
  }
  SegmentTrainingSet set;
  set.inputs = Matrix(inputs.size(), L);
  set.targets = Matrix(targets.size(), L);
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    set.inputs.set_row(r, inputs[r]);
    set.targets.set_row(r, targets[r]);
  }
  set.matched = inputs.size();
  set.dropped = dropped;
  return set;
}

}  // namespace

SegmentTrainingSet build_f0_training_set(const std::vector<ProsodyPair>& pairs,
                                         std::size_t L) {
  return build_segment_training_set(pairs, L, /*diff_features=*/true,
                                    /*use_value_tracks=*/false);
}

SegmentTrainingSet build_intensity_training_set(
    const std::vector<ProsodyPair>& pairs, std::size_t L) {
  return build_segment_training_set(pairs, L, /*diff_features=*/false,
                                    /*use_value_tracks=*/true);
}

std::vector<DurationSample> build_duration_samples(
    const FeatureTrack& source_envelope, const PhoneSegmentList& source_phones,
    const PhoneSegmentList& target_phones, std::size_t N) {
  if (N < 1) throw ValidationError("build_duration_samples: N must be >= 1");
  if (source_phones.size() != target_phones.size()) {
    throw ValidationError("build_duration_samples: phone lists not parallel");
  }
  source_phones.validate_against(source_envelope.frames());
  const std::size_t env_dim = source_envelope.dim();
  std::vector<DurationSample> samples;
  for (std::size_t p = 0; p < source_phones.size(); ++p) {
    const std::size_t len = source_phones[p].end_frame -
                            source_phones[p].start_frame;
    const std::size_t tgt_len =
        target_phones[p].end_frame - target_phones[p].start_frame;
    if (len < 2) continue;
    DurationSample sample;
    sample.input.reserve(N * env_dim);
    for (std::size_t i = 0; i < N; ++i) {
      std::size_t offset =
          N == 1 ? 0
                 : static_cast<std::size_t>(std::llround(
                       static_cast<double>(i) * static_cast<double>(len - 1) /
                       static_cast<double>(N - 1)));
      const double* frame =
          source_envelope.frame(source_phones[p].start_frame + offset);
      sample.input.insert(sample.input.end(), frame, frame + env_dim);
    }
    sample.ratio = static_cast<double>(len) / static_cast<double>(tgt_len);
    samples.push_back(std::move(sample));
  }
  return samples;
}

double implied_log_intensity(const double* envelope, std::size_t dim) {
  // log RMS of the linear-magnitude envelope, computed via log-sum-exp so
  // large log values cannot overflow.
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim; ++i) m = std::max(m, envelope[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) s += std::exp(2.0 * (envelope[i] - m));
  return m + 0.5 * (std::log(s) - std::log(static_cast<double>(dim)));
}

FeatureTrack apply_intensity(const FeatureTrack& converted_envelope,
                             const std::vector<VoicedSegment>& predicted) {
  Matrix out = converted_envelope.data();
  const std::size_t dim = converted_envelope.dim();
  for (const VoicedSegment& seg : predicted) {
    if (seg.end_frame > converted_envelope.frames() ||
        seg.start_frame >= seg.end_frame) {
      throw ValidationError("apply_intensity: segment span outside track");
    }
    if (seg.original_values.size() != seg.length()) {
      throw ValidationError("apply_intensity: prediction length != span "
                            "length");
    }
    for (std::size_t t = seg.start_frame; t < seg.end_frame; ++t) {
      double current = implied_log_intensity(out.row(t), dim);
      double offset = seg.original_values[t - seg.start_frame] - current;
      for (std::size_t i = 0; i < dim; ++i) out(t, i) += offset;
    }
  }
  return FeatureTrack(std::move(out), converted_envelope.frame_shift_s());
}

RetimedTracks apply_duration(const std::vector<const FeatureTrack*>& tracks,
                             const std::vector<RetimeMode>& modes,
                             const PhoneSegmentList& phones,
                             const std::vector<double>& ratios) {
  if (tracks.empty()) {
    throw ValidationError("apply_duration: no tracks");
  }
  if (tracks.size() != modes.size()) {
    throw ValidationError("apply_duration: modes length != tracks length");
  }
  if (ratios.size() != phones.size()) {
    throw ValidationError("apply_duration: ratios length != phone count");
  }
  const std::size_t frames = tracks[0]->frames();
  for (const FeatureTrack* t : tracks) {
    if (t->frames() != frames) {
      throw ValidationError("apply_duration: track frame counts differ");
    }
  }
  phones.validate_against(frames);
  for (double r : ratios) {
    if (!(r > 0.0)) throw ValidationError("apply_duration: ratio <= 0");
  }

  // Build the per-region output spans: gaps keep their length, phone spans
  // resample to round(len / ratio).
  struct Region {
    std::size_t start, end, new_len;
    bool is_phone;
    std::size_t phone_index;
  };
  std::vector<Region> regions;
  std::size_t cursor = 0;
  for (std::size_t p = 0; p < phones.size(); ++p) {
    if (phones[p].start_frame > cursor) {
      regions.push_back({cursor, phones[p].start_frame,
                         phones[p].start_frame - cursor, false, 0});
    }
    std::size_t len = phones[p].end_frame - phones[p].start_frame;
    double ratio = std::clamp(ratios[p], 0.5, 2.0);
    auto new_len = static_cast<std::size_t>(std::max<long long>(
        1, std::llround(static_cast<double>(len) / ratio)));
    regions.push_back({phones[p].start_frame, phones[p].end_frame, new_len,
                       true, p});
    cursor = phones[p].end_frame;
  }
  if (cursor < frames) {
    regions.push_back({cursor, frames, frames - cursor, false, 0});
  }

  std::size_t total = 0;
  for (const Region& r : regions) total += r.new_len;

  RetimedTracks result;
  std::vector<PhoneSegment> new_phones;
  std::vector<Matrix> outs;
  for (const FeatureTrack* t : tracks) outs.emplace_back(total, t->dim());

  std::size_t out_cursor = 0;
  for (const Region& region : regions) {
    const std::size_t len = region.end - region.start;
    if (region.is_phone) {
      new_phones.push_back({phones[region.phone_index].label, out_cursor,
                            out_cursor + region.new_len});
    }
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      const FeatureTrack& in = *tracks[k];
      Matrix& out = outs[k];
      for (std::size_t j = 0; j < region.new_len; ++j) {
        double pos =
            region.new_len == 1
                ? 0.0
                : static_cast<double>(j) * static_cast<double>(len - 1) /
                      static_cast<double>(region.new_len - 1);
        double* dst = out.row(out_cursor + j);
        if (region.new_len == len) {
          // Identity mapping stays bit-exact.
          const double* src = in.frame(region.start + j);
          std::copy(src, src + in.dim(), dst);
        } else if (modes[k] == RetimeMode::kNearest) {
          auto idx = static_cast<std::size_t>(std::llround(pos));
          const double* src = in.frame(region.start + std::min(idx, len - 1));
          std::copy(src, src + in.dim(), dst);
        } else {
          auto lo = static_cast<std::size_t>(pos);
          if (lo >= len - 1) lo = len >= 2 ? len - 2 : 0;
          double frac = pos - static_cast<double>(lo);
          const double* a = in.frame(region.start + lo);
          const double* b = in.frame(region.start + std::min(lo + 1, len - 1));
          for (std::size_t i = 0; i < in.dim(); ++i) {
            dst[i] = a[i] + frac * (b[i] - a[i]);
          }
        }
      }
    }
    out_cursor += region.new_len;
  }

  for (std::size_t k = 0; k < tracks.size(); ++k) {
    result.tracks.emplace_back(std::move(outs[k]),
                               tracks[k]->frame_shift_s());
  }
  result.phones = PhoneSegmentList(std::move(new_phones));
  return result;
}

void write_segments_text(const std::vector<VoicedSegment>& segments,
                         const std::string& utt_id, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(10);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const VoicedSegment& s = segments[i];
    os << utt_id << ' ' << i << ' ' << s.start_frame << ' ' << s.end_frame
       << ' ' << s.segment_mean;
    for (double v : s.normalized) os << ' ' << v;
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace vc
