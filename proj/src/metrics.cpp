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

#include "vcforge/metrics.hpp"

#include <cmath>
#include <fstream>

#include "vcforge/kernels.hpp"

namespace vc {

namespace {

// Squared log-spectral difference summed over bins; converts from linear
// magnitude first when asked to.
double frame_distortion(const double* a, const double* b, std::size_t dim,
                        SpectrumDomain domain, std::vector<double>& buf_a,
                        std::vector<double>& buf_b) {
  if (domain == SpectrumDomain::kLog) {
    return kernels::active().sumsq_diff(a, b, dim);
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0)) {
      throw ValidationError("lsd_ratio: non-positive linear magnitude");
    }
    buf_a[i] = std::log(a[i]);
    buf_b[i] = std::log(b[i]);
  }
  return kernels::active().sumsq_diff(buf_a.data(), buf_b.data(), dim);
}

}  // namespace

double lsd_ratio(const FeatureTrack& source, const FeatureTrack& converted,
                 const FeatureTrack& target, SpectrumDomain domain) {
  if (source.frames() != converted.frames() ||
      source.frames() != target.frames()) {
    throw ValidationError("lsd_ratio: frame counts differ");
  }
  if (source.dim() != converted.dim() || source.dim() != target.dim()) {
    throw ValidationError("lsd_ratio: dimensions differ");
  }
  const std::size_t dim = source.dim();
  std::vector<double> buf_a(dim), buf_b(dim);
  double numerator = 0.0, denominator = 0.0;
  for (std::size_t t = 0; t < source.frames(); ++t) {
    double den = frame_distortion(source.frame(t), target.frame(t), dim,
                                  domain, buf_a, buf_b);
    if (den == 0.0) continue;  // identical frames carry no distortion signal
    numerator += frame_distortion(converted.frame(t), target.frame(t), dim,
                                  domain, buf_a, buf_b);
    denominator += den;
  }
  if (denominator == 0.0) {
    throw NumericError("lsd_ratio: source and target are identical on every "
                       "frame; ratio undefined");
  }
  return 100.0 * numerator / denominator;
}

F0RmseResult f0_rmse(const FeatureTrack& converted_f0vuv,
                     const FeatureTrack& target_f0vuv) {
  if (converted_f0vuv.frames() != target_f0vuv.frames()) {
    throw ValidationError("f0_rmse: frame counts differ");
  }
  if (converted_f0vuv.dim() < 2 || target_f0vuv.dim() < 2) {
    throw ValidationError("f0_rmse: expected f0+vuv tracks");
  }
  F0RmseResult result;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < converted_f0vuv.frames(); ++t) {
    bool cv = converted_f0vuv.value(t, 1) > 0.5;
    bool tv = target_f0vuv.value(t, 1) > 0.5;
    if (cv && tv) {
      double d = converted_f0vuv.value(t, 0) - target_f0vuv.value(t, 0);
      sum_sq += d * d;
      ++result.shared_voiced_frames;
    } else if (cv != tv) {
      ++result.voicing_mismatch_frames;
    }
  }
  if (result.shared_voiced_frames == 0) {
    throw NumericError("f0_rmse: no frames voiced in both tracks");
  }
  result.rmse_hz =
      std::sqrt(sum_sq / static_cast<double>(result.shared_voiced_frames));
  return result;
}

EvalReport aggregate_report(std::vector<UtteranceEval> rows,
                            std::size_t env_bins) {
  EvalReport report;
  report.env_bins = env_bins;
  report.per_utterance = std::move(rows);
  if (report.per_utterance.empty()) return report;
  for (const UtteranceEval& row : report.per_utterance) {
    report.lsd_percent += row.lsd_percent;
    report.lsd_voiced_percent += row.lsd_voiced_percent;
    report.f0_rmse_hz += row.f0_rmse_hz;
    report.frames_evaluated += row.frames_evaluated;
  }
  double n = static_cast<double>(report.per_utterance.size());
  report.lsd_percent /= n;
  report.lsd_voiced_percent /= n;
  report.f0_rmse_hz /= n;
  return report;
}

void write_report_text(const EvalReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(4);
  os << std::fixed;
  os << "utterance        LSD%     LSD%(voiced)  F0-RMSE(Hz)  frames  "
        "vuv-mismatch\n";
  for (const UtteranceEval& row : report.per_utterance) {
    os << row.utt_id << "  " << row.lsd_percent << "  "
       << row.lsd_voiced_percent << "  " << row.f0_rmse_hz << "  "
       << row.frames_evaluated << "  " << row.voicing_mismatch_frames << "\n";
  }
  os << "mean  " << report.lsd_percent << "  " << report.lsd_voiced_percent
     << "  " << report.f0_rmse_hz << "  (bins " << report.env_bins << ", "
     << report.per_utterance.size() << " utterances)\n";
  if (!os) throw IoError("write failed: " + path);
}

void write_report_kv(const EvalReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(17);
  os << "lsd_percent=" << report.lsd_percent << "\n"
     << "lsd_voiced_percent=" << report.lsd_voiced_percent << "\n"
     << "f0_rmse_hz=" << report.f0_rmse_hz << "\n"
     << "env_bins=" << report.env_bins << "\n"
     << "frames_evaluated=" << report.frames_evaluated << "\n"
     << "utterances=" << report.per_utterance.size() << "\n";
  if (!os) throw IoError("write failed: " + path);
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(17);
  os << "utt_id,lsd_percent,lsd_voiced_percent,f0_rmse_hz,frames,"
        "vuv_mismatch\n";
  for (const UtteranceEval& row : report.per_utterance) {
    os << row.utt_id << ',' << row.lsd_percent << ','
       << row.lsd_voiced_percent << ',' << row.f0_rmse_hz << ','
       << row.frames_evaluated << ',' << row.voicing_mismatch_frames << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace vc
