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

#include "vcforge/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "vcforge/fft.hpp"
#include "vcforge/kernels.hpp"

namespace vc {

namespace {

std::size_t hop_samples(int sample_rate, const AnalysisConfig& config) {
  auto hop = static_cast<std::size_t>(
      std::llround(config.frame_shift_s * sample_rate));
  if (hop == 0) {
    throw ValidationError("frame shift shorter than one sample");
  }
  return hop;
}

// Periodic Hann window.
std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

}  // namespace

void AnalysisConfig::validate(int sample_rate) const {
  if (fft_size == 0 || (fft_size & (fft_size - 1)) != 0) {
    throw ValidationError("AnalysisConfig: fft_size must be a power of two");
  }
  if (envelope_order != fft_size / 2) {
    throw ValidationError("AnalysisConfig: envelope_order must equal "
                          "fft_size / 2");
  }
  if (!(frame_shift_s > 0.0)) {
    throw ValidationError("AnalysisConfig: frame shift must be positive");
  }
  if (!(0.0 < f0_floor_hz && f0_floor_hz < f0_ceil_hz &&
        f0_ceil_hz < 0.5 * sample_rate)) {
    throw ValidationError("AnalysisConfig: need 0 < f0_floor < f0_ceil < "
                          "sample_rate/2");
  }
  if (cepstral_lifter_order >= fft_size / 2) {
    throw ValidationError("AnalysisConfig: lifter order too large");
  }
}

std::size_t frame_count(std::size_t num_samples, int sample_rate,
                        const AnalysisConfig& config) {
  config.validate(sample_rate);
  if (num_samples < config.fft_size) {
    throw ValidationError("audio shorter than one analysis window");
  }
  return 1 + (num_samples - config.fft_size) / hop_samples(sample_rate, config);
}

FeatureTrack extract_envelope(const Audio& audio,
                              const AnalysisConfig& config) {
  const std::size_t n_frames =
      frame_count(audio.samples.size(), audio.sample_rate, config);
  const std::size_t win = config.fft_size;
  const std::size_t hop = hop_samples(audio.sample_rate, config);
  const std::vector<double> window = hann_window(win);
  const double mag_floor = std::exp(config.log_floor);
  const std::size_t q = config.cepstral_lifter_order;

  Matrix out(n_frames, config.envelope_order);
  std::vector<std::complex<double>> buf(win);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* x = audio.samples.data() + t * hop;
    for (std::size_t i = 0; i < win; ++i) buf[i] = {x[i] * window[i], 0.0};
    fft_inplace(buf, false);
    // Log magnitude over the full circle so the cepstrum stays real.
    for (std::size_t k = 0; k < win; ++k) {
      double mag = std::abs(buf[k]);
      buf[k] = {std::log(std::max(mag, mag_floor)), 0.0};
    }
    fft_inplace(buf, true);
    // Lifter: keep quefrencies |n| <= q.
    for (std::size_t k = q + 1; k < win - q; ++k) buf[k] = {0.0, 0.0};
    fft_inplace(buf, false);
    for (std::size_t k = 0; k < config.envelope_order; ++k) {
      out(t, k) = buf[k].real();
    }
  }
  return FeatureTrack(std::move(out), config.frame_shift_s);
}

FeatureTrack extract_f0(const Audio& audio, const AnalysisConfig& config) {
  const std::size_t n_frames =
      frame_count(audio.samples.size(), audio.sample_rate, config);
  const std::size_t hop = hop_samples(audio.sample_rate, config);
  const double sr = audio.sample_rate;
  const auto& k = kernels::active();

  // The autocorrelation window needs a few periods of the lowest trackable
  // pitch, independent of the envelope FFT size. Centered on the envelope
  // frame so the streams stay time-aligned. Longer windows track low pitch
  // more reliably but straddle more phone joins; 2.5 periods of the floor
  // is the compromise.
  const auto f0_win = std::max(
      config.fft_size,
      static_cast<std::size_t>(std::llround(2.5 * sr / config.f0_floor_hz)));

  auto lag_min = static_cast<std::size_t>(std::floor(sr / config.f0_ceil_hz));
  auto lag_max = static_cast<std::size_t>(std::ceil(sr / config.f0_floor_hz));
  lag_min = std::max<std::size_t>(lag_min, 2);
  lag_max = std::min(lag_max, f0_win / 2);
  if (lag_min + 1 >= lag_max) {
    throw ValidationError("extract_f0: F0 search range collapses; window "
                          "too short for f0_floor");
  }

  Matrix out(n_frames, 2);
  std::vector<double> r(lag_max + 2, 0.0);
  std::vector<double> frame(f0_win);
  for (std::size_t t = 0; t < n_frames; ++t) {
    // Window centered on the envelope frame, clamped at the signal edges.
    const long center =
        static_cast<long>(t * hop) + static_cast<long>(config.fft_size) / 2;
    long begin = center - static_cast<long>(f0_win) / 2;
    begin = std::clamp<long>(
        begin, 0,
        std::max<long>(0, static_cast<long>(audio.samples.size()) -
                              static_cast<long>(f0_win)));
    const std::size_t win =
        std::min(f0_win, audio.samples.size() - static_cast<std::size_t>(begin));
    const double* raw = audio.samples.data() + begin;
    // Remove the frame mean; a DC component inflates correlation at every
    // lag.
    double mean = k.sum(raw, win) / static_cast<double>(win);
    for (std::size_t i = 0; i < win; ++i) frame[i] = raw[i] - mean;
    double energy = k.dot(frame.data(), frame.data(), win);
    double rms = std::sqrt(energy / static_cast<double>(win));
    if (rms < config.silence_rms || win <= 2 * lag_max) {
      out(t, 0) = 0.0;
      out(t, 1) = 0.0;
      continue;
    }
    // Center clipping strips formant ringing, whose periodicity otherwise
    // outweighs the pitch peak in low-energy frames.
    double peak_abs = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
      peak_abs = std::max(peak_abs, std::fabs(frame[i]));
    }
    const double clip = 0.5 * peak_abs;
    for (std::size_t i = 0; i < win; ++i) {
      double v = frame[i];
      frame[i] = v > clip ? v - clip : (v < -clip ? v + clip : 0.0);
    }
    const double* x = frame.data();
    // Normalized autocorrelation r(tau) = <x0, xtau> / sqrt(|x0|^2 |xtau|^2)
    // over the overlapping windows.
    double best_r = 0.0;
    std::size_t best_lag = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      std::size_t span = win - lag;
      double num = k.dot(x, x + lag, span);
      double e0 = k.dot(x, x, span);
      double e1 = k.dot(x + lag, x + lag, span);
      double denom = std::sqrt(e0 * e1);
      double value = denom > 0.0 ? num / denom : 0.0;
      r[lag] = value;
      if (value > best_r) {
        best_r = value;
        best_lag = lag;
      }
    }
    if (best_lag == 0 || best_r < config.voicing_threshold ||
        best_lag <= lag_min + 1 || best_lag >= lag_max - 1) {
      // Peaks pinned to the search boundary are window artifacts (onsets,
      // straddled phone joins), not pitch.
      out(t, 0) = 0.0;
      out(t, 1) = 0.0;
      continue;
    }
    // Octave check: a perfectly periodic signal peaks at every multiple of
    // the true lag, and argmax can land on a multiple. Prefer the smallest
    // sub-lag whose correlation is nearly as strong.
    std::size_t lag = best_lag;
    for (std::size_t div = 4; div >= 2; --div) {
      std::size_t sub = (best_lag + div / 2) / div;
      if (sub >= lag_min && sub <= lag_max && r[sub] >= 0.9 * best_r) {
        lag = sub;
        break;
      }
    }
    // Parabolic interpolation around the integer peak.
    double refined = static_cast<double>(lag);
    if (lag > lag_min && lag < lag_max) {
      double a = r[lag - 1], b = r[lag], c = r[lag + 1];
      double denom = a - 2.0 * b + c;
      if (std::fabs(denom) > 1e-12) {
        double delta = 0.5 * (a - c) / denom;
        if (std::fabs(delta) <= 1.0) refined += delta;
      }
    }
    double f0 = sr / refined;
    f0 = std::clamp(f0, config.f0_floor_hz, config.f0_ceil_hz);
    out(t, 0) = f0;
    out(t, 1) = 1.0;
  }

  // Isolated 1-2 frame voiced shards are tracker noise, not pitch; unvoice
  // them before smoothing.
  {
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t t = 0; t <= n_frames; ++t) {
      bool voiced = t < n_frames && out(t, 1) > 0.5;
      if (voiced && !in_run) {
        run_start = t;
        in_run = true;
      } else if (!voiced && in_run) {
        if (t - run_start < 3) {
          for (std::size_t w = run_start; w < t; ++w) {
            out(w, 0) = 0.0;
            out(w, 1) = 0.0;
          }
        }
        in_run = false;
      }
    }
  }

  // Median filter inside voiced runs; isolated octave spikes at run
  // boundaries otherwise survive the peak picker.
  if (config.f0_median_frames > 1) {
    const long half = static_cast<long>(config.f0_median_frames) / 2;
    Matrix smoothed = out;
    std::vector<double> window;
    for (long t = 0; t < static_cast<long>(n_frames); ++t) {
      if (out(t, 1) < 0.5) continue;
      window.clear();
      for (long w = t - half; w <= t + half; ++w) {
        if (w < 0 || w >= static_cast<long>(n_frames)) continue;
        if (out(w, 1) > 0.5) window.push_back(out(w, 0));
      }
      std::sort(window.begin(), window.end());
      smoothed(t, 0) = window[window.size() / 2];
    }
    out = std::move(smoothed);
  }
  return FeatureTrack(std::move(out), config.frame_shift_s,
                      {"f0", "vuv"});
}

FeatureTrack extract_intensity(const Audio& audio,
                               const AnalysisConfig& config) {
  const std::size_t n_frames =
      frame_count(audio.samples.size(), audio.sample_rate, config);
  const std::size_t win = config.fft_size;
  const std::size_t hop = hop_samples(audio.sample_rate, config);
  const std::vector<double> window = hann_window(win);
  const auto& k = kernels::active();
  const double window_energy = k.dot(window.data(), window.data(), win);
  const double energy_floor = std::exp(2.0 * config.log_floor);

  Matrix out(n_frames, 1);
  std::vector<double> frame(win);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* x = audio.samples.data() + t * hop;
    for (std::size_t i = 0; i < win; ++i) frame[i] = x[i] * window[i];
    // Energy normalized by the window's own energy; a unit-amplitude sine
    // then measures log(1/sqrt(2)) independent of the window shape.
    double e = k.dot(frame.data(), frame.data(), win) / window_energy;
    out(t, 0) = 0.5 * std::log(std::max(e, energy_floor));
  }
  return FeatureTrack(std::move(out), config.frame_shift_s, {"log_rms"});
}

FeatureTrack append_deltas(const FeatureTrack& track) {
  const std::size_t n = track.frames();
  const std::size_t d = track.dim();
  if (n == 0) {
    throw ValidationError("append_deltas: track has no frames");
  }
  Matrix out(n, 3 * d);
  auto frame_at = [&](std::size_t t) {
    // Edge replication.
    return track.frame(t >= n ? n - 1 : t);
  };
  for (std::size_t t = 0; t < n; ++t) {
    const double* cur = track.frame(t);
    const double* prev = t == 0 ? track.frame(0) : track.frame(t - 1);
    const double* next = frame_at(t + 1);
    double* row = out.row(t);
    for (std::size_t i = 0; i < d; ++i) {
      row[i] = cur[i];
      row[d + i] = 0.5 * (next[i] - prev[i]);
      row[2 * d + i] = next[i] - 2.0 * cur[i] + prev[i];
    }
  }
  return FeatureTrack(std::move(out), track.frame_shift_s());
}

Audio synthesize(const FeatureTrack& envelope, const FeatureTrack& f0vuv,
                 int sample_rate, const AnalysisConfig& config,
                 std::uint64_t noise_seed) {
  config.validate(sample_rate);
  if (envelope.frames() == 0) {
    throw ValidationError("synthesize: empty envelope track");
  }
  if (envelope.frames() != f0vuv.frames()) {
    throw ValidationError("synthesize: envelope and f0 frame counts differ");
  }
  if (envelope.dim() != config.envelope_order) {
    throw ValidationError("synthesize: envelope dimension != envelope_order");
  }
  if (f0vuv.dim() < 2) {
    throw ValidationError("synthesize: f0 track needs f0 and vuv dims");
  }

  const std::size_t n_frames = envelope.frames();
  const std::size_t win = config.fft_size;
  const std::size_t hop = hop_samples(sample_rate, config);
  const std::size_t total = (n_frames - 1) * hop + win;
  const std::vector<double> window = hann_window(win);

  // Excitation: unit pulses at the running F0 phase in voiced regions,
  // low-level white noise elsewhere.
  DetRng rng(noise_seed ^ 0x76636f7267656e6cull);
  std::vector<double> excitation(total, 0.0);
  double phase = 1.0;  // emit a pulse at the first voiced sample
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t t = std::min(n / hop, n_frames - 1);
    bool voiced = f0vuv.value(t, 1) > 0.5;
    if (voiced) {
      phase += f0vuv.value(t, 0) / sample_rate;
      if (phase >= 1.0) {
        phase -= 1.0;
        excitation[n] = 1.0;
      }
    } else {
      excitation[n] = 0.05 * rng.gaussian();
      phase = 1.0;
    }
  }

  std::vector<double> out(total, 0.0);
  std::vector<double> norm(total, 0.0);
  std::vector<std::complex<double>> buf(win);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* seg = excitation.data() + t * hop;
    for (std::size_t i = 0; i < win; ++i) buf[i] = {seg[i] * window[i], 0.0};
    fft_inplace(buf, false);
    // Zero-phase magnitude filter from the log envelope, mirrored to keep
    // the spectrum conjugate-symmetric.
    const double* env = envelope.frame(t);
    for (std::size_t k = 0; k <= win / 2; ++k) {
      std::size_t bin = std::min(k, config.envelope_order - 1);
      double h = std::exp(env[bin]);
      buf[k] *= h;
      if (k > 0 && k < win / 2) buf[win - k] *= h;
    }
    fft_inplace(buf, true);
    double* o = out.data() + t * hop;
    double* w = norm.data() + t * hop;
    for (std::size_t i = 0; i < win; ++i) {
      o[i] += buf[i].real() * window[i];
      w[i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (norm[i] > 1e-8) out[i] /= norm[i];
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0) {
    const double gain = 0.95 / peak;
    kernels::active().scale(gain, out.data(), out.size());
  }
  return Audio{std::move(out), sample_rate};
}

Matrix dct_reduce_rows(const Matrix& rows, std::size_t order) {
  const std::size_t n = rows.cols();
  if (order == 0 || order > n) {
    throw ValidationError("dct_reduce: order out of range");
  }
  // Orthonormal DCT-II basis, order x n.
  Matrix basis(order, n);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < order; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double angle = M_PI * (static_cast<double>(i) + 0.5) *
                     static_cast<double>(k) / static_cast<double>(n);
      basis(k, i) = (k == 0 ? scale0 : scale) * std::cos(angle);
    }
  }
  const auto& kr = kernels::active();
  Matrix out(rows.rows(), order);
  for (std::size_t t = 0; t < rows.rows(); ++t) {
    kr.matvec(basis.data(), order, n, rows.row(t), nullptr, out.row(t));
  }
  return out;
}

Matrix dct_expand_rows(const Matrix& rows, std::size_t envelope_order) {
  const std::size_t order = rows.cols();
  const std::size_t n = envelope_order;
  if (order > n) {
    throw ValidationError("dct_expand: more coefficients than bins");
  }
  Matrix basis_t(n, order);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < order; ++k) {
      double angle = M_PI * (static_cast<double>(i) + 0.5) *
                     static_cast<double>(k) / static_cast<double>(n);
      basis_t(i, k) = (k == 0 ? scale0 : scale) * std::cos(angle);
    }
  }
  const auto& kr = kernels::active();
  Matrix out(rows.rows(), n);
  for (std::size_t t = 0; t < rows.rows(); ++t) {
    kr.matvec(basis_t.data(), n, order, rows.row(t), nullptr, out.row(t));
  }
  return out;
}

FeatureTrack dct_reduce(const FeatureTrack& envelope, std::size_t order) {
  return FeatureTrack(dct_reduce_rows(envelope.data(), order),
                      envelope.frame_shift_s());
}

FeatureTrack dct_expand(const FeatureTrack& reduced,
                        std::size_t envelope_order) {
  return FeatureTrack(dct_expand_rows(reduced.data(), envelope_order),
                      reduced.frame_shift_s());
}

}  // namespace vc
