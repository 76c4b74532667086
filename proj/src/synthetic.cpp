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

#include "vcforge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vcforge/common.hpp"
#include "vcforge/wav.hpp"

namespace vc {

namespace {

struct PhoneClass {
  const char* label;
  bool voiced;
  double formants[3];    // Hz; fricatives use [0] as noise center
  double bandwidths[3];  // Hz
  double intensity_gain;  // target amplitude multiplier
  double duration_scale;  // target duration = source duration * this
  std::size_t echo_delay;  // samples; fine spectral ripple carrier
};

// Small fixed inventory: five vowel-like classes and two fricative-like
// noise classes. The echo delays put a fine comb ripple on the voiced
// envelopes; its period is short enough that a 25-coefficient truncated-DCT
// view of the envelope cannot resolve it, while the full-resolution
// envelope can.
constexpr PhoneClass kInventory[] = {
    {"aa", true, {730.0, 1090.0, 2440.0}, {80.0, 90.0, 120.0}, 1.30, 1.25, 29},
    {"iy", true, {270.0, 2290.0, 3010.0}, {60.0, 100.0, 120.0}, 0.75, 0.80, 31},
    {"uw", true, {300.0, 870.0, 2240.0}, {70.0, 80.0, 110.0}, 1.10, 1.10, 34},
    {"eh", true, {530.0, 1840.0, 2480.0}, {70.0, 90.0, 120.0}, 0.85, 0.90, 37},
    {"ao", true, {570.0, 840.0, 2410.0}, {80.0, 80.0, 110.0}, 1.25, 1.20, 41},
    {"ss", false, {5000.0, 0.0, 0.0}, {1400.0, 0.0, 0.0}, 1.00, 0.85, 0},
    {"sh", false, {3000.0, 0.0, 0.0}, {1100.0, 0.0, 0.0}, 1.00, 1.15, 0},
};
constexpr std::size_t kInventorySize = sizeof(kInventory) / sizeof(PhoneClass);

struct PhonePlan {
  std::size_t class_id = 0;
  double duration_s = 0.0;
  double amplitude = 0.0;
  // Sign of the ripple (echo) on this phone instance. The target speaker's
  // gain for the phone depends on it, so the conversion map hinges on
  // envelope detail below the truncated-DCT resolution.
  bool ripple_positive = false;
  // F0 shape of the voiced run the phone belongs to (run-level, shared).
  std::size_t run_id = 0;
};

struct RunPlan {
  double level_hz = 0.0;       // run F0 level
  double excursion_hz = 0.0;   // sine excursion amplitude
  double phase = 0.0;
  double slope_hz = 0.0;       // linear drift across the run
};

struct UtterancePlan {
  double lead_silence_s = 0.0;
  double trail_silence_s = 0.0;
  std::vector<PhonePlan> phones;
  std::vector<RunPlan> runs;
};

// Two-pole resonator with unit-ish passband gain, state carried across
// phone boundaries so filter switches stay click-free.
class Resonator {
 public:
  void set(double freq_hz, double bandwidth_hz, int sample_rate) {
    double r = std::exp(-M_PI * bandwidth_hz / sample_rate);
    double theta = 2.0 * M_PI * freq_hz / sample_rate;
    a1_ = 2.0 * r * std::cos(theta);
    a2_ = -r * r;
    gain_ = (1.0 - r) * std::sqrt(1.0 + r * r - 2.0 * r * std::cos(2 * theta));
  }

  double process(double x) {
    double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0.0, a2_ = 0.0, gain_ = 1.0;
  double y1_ = 0.0, y2_ = 0.0;
};

UtterancePlan plan_utterance(DetRng& rng) {
  UtterancePlan plan;
  plan.lead_silence_s = rng.uniform(0.08, 0.12);
  plan.trail_silence_s = rng.uniform(0.08, 0.12);

  // 5-7 phones with at least three vowels and at least two interior
  // fricatives, so every utterance carries several voiced runs.
  std::size_t count = 5 + static_cast<std::size_t>(rng.below(3));
  std::vector<std::size_t> classes;
  for (int attempt = 0; attempt < 128; ++attempt) {
    classes.clear();
    std::size_t vowels = 0, interior_fricatives = 0;
    for (std::size_t i = 0; i < count; ++i) {
      auto c = static_cast<std::size_t>(rng.below(kInventorySize));
      classes.push_back(c);
      if (kInventory[c].voiced) {
        ++vowels;
      } else if (i > 0 && i + 1 < count) {
        ++interior_fricatives;
      }
    }
    if (vowels >= 3 && interior_fricatives >= 2) break;
  }

  std::size_t run_id = 0;
  bool in_run = false;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const PhoneClass& pc = kInventory[classes[i]];
    PhonePlan p;
    p.class_id = classes[i];
    p.duration_s = pc.voiced ? rng.uniform(0.08, 0.16) : rng.uniform(0.06, 0.11);
    p.amplitude = pc.voiced ? rng.uniform(0.6, 1.0) : rng.uniform(0.15, 0.3);
    p.ripple_positive = rng.below(2) == 1;
    if (pc.voiced) {
      if (!in_run) {
        in_run = true;
        run_id = plan.runs.size();
        RunPlan run;
        run.level_hz = rng.uniform(100.0, 125.0);
        run.excursion_hz = rng.uniform(15.0, 28.0);
        run.phase = rng.uniform(-0.5, 0.5);
        run.slope_hz = rng.uniform(-10.0, 10.0);
        plan.runs.push_back(run);
      }
      p.run_id = run_id;
    } else {
      in_run = false;
    }
    plan.phones.push_back(p);
  }
  return plan;
}

// Source F0 shape at normalized run position.
double run_dev(const RunPlan& run, double tau) {
  return run.excursion_hz * std::sin(M_PI * tau + run.phase) +
         run.slope_hz * (tau - 0.5);
}

struct SpeakerRender {
  Audio audio;
  std::vector<std::pair<double, double>> phone_times;  // start, end seconds
};

SpeakerRender render(const UtterancePlan& plan, const SyntheticConfig& config,
                     bool is_target, DetRng& noise_rng) {
  const int sr = config.sample_rate;
  SpeakerRender out;
  out.audio.sample_rate = sr;

  // Phone timing (target durations scale per class).
  std::vector<double> durations;
  for (const PhonePlan& p : plan.phones) {
    double d = p.duration_s;
    if (is_target) d *= kInventory[p.class_id].duration_scale;
    durations.push_back(d);
  }

  // Voiced run spans in phone indices, for normalized run time.
  std::vector<std::pair<std::size_t, std::size_t>> run_spans(plan.runs.size(),
                                                             {0, 0});
  {
    std::vector<bool> seen(plan.runs.size(), false);
    for (std::size_t i = 0; i < plan.phones.size(); ++i) {
      if (!kInventory[plan.phones[i].class_id].voiced) continue;
      std::size_t r = plan.phones[i].run_id;
      if (!seen[r]) {
        run_spans[r] = {i, i + 1};
        seen[r] = true;
      } else {
        run_spans[r].second = i + 1;
      }
    }
  }
  // Run start time and duration on this speaker's timeline.
  std::vector<std::pair<double, double>> run_time(plan.runs.size(), {0.0, 0.0});
  {
    double t = plan.lead_silence_s;
    for (std::size_t i = 0; i < plan.phones.size(); ++i) {
      if (kInventory[plan.phones[i].class_id].voiced) {
        std::size_t r = plan.phones[i].run_id;
        if (i == run_spans[r].first) run_time[r].first = t;
        run_time[r].second += durations[i];
      }
      t += durations[i];
    }
  }

  double total_s = plan.lead_silence_s + plan.trail_silence_s;
  for (double d : durations) total_s += d;
  auto total_samples = static_cast<std::size_t>(std::llround(total_s * sr));
  out.audio.samples.assign(total_samples, 0.0);

  Resonator res[3];
  double phase = 1.0;
  double last_noise = 0.0;
  double t_cursor = plan.lead_silence_s;
  for (std::size_t i = 0; i < plan.phones.size(); ++i) {
    const PhonePlan& p = plan.phones[i];
    const PhoneClass& pc = kInventory[p.class_id];
    const double dur = durations[i];
    out.phone_times.emplace_back(t_cursor, t_cursor + dur);

    double warp = is_target ? config.formant_warp : 1.0;
    double bw = is_target ? config.bandwidth_warp : 1.0;
    if (pc.voiced) {
      for (int f = 0; f < 3; ++f) {
        res[f].set(pc.formants[f] * warp, pc.bandwidths[f] * bw, sr);
      }
    } else {
      res[0].set(pc.formants[0] * warp, pc.bandwidths[0], sr);
    }
    double amp = p.amplitude * (is_target ? pc.intensity_gain : 1.0);
    // The target gain flips with the ripple sign; only the full-resolution
    // envelope carries the evidence for which way it flips.
    if (is_target && pc.voiced) {
      amp *= std::exp(p.ripple_positive ? 0.55 : -0.55);
    }
    const double ripple_sign = p.ripple_positive ? 1.0 : -1.0;
    double pulse_history[64] = {0.0};

    auto start = static_cast<std::size_t>(std::llround(t_cursor * sr));
    auto end = static_cast<std::size_t>(std::llround((t_cursor + dur) * sr));
    end = std::min(end, total_samples);
    for (std::size_t n = start; n < end; ++n) {
      double local = (static_cast<double>(n) / sr - t_cursor) / dur;
      // Raised-cosine edges keep phone joins click-free and give the
      // intensity trajectory a shape to learn.
      double edge = std::min(1.0, std::min(local, 1.0 - local) / 0.15);
      double env = amp * (0.7 + 0.3 * std::sin(M_PI * local)) *
                   (0.5 - 0.5 * std::cos(M_PI * std::clamp(edge, 0.0, 1.0)));
      double x = 0.0;
      if (pc.voiced) {
        const RunPlan& run = plan.runs[p.run_id];
        double tau = (static_cast<double>(n) / sr - run_time[p.run_id].first) /
                     run_time[p.run_id].second;
        tau = std::clamp(tau, 0.0, 1.0);
        double dev = run_dev(run, tau);
        double f0;
        if (is_target) {
          // The known target rule: affine level shift, matching slope on
          // the deviation, plus a sign-preserving quadratic shape term.
          double level = config.f0_level_scale * run.level_hz +
                         config.f0_level_offset_hz;
          f0 = level + config.f0_level_scale * dev +
               config.f0_shape_quadratic * dev * std::fabs(dev) / 25.0;
        } else {
          f0 = run.level_hz + dev;
        }
        phase += f0 / sr;
        if (phase >= 1.0) {
          phase -= 1.0;
          x = 1.0;
        }
        // Echo imprints a comb ripple (period sr/delay Hz) on the envelope.
        // Kept small so its autocorrelation bump stays well under the
        // voicing threshold.
        pulse_history[n & 63] = x;
        x += 0.22 * ripple_sign * pulse_history[(n - pc.echo_delay) & 63];
        x = res[0].process(res[1].process(res[2].process(x * 40.0)));
      } else {
        double noise = noise_rng.gaussian();
        x = res[0].process(noise - last_noise);
        last_noise = noise;
        phase = 1.0;
      }
      out.audio.samples[n] = env * x;
    }
    t_cursor += dur;
  }

  double peak = 0.0;
  for (double v : out.audio.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0) {
    for (double& v : out.audio.samples) v *= 0.45 / peak;
  }
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config,
                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");
  fs::create_directories(fs::path(out_dir) / "lab");

  SyntheticCorpus corpus;
  DetRng rng(config.seed);
  std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
  if (!manifest) throw IoError("cannot write manifest under " + out_dir);

  for (std::size_t u = 0; u < config.utterance_count; ++u) {
    UtterancePlan plan = plan_utterance(rng);
    // Independent noise streams so source and target fricatives are not
    // sample-identical.
    DetRng src_noise(config.seed ^ (0xa5a5a5a5ull + 2 * u));
    DetRng tgt_noise(config.seed ^ (0x5a5a5a5aull + 2 * u + 1));
    SpeakerRender src = render(plan, config, /*is_target=*/false, src_noise);
    SpeakerRender tgt = render(plan, config, /*is_target=*/true, tgt_noise);

    char id[16];
    std::snprintf(id, sizeof(id), "utt%03zu", u);
    corpus.utt_ids.emplace_back(id);

    fs::path src_wav = fs::path(out_dir) / "wav" / (std::string(id) + "_src.wav");
    fs::path tgt_wav = fs::path(out_dir) / "wav" / (std::string(id) + "_tgt.wav");
    write_wav(src.audio, src_wav.string());
    write_wav(tgt.audio, tgt_wav.string());

    auto write_labels = [&](const SpeakerRender& r, const fs::path& path) {
      std::ofstream os(path);
      if (!os) throw IoError("cannot write labels: " + path.string());
      os.precision(9);
      for (std::size_t i = 0; i < plan.phones.size(); ++i) {
        os << r.phone_times[i].first << ' ' << r.phone_times[i].second << ' '
           << kInventory[plan.phones[i].class_id].label << '\n';
      }
    };
    fs::path src_lab = fs::path(out_dir) / "lab" / (std::string(id) + "_src.lab");
    fs::path tgt_lab = fs::path(out_dir) / "lab" / (std::string(id) + "_tgt.lab");
    write_labels(src, src_lab);
    write_labels(tgt, tgt_lab);

    manifest << id << ' ' << src_wav.string() << ' ' << src_lab.string()
             << ' ' << tgt_wav.string() << ' ' << tgt_lab.string() << '\n';
  }
  if (!manifest) throw IoError("manifest write failed under " + out_dir);
  corpus.manifest_path = (fs::path(out_dir) / "manifest.txt").string();
  return corpus;
}

}  // namespace vc
