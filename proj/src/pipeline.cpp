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

#include "vcforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vcforge/align.hpp"
#include "vcforge/featio.hpp"
#include "vcforge/gmm.hpp"
#include "vcforge/net.hpp"
#include "vcforge/prosody.hpp"
#include "vcforge/wav.hpp"

namespace fs = std::filesystem;

namespace vc {

namespace {

struct SystemInfo {
  System system;
  const char* name;
};

constexpr SystemInfo kSystems[] = {
    {System::kJdGmm, "JD-GMM"},
    {System::kDnnMcep, "DNN-MCEP-like"},
    {System::kDnnSpRandom, "DNN-SP-random"},
    {System::kDnnSpDlp, "DNN-SP-DLP"},
    {System::kDnnSpAutoencoder, "DNN-SP-Autoencoder"},
    {System::kF0MeanVar, "F0-MeanVar"},
    {System::kF0DnnFrame, "F0-DNN-Frame"},
    {System::kF0DnnSegment, "F0-DNN-Segment"},
    {System::kIntensityDnnSegment, "Intensity-DNN-Segment"},
    {System::kDurationDnn, "Duration-DNN"},
};

std::uint64_t system_seed(const ExperimentConfig& config, System system) {
  return config.seed * 0x9e3779b97f4a7c15ull ^ fnv1a_hash(system_name(system));
}

// Simple index-parallel loop; jobs <= 1 runs inline. Worker errors are
// collected and rethrown as one IoError after all workers join.
template <typename Fn>
void parallel_for(int jobs, std::size_t count, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        errors.emplace_back(e.what());
      }
    }
  };
  std::vector<std::thread> threads;
  int n_threads = std::min<int>(jobs, static_cast<int>(count));
  threads.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += e + "; ";
    throw IoError("parallel stage failed: " + joined);
  }
}

std::string feature_path(const ExperimentConfig& config,
                         const std::string& utt, const char* side,
                         const char* kind) {
  return (fs::path(config.features_dir()) /
          (utt + "_" + side + "_" + kind + ".vcft"))
      .string();
}

std::string align_path(const ExperimentConfig& config, const std::string& utt) {
  return (fs::path(config.align_dir()) / (utt + ".ali")).string();
}

struct SpeakerFeatures {
  FeatureTrack envelope;
  FeatureTrack f0vuv;
  FeatureTrack intensity;
  PhoneSegmentList phones;  // clipped to the envelope frame count

  SpeakerFeatures(FeatureTrack env, FeatureTrack f0, FeatureTrack intensity_in,
                  PhoneSegmentList ph)
      : envelope(std::move(env)),
        f0vuv(std::move(f0)),
        intensity(std::move(intensity_in)),
        phones(std::move(ph)) {}
};

SpeakerFeatures load_speaker(const ExperimentConfig& config,
                             const ManifestEntry& entry, bool target_side) {
  const char* side = target_side ? "tgt" : "src";
  FeatureTrack env =
      read_track(feature_path(config, entry.utt_id, side, "env"));
  FeatureTrack f0 = read_track(feature_path(config, entry.utt_id, side, "f0"));
  FeatureTrack intensity =
      read_track(feature_path(config, entry.utt_id, side, "int"));
  const std::string& lab = target_side ? entry.target_lab : entry.source_lab;
  PhoneSegmentList phones =
      read_phone_labels(lab, config.analysis.frame_shift_s)
          .clipped(env.frames());
  if (env.frames() != f0.frames() || env.frames() != intensity.frames()) {
    throw ValidationError(entry.utt_id +
                          ": feature tracks disagree on frame count; "
                          "re-run extract");
  }
  return SpeakerFeatures(std::move(env), std::move(f0), std::move(intensity),
                         std::move(phones));
}

// Alignment is computed on the static envelopes and cached as a text file;
// later stages read the cache.
AlignmentPath ensure_alignment(const ExperimentConfig& config,
                               const ManifestEntry& entry,
                               const SpeakerFeatures& src,
                               const SpeakerFeatures& tgt) {
  std::string path = align_path(config, entry.utt_id);
  if (fs::exists(path) && !config.force) {
    return read_alignment(path);
  }
  UtterancePair pair(src.envelope, tgt.envelope, src.phones, tgt.phones);
  DtwConfig dtw;
  dtw.band_width = config.dtw_band;
  UtterancePair aligned = two_stage_align(pair, dtw);
  fs::create_directories(config.align_dir());
  write_alignment(aligned.alignment(), path);
  return aligned.alignment();
}

// DNN spectrum input: [static envelope | delta | delta-delta | vuv].
Matrix spectrum_inputs(const FeatureTrack& env, const FeatureTrack& f0vuv) {
  FeatureTrack with_deltas = append_deltas(env);
  const std::size_t d = with_deltas.dim();
  Matrix out(env.frames(), d + 1);
  for (std::size_t t = 0; t < env.frames(); ++t) {
    const double* row = with_deltas.frame(t);
    std::copy(row, row + d, out.row(t));
    out(t, d) = f0vuv.value(t, 1);
  }
  return out;
}

struct GatheredData {
  // Aligned frame pairs across all training utterances.
  Matrix source_inputs;      // spectrum DNN inputs at aligned source frames
  Matrix target_static;      // static target envelopes at aligned frames
  Matrix all_source_inputs;  // every source frame once (pretraining)
  std::vector<SpeakerFeatures> sources;
  std::vector<SpeakerFeatures> targets;
  std::vector<AlignmentPath> alignments;
};

GatheredData gather_training_data(const ExperimentConfig& config,
                                  const std::vector<ManifestEntry>& entries) {
  if (entries.empty()) {
    throw ConfigError("training split is empty");
  }
  GatheredData data;
  std::size_t pair_rows = 0, all_rows = 0;
  for (const ManifestEntry& entry : entries) {
    SpeakerFeatures src = load_speaker(config, entry, false);
    SpeakerFeatures tgt = load_speaker(config, entry, true);
    AlignmentPath path = ensure_alignment(config, entry, src, tgt);
    pair_rows += path.size();
    all_rows += src.envelope.frames();
    data.sources.push_back(std::move(src));
    data.targets.push_back(std::move(tgt));
    data.alignments.push_back(std::move(path));
  }
  const std::size_t env_dim = data.sources[0].envelope.dim();
  const std::size_t in_dim = 3 * env_dim + 1;
  data.source_inputs = Matrix(pair_rows, in_dim);
  data.target_static = Matrix(pair_rows, env_dim);
  data.all_source_inputs = Matrix(all_rows, in_dim);
  std::size_t row = 0, all_row = 0;
  for (std::size_t u = 0; u < data.sources.size(); ++u) {
    Matrix inputs =
        spectrum_inputs(data.sources[u].envelope, data.sources[u].f0vuv);
    for (std::size_t t = 0; t < inputs.rows(); ++t) {
      std::copy(inputs.row(t), inputs.row(t) + in_dim,
                data.all_source_inputs.row(all_row++));
    }
    const Matrix& tgt_env = data.targets[u].envelope.data();
    for (const auto& [i, j] : data.alignments[u]) {
      std::copy(inputs.row(i), inputs.row(i) + in_dim,
                data.source_inputs.row(row));
      std::copy(tgt_env.row(j), tgt_env.row(j) + env_dim,
                data.target_static.row(row));
      ++row;
    }
  }
  return data;
}

void write_run_meta(const ExperimentConfig& config, System system) {
  fs::create_directories(config.models_dir(system));
  std::ofstream os(fs::path(config.models_dir(system)) / "run_meta.txt");
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a_hash(canonical_config_text(config))));
  os << "system=" << system_name(system) << "\n"
     << "seed=" << config.seed << "\n"
     << "config_hash=" << hash << "\n"
     << "version=vcforge-1.0\n";
}

void append_phase_log(std::ostream& os, const char* phase,
                      const TrainLog& log) {
  for (std::size_t e = 0; e < log.train_mse.size(); ++e) {
    os << "phase=" << phase << " epoch=" << e << " mse=" << log.train_mse[e];
    if (e < log.val_mse.size()) os << " val_mse=" << log.val_mse[e];
    os << "\n";
  }
}

TrainConfig net_config(const ExperimentConfig& config, System system) {
  TrainConfig tc;
  tc.learning_rate = config.learning_rate;
  tc.momentum = config.momentum;
  tc.batch_size = config.batch_size;
  tc.max_epochs = config.train_epochs;
  tc.l1_lambda = config.l1_lambda;
  tc.seed = system_seed(config, system);
  tc.normalize_inputs = true;
  tc.normalize_outputs = true;
  tc.dlp_stage_epochs = config.dlp_stage_epochs;
  return tc;
}

std::vector<std::size_t> net_dims(std::size_t in,
                                  const std::vector<std::size_t>& hidden,
                                  std::size_t out) {
  std::vector<std::size_t> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

std::vector<ProsodyPair> prosody_pairs(const GatheredData& data,
                                       bool with_values) {
  std::vector<ProsodyPair> pairs;
  for (std::size_t u = 0; u < data.sources.size(); ++u) {
    ProsodyPair p;
    p.source_f0vuv = &data.sources[u].f0vuv;
    p.target_f0vuv = &data.targets[u].f0vuv;
    if (with_values) {
      p.source_values = &data.sources[u].intensity;
      p.target_values = &data.targets[u].intensity;
    }
    p.alignment = &data.alignments[u];
    pairs.push_back(p);
  }
  return pairs;
}

MeanVarStats gather_meanvar(const GatheredData& data) {
  std::vector<double> src_f0, tgt_f0;
  for (const SpeakerFeatures& s : data.sources) {
    for (std::size_t t = 0; t < s.f0vuv.frames(); ++t) {
      if (s.f0vuv.value(t, 1) > 0.5) src_f0.push_back(s.f0vuv.value(t, 0));
    }
  }
  for (const SpeakerFeatures& s : data.targets) {
    for (std::size_t t = 0; t < s.f0vuv.frames(); ++t) {
      if (s.f0vuv.value(t, 1) > 0.5) tgt_f0.push_back(s.f0vuv.value(t, 0));
    }
  }
  return compute_meanvar_stats(src_f0, tgt_f0);
}

// Frame-level F0 regression input: static+delta+delta-delta envelope, a
// 7-frame F0 window, F0 delta and delta-delta, and VUV.
std::vector<double> f0_frame_input(const FeatureTrack& env_deltas,
                                   const FeatureTrack& f0vuv, std::size_t t) {
  const std::size_t d = env_deltas.dim();
  std::vector<double> row(d + 10);
  const double* e = env_deltas.frame(t);
  std::copy(e, e + d, row.begin());
  auto f0_at = [&](long idx) {
    idx = std::clamp<long>(idx, 0, static_cast<long>(f0vuv.frames()) - 1);
    return f0vuv.value(static_cast<std::size_t>(idx), 0);
  };
  for (long w = -3; w <= 3; ++w) {
    row[d + static_cast<std::size_t>(w + 3)] = f0_at(static_cast<long>(t) + w);
  }
  double prev = f0_at(static_cast<long>(t) - 1);
  double next = f0_at(static_cast<long>(t) + 1);
  double cur = f0_at(static_cast<long>(t));
  row[d + 7] = 0.5 * (next - prev);
  row[d + 8] = next - 2.0 * cur + prev;
  row[d + 9] = f0vuv.value(t, 1);
  return row;
}

// ---------------------------------------------------------------------
// Training branches
// ---------------------------------------------------------------------

void train_spectrum_dnn(const ExperimentConfig& config, System system,
                        const GatheredData& data, std::ostream& log) {
  const std::size_t in_dim = data.source_inputs.cols();
  const std::size_t out_dim = data.target_static.cols();
  FeedForwardNet net = init_random(net_dims(in_dim, config.sp_hidden, out_dim),
                                   system_seed(config, system));
  TrainConfig tc = net_config(config, system);
  if (system == System::kDnnSpAutoencoder) {
    TrainConfig pre = tc;
    pre.max_epochs = config.pretrain_epochs;
    TrainLog pre_log = pretrain_autoencoder(net, data.all_source_inputs, pre);
    append_phase_log(log, "pretrain", pre_log);
  } else if (system == System::kDnnSpDlp) {
    TrainLog pre_log =
        pretrain_dlp(net, data.source_inputs, data.target_static, tc);
    append_phase_log(log, "pretrain", pre_log);
  }
  TrainLog fit = train(net, data.source_inputs, data.target_static, tc);
  append_phase_log(log, "train", fit);
  save_net(net, (fs::path(config.models_dir(system)) / "model.vcnn").string());
}

void train_mcep_dnn(const ExperimentConfig& config, const GatheredData& data,
                    std::ostream& log) {
  // Low-dimensional baseline: truncated-DCT coefficients in and out.
  Matrix src(data.source_inputs.rows(), data.target_static.cols());
  for (std::size_t r = 0; r < src.rows(); ++r) {
    std::copy(data.source_inputs.row(r),
              data.source_inputs.row(r) + src.cols(), src.row(r));
  }
  Matrix src_dct = dct_reduce_rows(src, config.mcep_order);
  Matrix tgt_dct = dct_reduce_rows(data.target_static, config.mcep_order);
  FeedForwardNet net = init_random(
      net_dims(config.mcep_order, config.mcep_hidden, config.mcep_order),
      system_seed(config, System::kDnnMcep));
  TrainConfig tc = net_config(config, System::kDnnMcep);
  TrainLog fit = train(net, src_dct, tgt_dct, tc);
  append_phase_log(log, "train", fit);
  save_net(net, (fs::path(config.models_dir(System::kDnnMcep)) /
                 "model.vcnn").string());
}

void train_jd_gmm(const ExperimentConfig& config, const GatheredData& data,
                  std::ostream& log) {
  Matrix src(data.source_inputs.rows(), data.target_static.cols());
  for (std::size_t r = 0; r < src.rows(); ++r) {
    std::copy(data.source_inputs.row(r),
              data.source_inputs.row(r) + src.cols(), src.row(r));
  }
  Matrix src_dct = dct_reduce_rows(src, config.mcep_order);
  Matrix tgt_dct = dct_reduce_rows(data.target_static, config.mcep_order);
  GmmTrainConfig gc;
  gc.max_iterations = config.gmm_max_iterations;
  gc.seed = system_seed(config, System::kJdGmm);
  GmmTrainResult result =
      em_train(src_dct, tgt_dct, config.gmm_components, gc);
  for (std::size_t i = 0; i < result.log_likelihood.size(); ++i) {
    log << "iteration=" << i << " loglik=" << result.log_likelihood[i] << "\n";
  }
  save_gmm(result.model, (fs::path(config.models_dir(System::kJdGmm)) /
                          "model.vcgm").string());
}

void train_f0_segment(const ExperimentConfig& config, const GatheredData& data,
                      std::ostream& log) {
  SegmentTrainingSet set =
      build_f0_training_set(prosody_pairs(data, false), config.segment_length);
  log << "matched_segments=" << set.matched << " dropped=" << set.dropped
      << "\n";
  {
    // Inspection dump of the source-side training segments.
    std::ofstream dump(fs::path(config.models_dir(System::kF0DnnSegment)) /
                       "segments.txt");
    for (std::size_t u = 0; u < data.sources.size(); ++u) {
      auto segments = extract_voiced_segments(data.sources[u].f0vuv,
                                              config.segment_length);
      for (std::size_t i = 0; i < segments.size(); ++i) {
        const VoicedSegment& s = segments[i];
        dump << "utt" << u << ' ' << i << ' ' << s.start_frame << ' '
             << s.end_frame << ' ' << s.segment_mean;
        for (double v : s.normalized) dump << ' ' << v;
        dump << '\n';
      }
    }
  }
  FeedForwardNet net = init_random(
      net_dims(config.segment_length, config.f0_hidden, config.segment_length),
      system_seed(config, System::kF0DnnSegment));
  TrainConfig tc = net_config(config, System::kF0DnnSegment);
  TrainLog fit = train(net, set.inputs, set.targets, tc);
  append_phase_log(log, "train", fit);
  fs::path dir = config.models_dir(System::kF0DnnSegment);
  save_net(net, (dir / "model.vcnn").string());
  save_meanvar(gather_meanvar(data), (dir / "meanvar.txt").string());
}

void train_f0_frame(const ExperimentConfig& config, const GatheredData& data,
                    std::ostream& log) {
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  for (std::size_t u = 0; u < data.sources.size(); ++u) {
    FeatureTrack env_deltas = append_deltas(data.sources[u].envelope);
    const FeatureTrack& sf0 = data.sources[u].f0vuv;
    const FeatureTrack& tf0 = data.targets[u].f0vuv;
    for (const auto& [i, j] : data.alignments[u]) {
      if (sf0.value(i, 1) < 0.5 || tf0.value(j, 1) < 0.5) continue;
      rows.push_back(f0_frame_input(env_deltas, sf0, i));
      targets.push_back(tf0.value(j, 0));
    }
  }
  if (rows.empty()) {
    throw TrainingError("F0-DNN-Frame: no voiced aligned frames");
  }
  Matrix inputs(rows.size(), rows[0].size());
  Matrix target_m(rows.size(), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    inputs.set_row(r, rows[r]);
    target_m(r, 0) = targets[r];
  }
  FeedForwardNet net =
      init_random(net_dims(inputs.cols(), config.f0_hidden, 1),
                  system_seed(config, System::kF0DnnFrame));
  TrainConfig tc = net_config(config, System::kF0DnnFrame);
  TrainLog fit = train(net, inputs, target_m, tc);
  append_phase_log(log, "train", fit);
  save_net(net, (fs::path(config.models_dir(System::kF0DnnFrame)) /
                 "model.vcnn").string());
}

void train_intensity(const ExperimentConfig& config, const GatheredData& data,
                     std::ostream& log) {
  SegmentTrainingSet set = build_intensity_training_set(
      prosody_pairs(data, true), config.segment_length);
  log << "matched_segments=" << set.matched << " dropped=" << set.dropped
      << "\n";
  FeedForwardNet net =
      init_random(net_dims(config.segment_length, config.intensity_hidden,
                           config.segment_length),
                  system_seed(config, System::kIntensityDnnSegment));
  TrainConfig tc = net_config(config, System::kIntensityDnnSegment);
  TrainLog fit = train(net, set.inputs, set.targets, tc);
  append_phase_log(log, "train", fit);
  save_net(net, (fs::path(config.models_dir(System::kIntensityDnnSegment)) /
                 "model.vcnn").string());
}

void train_duration(const ExperimentConfig& config, const GatheredData& data,
                    std::ostream& log) {
  std::vector<DurationSample> samples;
  for (std::size_t u = 0; u < data.sources.size(); ++u) {
    std::vector<DurationSample> s = build_duration_samples(
        data.sources[u].envelope, data.sources[u].phones,
        data.targets[u].phones, config.duration_frames);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  if (samples.empty()) {
    throw TrainingError("Duration-DNN: no usable phone segments");
  }
  Matrix inputs(samples.size(), samples[0].input.size());
  Matrix targets(samples.size(), 1);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    inputs.set_row(r, samples[r].input);
    targets(r, 0) = samples[r].ratio;
  }
  log << "duration_samples=" << samples.size() << "\n";
  FeedForwardNet net =
      init_random(net_dims(inputs.cols(), config.duration_hidden, 1),
                  system_seed(config, System::kDurationDnn));
  TrainConfig tc = net_config(config, System::kDurationDnn);
  TrainLog fit = train(net, inputs, targets, tc);
  append_phase_log(log, "train", fit);
  save_net(net, (fs::path(config.models_dir(System::kDurationDnn)) /
                 "model.vcnn").string());
}

// ---------------------------------------------------------------------
// Conversion
// ---------------------------------------------------------------------

struct LoadedModels {
  System spectrum_system = System::kDnnSpAutoencoder;
  bool spectrum_passthrough = false;
  std::optional<GmmConverter> gmm;
  std::optional<FeedForwardNet> spectrum_net;

  bool f0_enabled = false;
  System f0_system = System::kF0MeanVar;
  std::optional<MeanVarStats> meanvar;
  std::optional<FeedForwardNet> f0_net;

  std::optional<FeedForwardNet> intensity_net;
  std::optional<FeedForwardNet> duration_net;
};

bool model_exists(const ExperimentConfig& config, System system,
                  const char* file) {
  return fs::exists(fs::path(config.models_dir(system)) / file);
}

LoadedModels load_models(const ExperimentConfig& config) {
  LoadedModels models;
  System requested = system_from_name(config.system);

  if (is_spectrum_system(requested)) {
    models.spectrum_system = requested;
    if (requested == System::kJdGmm) {
      models.gmm.emplace(load_gmm(
          (fs::path(config.models_dir(requested)) / "model.vcgm").string()));
    } else {
      models.spectrum_net = load_net(
          (fs::path(config.models_dir(requested)) / "model.vcnn").string());
    }
  } else {
    // Prosody-only run: the envelope passes through unchanged.
    models.spectrum_passthrough = true;
    models.spectrum_system = requested;
  }

  System f0_system = is_f0_system(requested)
                         ? requested
                         : system_from_name(config.f0_system);
  if (config.enable_f0) {
    models.f0_system = f0_system;
    fs::path dir = config.models_dir(f0_system);
    bool ok = true;
    if (f0_system == System::kF0MeanVar) {
      if (fs::exists(dir / "meanvar.txt")) {
        models.meanvar = load_meanvar((dir / "meanvar.txt").string());
      } else {
        ok = false;
      }
    } else {
      if (fs::exists(dir / "model.vcnn")) {
        models.f0_net = load_net((dir / "model.vcnn").string());
        if (f0_system == System::kF0DnnSegment) {
          models.meanvar = load_meanvar((dir / "meanvar.txt").string());
        }
      } else {
        ok = false;
      }
    }
    models.f0_enabled = ok;
    if (!ok) {
      std::cerr << "note: F0 stage skipped (" << system_name(f0_system)
                << " model not trained)\n";
    }
  }

  bool want_intensity = config.enable_intensity ||
                        requested == System::kIntensityDnnSegment;
  if (want_intensity &&
      model_exists(config, System::kIntensityDnnSegment, "model.vcnn")) {
    models.intensity_net = load_net(
        (fs::path(config.models_dir(System::kIntensityDnnSegment)) /
         "model.vcnn")
            .string());
  } else if (requested == System::kIntensityDnnSegment) {
    throw StateError("Intensity-DNN-Segment model not trained");
  }

  bool want_duration =
      config.enable_duration || requested == System::kDurationDnn;
  if (want_duration &&
      model_exists(config, System::kDurationDnn, "model.vcnn")) {
    models.duration_net = load_net(
        (fs::path(config.models_dir(System::kDurationDnn)) / "model.vcnn")
            .string());
  } else if (requested == System::kDurationDnn) {
    throw StateError("Duration-DNN model not trained");
  }
  return models;
}

FeatureTrack convert_spectrum(const ExperimentConfig& config,
                              const LoadedModels& models,
                              const SpeakerFeatures& src) {
  if (models.spectrum_passthrough) return src.envelope;
  if (models.gmm) {
    FeatureTrack reduced = dct_reduce(src.envelope, config.mcep_order);
    Matrix out(reduced.frames(), config.mcep_order);
    std::vector<double> x(config.mcep_order);
    for (std::size_t t = 0; t < reduced.frames(); ++t) {
      std::copy(reduced.frame(t), reduced.frame(t) + config.mcep_order,
                x.begin());
      std::vector<double> y = models.gmm->convert(x);
      out.set_row(t, y);
    }
    return dct_expand(FeatureTrack(std::move(out),
                                   src.envelope.frame_shift_s()),
                      src.envelope.dim());
  }
  const FeedForwardNet& net = *models.spectrum_net;
  if (models.spectrum_system == System::kDnnMcep) {
    FeatureTrack reduced = dct_reduce(src.envelope, config.mcep_order);
    Matrix converted = forward_all(net, reduced.data());
    return dct_expand(FeatureTrack(std::move(converted),
                                   src.envelope.frame_shift_s()),
                      src.envelope.dim());
  }
  Matrix inputs = spectrum_inputs(src.envelope, src.f0vuv);
  if (inputs.cols() != net.input_dim()) {
    throw ValidationError(
        "spectral conversion: feature dim " + std::to_string(inputs.cols()) +
        " does not match model input dim " + std::to_string(net.input_dim()) +
        " (stage: spectrum)");
  }
  Matrix converted = forward_all(net, inputs);
  return FeatureTrack(std::move(converted), src.envelope.frame_shift_s());
}

FeatureTrack convert_f0(const ExperimentConfig& config,
                        const LoadedModels& models,
                        const SpeakerFeatures& src) {
  const FeatureTrack& f0 = src.f0vuv;
  Matrix out(f0.frames(), 2);
  auto clamp_f0 = [&](double v) {
    return std::clamp(v, config.analysis.f0_floor_hz,
                      config.analysis.f0_ceil_hz);
  };
  if (models.f0_system == System::kF0MeanVar) {
    for (std::size_t t = 0; t < f0.frames(); ++t) {
      bool voiced = f0.value(t, 1) > 0.5;
      out(t, 0) =
          voiced ? clamp_f0(meanvar_transform(f0.value(t, 0), *models.meanvar))
                 : 0.0;
      out(t, 1) = voiced ? 1.0 : 0.0;
    }
  } else if (models.f0_system == System::kF0DnnSegment) {
    for (std::size_t t = 0; t < f0.frames(); ++t) {
      out(t, 0) = 0.0;
      out(t, 1) = f0.value(t, 1) > 0.5 ? 1.0 : 0.0;
    }
    std::vector<VoicedSegment> segments =
        extract_voiced_segments(f0, config.segment_length);
    for (const VoicedSegment& seg : segments) {
      F0DiffFeature diff = f0_to_diff(seg);
      std::vector<double> predicted = models.f0_net->forward(diff.values);
      F0DiffFeature predicted_diff{std::move(predicted)};
      predicted_diff.values[0] = 0.0;  // Eq. 5 contract on the output side
      double mean_hat =
          predict_segment_mean(seg.segment_mean, *models.meanvar);
      std::vector<double> traj =
          reconstruct_f0(predicted_diff, mean_hat, seg.length());
      for (std::size_t k = 0; k < seg.length(); ++k) {
        out(seg.start_frame + k, 0) = clamp_f0(traj[k]);
      }
    }
    // Voiced frames outside usable segments (length-1 runs) fall back to
    // the mean level so no voiced frame carries a zero F0.
    for (std::size_t t = 0; t < f0.frames(); ++t) {
      if (out(t, 1) > 0.5 && out(t, 0) == 0.0) {
        out(t, 0) = clamp_f0(
            predict_segment_mean(f0.value(t, 0), *models.meanvar));
      }
    }
  } else {  // frame-level DNN
    FeatureTrack env_deltas = append_deltas(src.envelope);
    for (std::size_t t = 0; t < f0.frames(); ++t) {
      bool voiced = f0.value(t, 1) > 0.5;
      out(t, 1) = voiced ? 1.0 : 0.0;
      if (!voiced) {
        out(t, 0) = 0.0;
        continue;
      }
      std::vector<double> row = f0_frame_input(env_deltas, f0, t);
      out(t, 0) = clamp_f0(models.f0_net->forward(row)[0]);
    }
  }
  return FeatureTrack(std::move(out), f0.frame_shift_s(), {"f0", "vuv"});
}

FeatureTrack apply_intensity_stage(const ExperimentConfig& config,
                                   const LoadedModels& models,
                                   const SpeakerFeatures& src,
                                   const FeatureTrack& converted_env) {
  std::vector<VoicedSegment> segments = extract_value_segments(
      src.intensity, src.f0vuv, config.segment_length);
  std::vector<VoicedSegment> predictions;
  for (VoicedSegment seg : segments) {
    std::vector<double> predicted =
        models.intensity_net->forward(seg.normalized);
    seg.original_values = resample_linear(predicted, seg.length());
    predictions.push_back(std::move(seg));
  }
  return apply_intensity(converted_env, predictions);
}

struct ConvertedUtterance {
  FeatureTrack envelope;
  FeatureTrack f0vuv;
};

ConvertedUtterance convert_utterance(const ExperimentConfig& config,
                                     const LoadedModels& models,
                                     const SpeakerFeatures& src) {
  // Fixed stage order: spectrum, intensity, F0, duration.
  FeatureTrack env = convert_spectrum(config, models, src);
  if (models.intensity_net) {
    env = apply_intensity_stage(config, models, src, env);
  }
  FeatureTrack f0 = models.f0_enabled ? convert_f0(config, models, src)
                                      : src.f0vuv;
  if (models.duration_net) {
    std::vector<double> ratios;
    std::vector<DurationSample> samples = build_duration_samples(
        src.envelope, src.phones, src.phones, config.duration_frames);
    // build_duration_samples skips phones under 2 frames; predict per
    // phone directly to keep ratios index-aligned with the phone list.
    ratios.reserve(src.phones.size());
    std::size_t sample_idx = 0;
    for (std::size_t p = 0; p < src.phones.size(); ++p) {
      std::size_t len =
          src.phones[p].end_frame - src.phones[p].start_frame;
      if (len < 2) {
        ratios.push_back(1.0);
        continue;
      }
      double r = models.duration_net->forward(samples[sample_idx++].input)[0];
      ratios.push_back(std::clamp(r, 0.5, 2.0));
    }
    RetimedTracks retimed =
        apply_duration({&env, &f0}, {RetimeMode::kLinear, RetimeMode::kNearest},
                       src.phones, ratios);
    return {std::move(retimed.tracks[0]), std::move(retimed.tracks[1])};
  }
  return {std::move(env), std::move(f0)};
}

// Nearest (last-paired) target frame for each source frame, giving
// source-timeline copies of the target tracks for evaluation. Uses the
// same two-stage phone-constrained alignment as training; inside
// near-stationary phones an unconstrained DTW path can wander, which
// would smear the reference tracks.
std::pair<FeatureTrack, FeatureTrack> align_target_to_source(
    const SpeakerFeatures& src, const SpeakerFeatures& tgt,
    const ExperimentConfig& config) {
  DtwConfig dtw;
  dtw.band_width = config.dtw_band;
  UtterancePair pair(src.envelope, tgt.envelope, src.phones, tgt.phones);
  const AlignmentPath path = two_stage_align(pair, dtw).alignment();
  std::vector<std::size_t> target_of(src.envelope.frames(), 0);
  std::vector<bool> covered(src.envelope.frames(), false);
  for (const auto& [i, j] : path) {
    target_of[i] = j;
    covered[i] = true;
  }
  // Frames skipped by one-sided gaps inherit the nearest earlier mapping.
  std::size_t last = 0;
  for (std::size_t i = 0; i < target_of.size(); ++i) {
    if (covered[i]) {
      last = target_of[i];
    } else {
      target_of[i] = last;
    }
  }
  Matrix env(src.envelope.frames(), tgt.envelope.dim());
  Matrix f0(src.envelope.frames(), 2);
  for (std::size_t i = 0; i < target_of.size(); ++i) {
    const double* erow = tgt.envelope.frame(target_of[i]);
    std::copy(erow, erow + tgt.envelope.dim(), env.row(i));
    f0(i, 0) = tgt.f0vuv.value(target_of[i], 0);
    f0(i, 1) = tgt.f0vuv.value(target_of[i], 1);
  }
  double shift = src.envelope.frame_shift_s();
  return {FeatureTrack(std::move(env), shift),
          FeatureTrack(std::move(f0), shift, {"f0", "vuv"})};
}

FeatureTrack select_frames(const FeatureTrack& track,
                           const std::vector<bool>& mask) {
  std::size_t kept = 0;
  for (bool b : mask) kept += b ? 1 : 0;
  Matrix out(kept, track.dim());
  std::size_t row = 0;
  for (std::size_t t = 0; t < track.frames(); ++t) {
    if (!mask[t]) continue;
    const double* src = track.frame(t);
    std::copy(src, src + track.dim(), out.row(row++));
  }
  return FeatureTrack(std::move(out), track.frame_shift_s());
}

}  // namespace

// ---------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------

System system_from_name(const std::string& name) {
  for (const SystemInfo& info : kSystems) {
    if (name == info.name) return info.system;
  }
  throw ConfigError("unknown system '" + name + "'");
}

const std::string& system_name(System system) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const SystemInfo& info : kSystems) v.emplace_back(info.name);
    return v;
  }();
  return names[static_cast<std::size_t>(system)];
}

const std::vector<System>& all_systems() {
  static const std::vector<System> systems = [] {
    std::vector<System> v;
    for (const SystemInfo& info : kSystems) v.push_back(info.system);
    return v;
  }();
  return systems;
}

bool is_spectrum_system(System system) {
  switch (system) {
    case System::kJdGmm:
    case System::kDnnMcep:
    case System::kDnnSpRandom:
    case System::kDnnSpDlp:
    case System::kDnnSpAutoencoder:
      return true;
    default:
      return false;
  }
}

bool is_f0_system(System system) {
  switch (system) {
    case System::kF0MeanVar:
    case System::kF0DnnFrame:
    case System::kF0DnnSegment:
      return true;
    default:
      return false;
  }
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest: " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    ManifestEntry e;
    if (!(ss >> e.utt_id)) continue;
    if (!(ss >> e.source_wav >> e.source_lab >> e.target_wav >>
          e.target_lab)) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": expected `utt_id src_wav src_lab tgt_wav "
                        "tgt_lab`");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string ExperimentConfig::resolved_output_dir() const {
  if (!output_dir.empty()) return output_dir;
  if (const char* env = std::getenv("VCFORGE_WORKDIR")) return env;
  return "vcforge_out";
}

std::string ExperimentConfig::features_dir() const {
  return (fs::path(resolved_output_dir()) / "features").string();
}
std::string ExperimentConfig::align_dir() const {
  return (fs::path(resolved_output_dir()) / "align").string();
}
std::string ExperimentConfig::models_dir(System system) const {
  return (fs::path(resolved_output_dir()) / "models" / system_name(system))
      .string();
}
std::string ExperimentConfig::converted_dir(System system) const {
  return (fs::path(resolved_output_dir()) / "converted" / system_name(system))
      .string();
}
std::string ExperimentConfig::reports_dir() const {
  return (fs::path(resolved_output_dir()) / "reports").string();
}

std::vector<ManifestEntry> ExperimentConfig::train_entries(
    const std::vector<ManifestEntry>& manifest) const {
  std::vector<ManifestEntry> out;
  if (!train_utts.empty()) {
    for (const std::string& id : train_utts) {
      auto it = std::find_if(manifest.begin(), manifest.end(),
                             [&](const ManifestEntry& e) {
                               return e.utt_id == id;
                             });
      if (it == manifest.end()) {
        throw ConfigError("train utterance '" + id + "' not in manifest");
      }
      out.push_back(*it);
    }
    return out;
  }
  for (const ManifestEntry& e : manifest) {
    if (std::find(test_utts.begin(), test_utts.end(), e.utt_id) ==
        test_utts.end()) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<ManifestEntry> ExperimentConfig::test_entries(
    const std::vector<ManifestEntry>& manifest) const {
  std::vector<ManifestEntry> out;
  for (const std::string& id : test_utts) {
    auto it = std::find_if(manifest.begin(), manifest.end(),
                           [&](const ManifestEntry& e) {
                             return e.utt_id == id;
                           });
    if (it == manifest.end()) {
      throw ConfigError("test utterance '" + id + "' not in manifest");
    }
    out.push_back(*it);
  }
  return out;
}

void ExperimentConfig::validate() const {
  system_from_name(system);
  system_from_name(f0_system);
  for (const std::string& id : test_utts) {
    if (std::find(train_utts.begin(), train_utts.end(), id) !=
        train_utts.end()) {
      throw ConfigError("utterance '" + id + "' is in both splits");
    }
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::size_t> parse_dims(const std::string& s) {
  std::vector<std::size_t> out;
  for (const std::string& tok : split_ws(s)) {
    out.push_back(static_cast<std::size_t>(std::stoull(tok)));
  }
  return out;
}

}  // namespace

void apply_config_override(ExperimentConfig& config, const std::string& key,
                           const std::string& value) {
  try {
    if (key == "corpus.manifest") config.manifest_path = value;
    else if (key == "corpus.output_dir") config.output_dir = value;
    else if (key == "corpus.train") config.train_utts = split_ws(value);
    else if (key == "corpus.test") config.test_utts = split_ws(value);
    else if (key == "run.system") config.system = value;
    else if (key == "run.seed") config.seed = std::stoull(value);
    else if (key == "run.jobs") config.jobs = std::stoi(value);
    else if (key == "run.deterministic") config.deterministic = value == "1" || value == "true";
    else if (key == "run.force") config.force = value == "1" || value == "true";
    else if (key == "run.dump_text") config.dump_text = value == "1" || value == "true";
    else if (key == "analysis.sample_rate") config.sample_rate = std::stoi(value);
    else if (key == "analysis.fft_size") config.analysis.fft_size = std::stoull(value);
    else if (key == "analysis.frame_shift_s") config.analysis.frame_shift_s = std::stod(value);
    else if (key == "analysis.envelope_order") config.analysis.envelope_order = std::stoull(value);
    else if (key == "analysis.f0_floor_hz") config.analysis.f0_floor_hz = std::stod(value);
    else if (key == "analysis.f0_ceil_hz") config.analysis.f0_ceil_hz = std::stod(value);
    else if (key == "analysis.cepstral_lifter_order") config.analysis.cepstral_lifter_order = std::stoull(value);
    else if (key == "analysis.voicing_threshold") config.analysis.voicing_threshold = std::stod(value);
    else if (key == "align.band") config.dtw_band = std::stoull(value);
    else if (key == "gmm.components") config.gmm_components = std::stoull(value);
    else if (key == "gmm.max_iterations") config.gmm_max_iterations = std::stoull(value);
    else if (key == "gmm.mcep_order") config.mcep_order = std::stoull(value);
    else if (key == "net.preset") {
      if (value == "paper") {
        config.sp_hidden = {3000, 3000, 3000};
        config.f0_hidden = {500, 500};
        config.intensity_hidden = {500, 500};
        config.duration_hidden = {500, 500};
        config.mcep_hidden = {50, 50};
      } else if (value == "desk") {
        config.sp_hidden = {256, 256};
        config.f0_hidden = {64, 64};
        config.intensity_hidden = {64, 64};
        config.duration_hidden = {64};
        config.mcep_hidden = {50, 50};
      } else {
        throw ConfigError("net.preset must be 'paper' or 'desk'");
      }
    }
    else if (key == "net.learning_rate") config.learning_rate = std::stod(value);
    else if (key == "net.momentum") config.momentum = std::stod(value);
    else if (key == "net.batch_size") config.batch_size = std::stoull(value);
    else if (key == "net.train_epochs") config.train_epochs = std::stoull(value);
    else if (key == "net.pretrain_epochs") config.pretrain_epochs = std::stoull(value);
    else if (key == "net.dlp_stage_epochs") config.dlp_stage_epochs = std::stoull(value);
    else if (key == "net.l1_lambda") config.l1_lambda = std::stod(value);
    else if (key == "net.sp_hidden") config.sp_hidden = parse_dims(value);
    else if (key == "net.mcep_hidden") config.mcep_hidden = parse_dims(value);
    else if (key == "net.f0_hidden") config.f0_hidden = parse_dims(value);
    else if (key == "net.intensity_hidden") config.intensity_hidden = parse_dims(value);
    else if (key == "net.duration_hidden") config.duration_hidden = parse_dims(value);
    else if (key == "prosody.segment_length") config.segment_length = std::stoull(value);
    else if (key == "prosody.duration_frames") config.duration_frames = std::stoull(value);
    else if (key == "convert.f0") config.enable_f0 = value == "1" || value == "true";
    else if (key == "convert.intensity") config.enable_intensity = value == "1" || value == "true";
    else if (key == "convert.duration") config.enable_duration = value == "1" || value == "true";
    else if (key == "convert.f0_system") config.f0_system = value;
    else if (key == "convert.wav") config.write_wav_output = value == "1" || value == "true";
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad value '" + value + "' for config key '" + key +
                      "'");
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  ExperimentConfig config;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected `key = value`");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    apply_config_override(config, section.empty() ? key : section + "." + key,
                          value);
  }
  return config;
}

std::string canonical_config_text(const ExperimentConfig& config) {
  std::ostringstream os;
  os.precision(17);
  os << "manifest=" << config.manifest_path << ";system=" << config.system
     << ";seed=" << config.seed << ";fft=" << config.analysis.fft_size
     << ";shift=" << config.analysis.frame_shift_s
     << ";env=" << config.analysis.envelope_order
     << ";lifter=" << config.analysis.cepstral_lifter_order
     << ";gmm_k=" << config.gmm_components << ";mcep=" << config.mcep_order
     << ";lr=" << config.learning_rate << ";mom=" << config.momentum
     << ";batch=" << config.batch_size << ";epochs=" << config.train_epochs
     << ";pre=" << config.pretrain_epochs << ";l1=" << config.l1_lambda
     << ";L=" << config.segment_length << ";N=" << config.duration_frames;
  auto dims = [&](const char* tag, const std::vector<std::size_t>& v) {
    os << ";" << tag << "=";
    for (std::size_t d : v) os << d << ",";
  };
  dims("sp", config.sp_hidden);
  dims("mcep_h", config.mcep_hidden);
  dims("f0_h", config.f0_hidden);
  dims("int_h", config.intensity_hidden);
  dims("dur_h", config.duration_hidden);
  for (const auto& u : config.train_utts) os << ";tr=" << u;
  for (const auto& u : config.test_utts) os << ";te=" << u;
  return os.str();
}

int cmd_extract(const ExperimentConfig& config) {
  config.validate();
  std::vector<ManifestEntry> manifest = read_manifest(config.manifest_path);
  if (manifest.empty()) {
    std::cerr << "error: manifest is empty\n";
    return kExitInvalidConfig;
  }
  fs::create_directories(config.features_dir());
  int jobs = config.deterministic ? 1 : config.jobs;
  std::atomic<std::size_t> failures{0};
  std::atomic<std::size_t> written{0};
  std::mutex log_mutex;

  parallel_for(jobs, manifest.size(), [&](std::size_t idx) {
    const ManifestEntry& entry = manifest[idx];
    for (bool target_side : {false, true}) {
      const char* side = target_side ? "tgt" : "src";
      try {
        std::string env_p = feature_path(config, entry.utt_id, side, "env");
        std::string f0_p = feature_path(config, entry.utt_id, side, "f0");
        std::string int_p = feature_path(config, entry.utt_id, side, "int");
        if (!config.force && fs::exists(env_p) && fs::exists(f0_p) &&
            fs::exists(int_p)) {
          continue;  // idempotent unless forced
        }
        Audio audio =
            read_wav(target_side ? entry.target_wav : entry.source_wav);
        // Labels are validated here so extraction surfaces bad label files
        // early.
        read_phone_labels(target_side ? entry.target_lab : entry.source_lab,
                          config.analysis.frame_shift_s);
        FeatureTrack env = extract_envelope(audio, config.analysis);
        FeatureTrack f0 = extract_f0(audio, config.analysis);
        FeatureTrack intensity = extract_intensity(audio, config.analysis);
        write_track(env, env_p);
        write_track(f0, f0_p);
        write_track(intensity, int_p);
        if (config.dump_text) {
          write_track_text(env, env_p + ".txt");
          write_track_text(f0, f0_p + ".txt");
          write_track_text(intensity, int_p + ".txt");
        }
        written += 3;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "extract failed: " << entry.utt_id << " (" << side
                  << "): " << e.what() << "\n";
        ++failures;
      }
    }
  });
  std::cout << "extract: wrote " << written.load() << " feature files, "
            << failures.load() << " failures\n";
  return failures.load() == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_align(const ExperimentConfig& config) {
  config.validate();
  std::vector<ManifestEntry> manifest = read_manifest(config.manifest_path);
  fs::create_directories(config.align_dir());
  int jobs = config.deterministic ? 1 : config.jobs;
  std::atomic<std::size_t> failures{0};
  std::mutex log_mutex;
  parallel_for(jobs, manifest.size(), [&](std::size_t idx) {
    const ManifestEntry& entry = manifest[idx];
    try {
      SpeakerFeatures src = load_speaker(config, entry, false);
      SpeakerFeatures tgt = load_speaker(config, entry, true);
      ensure_alignment(config, entry, src, tgt);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "align failed: " << entry.utt_id << ": " << e.what()
                << "\n";
      ++failures;
    }
  });
  return failures.load() == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_train(const ExperimentConfig& config) {
  config.validate();
  System system = system_from_name(config.system);
  std::vector<ManifestEntry> manifest = read_manifest(config.manifest_path);
  std::vector<ManifestEntry> train_set = config.train_entries(manifest);
  GatheredData data = gather_training_data(config, train_set);

  fs::create_directories(config.models_dir(system));
  std::ofstream log(fs::path(config.models_dir(system)) / "train_log.txt");

  switch (system) {
    case System::kJdGmm:
      train_jd_gmm(config, data, log);
      break;
    case System::kDnnMcep:
      train_mcep_dnn(config, data, log);
      break;
    case System::kDnnSpRandom:
    case System::kDnnSpDlp:
    case System::kDnnSpAutoencoder:
      train_spectrum_dnn(config, system, data, log);
      break;
    case System::kF0MeanVar:
      save_meanvar(gather_meanvar(data),
                   (fs::path(config.models_dir(system)) / "meanvar.txt")
                       .string());
      log << "meanvar computed from " << train_set.size() << " utterances\n";
      break;
    case System::kF0DnnSegment:
      train_f0_segment(config, data, log);
      break;
    case System::kF0DnnFrame:
      train_f0_frame(config, data, log);
      break;
    case System::kIntensityDnnSegment:
      train_intensity(config, data, log);
      break;
    case System::kDurationDnn:
      train_duration(config, data, log);
      break;
  }
  write_run_meta(config, system);
  std::cout << "train: " << system_name(system) << " done\n";
  return kExitOk;
}

int cmd_convert(const ExperimentConfig& config,
                const std::vector<std::string>& utt_ids) {
  config.validate();
  System system = system_from_name(config.system);
  std::vector<ManifestEntry> manifest = read_manifest(config.manifest_path);
  std::vector<ManifestEntry> targets;
  if (!utt_ids.empty()) {
    for (const std::string& id : utt_ids) {
      auto it = std::find_if(
          manifest.begin(), manifest.end(),
          [&](const ManifestEntry& e) { return e.utt_id == id; });
      if (it == manifest.end()) {
        std::cerr << "error: utterance '" << id << "' not in manifest\n";
        return kExitInvalidConfig;
      }
      targets.push_back(*it);
    }
  } else {
    targets = config.test_entries(manifest);
    if (targets.empty()) targets = manifest;
  }

  LoadedModels models = load_models(config);
  fs::create_directories(config.converted_dir(system));
  int jobs = config.deterministic ? 1 : config.jobs;
  std::atomic<std::size_t> failures{0};
  std::mutex log_mutex;
  parallel_for(jobs, targets.size(), [&](std::size_t idx) {
    const ManifestEntry& entry = targets[idx];
    try {
      SpeakerFeatures src = load_speaker(config, entry, false);
      ConvertedUtterance converted = convert_utterance(config, models, src);
      fs::path dir = config.converted_dir(system);
      write_track(converted.envelope,
                  (dir / (entry.utt_id + "_env.vcft")).string());
      write_track(converted.f0vuv,
                  (dir / (entry.utt_id + "_f0.vcft")).string());
      if (config.write_wav_output) {
        Audio audio = synthesize(converted.envelope, converted.f0vuv,
                                 config.sample_rate, config.analysis,
                                 config.seed);
        write_wav(audio, (dir / (entry.utt_id + ".wav")).string());
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "convert failed: " << entry.utt_id << ": " << e.what()
                << "\n";
      ++failures;
    }
  });
  return failures.load() == 0 ? kExitOk : kExitPartialFailure;
}

EvalReport evaluate_system(const ExperimentConfig& config, System system) {
  std::vector<ManifestEntry> manifest = read_manifest(config.manifest_path);
  std::vector<ManifestEntry> test_set = config.test_entries(manifest);
  if (test_set.empty()) {
    throw ConfigError("evaluate: test split is empty");
  }
  std::vector<UtteranceEval> rows;
  std::size_t env_bins = 0;
  for (const ManifestEntry& entry : test_set) {
    SpeakerFeatures src = load_speaker(config, entry, false);
    SpeakerFeatures tgt = load_speaker(config, entry, true);
    fs::path dir = config.converted_dir(system);
    FeatureTrack conv_env =
        read_track((dir / (entry.utt_id + "_env.vcft")).string());
    FeatureTrack conv_f0 =
        read_track((dir / (entry.utt_id + "_f0.vcft")).string());
    if (conv_env.frames() != src.envelope.frames()) {
      throw ValidationError(
          entry.utt_id + ": converted track is not on the source timeline; "
          "evaluate needs conversion with the duration stage disabled");
    }
    auto [aligned_env, aligned_f0] = align_target_to_source(src, tgt, config);
    env_bins = src.envelope.dim();

    UtteranceEval row;
    row.utt_id = entry.utt_id;
    row.lsd_percent = lsd_ratio(src.envelope, conv_env, aligned_env,
                                SpectrumDomain::kLog);
    std::vector<bool> voiced(src.envelope.frames());
    std::size_t n_voiced = 0;
    for (std::size_t t = 0; t < voiced.size(); ++t) {
      voiced[t] = src.f0vuv.value(t, 1) > 0.5;
      n_voiced += voiced[t] ? 1 : 0;
    }
    if (n_voiced > 0) {
      row.lsd_voiced_percent = lsd_ratio(
          select_frames(src.envelope, voiced), select_frames(conv_env, voiced),
          select_frames(aligned_env, voiced), SpectrumDomain::kLog);
    } else {
      row.lsd_voiced_percent = row.lsd_percent;
    }
    F0RmseResult rmse = f0_rmse(conv_f0, aligned_f0);
    row.f0_rmse_hz = rmse.rmse_hz;
    row.voicing_mismatch_frames = rmse.voicing_mismatch_frames;
    row.frames_evaluated = src.envelope.frames();
    rows.push_back(std::move(row));
  }
  return aggregate_report(std::move(rows), env_bins);
}

int cmd_evaluate(const ExperimentConfig& config, bool write_csv) {
  config.validate();
  System system = system_from_name(config.system);
  EvalReport report = evaluate_system(config, system);
  fs::create_directories(config.reports_dir());
  fs::path base = fs::path(config.reports_dir()) / system_name(system);
  write_report_text(report, base.string() + "_report.txt");
  write_report_kv(report, base.string() + "_report.kv");
  if (write_csv) write_report_csv(report, base.string() + "_report.csv");
  std::cout << system_name(system) << ": LSD " << report.lsd_percent
            << "% | F0 RMSE " << report.f0_rmse_hz << " Hz over "
            << report.per_utterance.size() << " utterances\n";
  return kExitOk;
}

int cmd_make_synthetic(const ExperimentConfig& config,
                       const SyntheticConfig& synth) {
  fs::path dir = fs::path(config.resolved_output_dir()) / "corpus";
  SyntheticCorpus corpus = make_synthetic_corpus(synth, dir.string());
  std::cout << "make-synthetic: " << corpus.utt_ids.size()
            << " utterance pairs under " << dir.string() << "\n"
            << "manifest: " << corpus.manifest_path << "\n";
  return kExitOk;
}

}  // namespace vc
