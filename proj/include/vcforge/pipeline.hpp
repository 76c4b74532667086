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

#ifndef VCFORGE_PIPELINE_HPP_
#define VCFORGE_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vcforge/analysis.hpp"
#include "vcforge/metrics.hpp"
#include "vcforge/synthetic.hpp"

namespace vc {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitInvalidConfig = 2;

enum class System {
  kJdGmm,
  kDnnMcep,
  kDnnSpRandom,
  kDnnSpDlp,
  kDnnSpAutoencoder,
  kF0MeanVar,
  kF0DnnFrame,
  kF0DnnSegment,
  kIntensityDnnSegment,
  kDurationDnn,
};

System system_from_name(const std::string& name);
const std::string& system_name(System system);
const std::vector<System>& all_systems();
bool is_spectrum_system(System system);
bool is_f0_system(System system);

struct ManifestEntry {
  std::string utt_id;
  std::string source_wav, source_lab;
  std::string target_wav, target_lab;
};

std::vector<ManifestEntry> read_manifest(const std::string& path);

// Declarative experiment description: corpus, split, per-module
// hyperparameters, seed. Defaults follow the reference configuration
// (5 ms shift, 1024-point FFT, L = 55, N = 5, 64 mixture components,
// learning rate 0.01, momentum 0.3, 40/20 epoch budgets); desk-scale runs
// override net sizes and epoch counts through the config file or CLI.
struct ExperimentConfig {
  std::string manifest_path;
  std::string output_dir;  // empty: $VCFORGE_WORKDIR or ./vcforge_out
  std::vector<std::string> train_utts;  // empty: all manifest ids not in test
  std::vector<std::string> test_utts;
  std::string system = "DNN-SP-Autoencoder";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool deterministic = false;  // forces single-job ordered execution
  bool force = false;          // rewrite existing artifacts
  bool dump_text = false;      // also write plain-text feature dumps

  AnalysisConfig analysis;
  int sample_rate = 16000;  // for resynthesis output
  std::optional<std::size_t> dtw_band;

  // JD-GMM baseline.
  std::size_t gmm_components = 64;
  std::size_t gmm_max_iterations = 50;
  std::size_t mcep_order = 25;  // truncated-DCT stand-in order

  // Network hyperparameters. Layer widths default to desk scale; the
  // config key `net.preset = paper` switches to the reference sizes
  // (3x3000 spectrum, 2x500 prosody nets).
  double learning_rate = 0.01;
  double momentum = 0.3;
  std::size_t batch_size = 16;
  std::size_t train_epochs = 20;
  std::size_t pretrain_epochs = 40;
  std::size_t dlp_stage_epochs = 5;
  double l1_lambda = 1e-4;
  std::vector<std::size_t> sp_hidden = {256, 256};
  std::vector<std::size_t> mcep_hidden = {50, 50};
  std::vector<std::size_t> f0_hidden = {64, 64};
  std::vector<std::size_t> intensity_hidden = {64, 64};
  std::vector<std::size_t> duration_hidden = {64};

  // Segment-level prosody.
  std::size_t segment_length = 55;  // L
  std::size_t duration_frames = 5;  // N

  // Conversion-stage toggles and the F0 model applied at conversion.
  bool enable_f0 = true;
  bool enable_intensity = true;
  bool enable_duration = true;
  bool write_wav_output = false;
  std::string f0_system = "F0-MeanVar";

  std::string resolved_output_dir() const;
  std::string features_dir() const;
  std::string align_dir() const;
  std::string models_dir(System system) const;
  std::string converted_dir(System system) const;
  std::string reports_dir() const;

  // Train list resolution against the manifest.
  std::vector<ManifestEntry> train_entries(
      const std::vector<ManifestEntry>& manifest) const;
  std::vector<ManifestEntry> test_entries(
      const std::vector<ManifestEntry>& manifest) const;

  void validate() const;
};

// `key = value` file with [section] headers; keys become "section.key".
// Unknown keys raise ConfigError. CLI overrides use the same key names.
ExperimentConfig load_config_file(const std::string& path);
void apply_config_override(ExperimentConfig& config, const std::string& key,
                           const std::string& value);
std::string canonical_config_text(const ExperimentConfig& config);

// Commands. All return exit codes; per-utterance failures are reported on
// stderr and turn into kExitPartialFailure at the end of the run.
int cmd_extract(const ExperimentConfig& config);
int cmd_align(const ExperimentConfig& config);
int cmd_train(const ExperimentConfig& config);
int cmd_convert(const ExperimentConfig& config,
                const std::vector<std::string>& utt_ids = {});
int cmd_evaluate(const ExperimentConfig& config, bool write_csv = false);
int cmd_make_synthetic(const ExperimentConfig& config,
                       const SyntheticConfig& synth);

// The evaluation core, exposed for tests and in-process experiment
// drivers: evaluates one system over the configured test split and returns
// the aggregate report.
EvalReport evaluate_system(const ExperimentConfig& config, System system);

}  // namespace vc

#endif  // VCFORGE_PIPELINE_HPP_
