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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vcforge/common.hpp"
#include "vcforge/pipeline.hpp"

namespace {

struct CliState {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::string system;
  std::string manifest;
  std::string output_dir;
  long long seed = -1;
  int jobs = 0;
  bool deterministic = false;
  bool force = false;
  bool no_f0 = false;
  bool no_intensity = false;
  bool no_duration = false;
};

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--config", state.config_path, "Experiment config file");
  cmd->add_option("--set", state.overrides,
                  "Config override as section.key=value (repeatable)");
  cmd->add_option("--system", state.system, "System identifier");
  cmd->add_option("--manifest", state.manifest, "Corpus manifest file");
  cmd->add_option("--output-dir", state.output_dir,
                  "Output root (default $VCFORGE_WORKDIR)");
  cmd->add_option("--seed", state.seed, "Random seed");
  cmd->add_option("--jobs", state.jobs, "Utterance-level parallelism");
  cmd->add_flag("--deterministic", state.deterministic,
                "Single-job ordered execution");
  cmd->add_flag("--force", state.force, "Rewrite existing artifacts");
  cmd->add_flag("--no-f0", state.no_f0, "Disable the F0 conversion stage");
  cmd->add_flag("--no-intensity", state.no_intensity,
                "Disable the intensity stage");
  cmd->add_flag("--no-duration", state.no_duration,
                "Disable the duration stage");
}

vc::ExperimentConfig build_config(const CliState& state) {
  vc::ExperimentConfig config;
  if (!state.config_path.empty()) {
    config = vc::load_config_file(state.config_path);
  }
  for (const std::string& kv : state.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw vc::ConfigError("--set expects section.key=value, got '" + kv +
                            "'");
    }
    vc::apply_config_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!state.system.empty()) config.system = state.system;
  if (!state.manifest.empty()) config.manifest_path = state.manifest;
  if (!state.output_dir.empty()) config.output_dir = state.output_dir;
  if (state.seed >= 0) config.seed = static_cast<std::uint64_t>(state.seed);
  if (state.jobs > 0) config.jobs = state.jobs;
  if (state.deterministic) config.deterministic = true;
  if (state.force) config.force = true;
  if (state.no_f0) config.enable_f0 = false;
  if (state.no_intensity) config.enable_intensity = false;
  if (state.no_duration) config.enable_duration = false;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vcforge: voice conversion toolkit"};
  app.require_subcommand(1);

  CliState state;
  std::vector<std::string> convert_utts;
  bool eval_csv = false;
  bool wav_out = false;
  long long synth_count = 40;
  long long synth_seed = 1;

  bool dump_text = false;
  CLI::App* extract = app.add_subcommand("extract", "Extract feature tracks");
  add_common_options(extract, state);
  extract->add_flag("--dump-text", dump_text,
                    "Also write plain-text track dumps");

  CLI::App* align = app.add_subcommand("align", "Two-stage DTW alignment");
  add_common_options(align, state);

  CLI::App* train = app.add_subcommand("train", "Train the selected system");
  add_common_options(train, state);

  CLI::App* convert = app.add_subcommand("convert", "Convert utterances");
  add_common_options(convert, state);
  convert->add_option("--utt", convert_utts,
                      "Utterance ids (default: the test split)");
  convert->add_flag("--wav", wav_out, "Also synthesize waveforms");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Objective evaluation");
  add_common_options(evaluate, state);
  evaluate->add_flag("--csv", eval_csv, "Also write per-utterance CSV rows");

  CLI::App* synth =
      app.add_subcommand("make-synthetic", "Generate the synthetic corpus");
  add_common_options(synth, state);
  synth->add_option("--utterances", synth_count, "Utterance pair count");
  synth->add_option("--corpus-seed", synth_seed, "Corpus generation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    vc::ExperimentConfig config = build_config(state);
    if (wav_out) config.write_wav_output = true;
    if (dump_text) config.dump_text = true;
    if (extract->parsed()) return vc::cmd_extract(config);
    if (align->parsed()) return vc::cmd_align(config);
    if (train->parsed()) return vc::cmd_train(config);
    if (convert->parsed()) return vc::cmd_convert(config, convert_utts);
    if (evaluate->parsed()) return vc::cmd_evaluate(config, eval_csv);
    if (synth->parsed()) {
      vc::SyntheticConfig sc;
      sc.seed = static_cast<std::uint64_t>(synth_seed);
      sc.utterance_count = static_cast<std::size_t>(synth_count);
      sc.sample_rate = config.sample_rate;
      return vc::cmd_make_synthetic(config, sc);
    }
  } catch (const vc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return vc::kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vc::kExitPartialFailure;
  }
  return vc::kExitInvalidConfig;
}
