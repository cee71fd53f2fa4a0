// Copyright 2026 The qshadow authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// qshadow: simulate shadow tomography of a low-rank dissipative channel,
// estimate the channel by least squares, denoise its Choi spectrum, and
// report the recovered Hamiltonian/jump operators plus random-matrix
// diagnostics.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qshadow/experiment.hpp"
#include "qshadow/serialize.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> samples;
  std::optional<std::string> scenario;
  std::optional<qshadow::Index> rank_hint;
  std::optional<unsigned> threads;
};

std::vector<qshadow::Index> parse_samples(const std::string& text) {
  std::vector<qshadow::Index> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string token = text.substr(pos, next - pos);
    if (token.empty()) throw std::invalid_argument("--samples: empty entry in '" + text + "'");
    std::size_t used = 0;
    const long long value = std::stoll(token, &used);
    if (used != token.size() || value <= 0)
      throw std::invalid_argument("--samples: bad entry '" + token + "'");
    out.push_back(static_cast<qshadow::Index>(value));
    pos = next + 1;
  }
  if (out.empty()) throw std::invalid_argument("--samples: no entries");
  return out;
}

qshadow::ExperimentConfig resolve_config(const CliOverrides& cli) {
  qshadow::ExperimentConfig config;
  if (!cli.config_path.empty())
    config = qshadow::config_from_json(qshadow::load_json(cli.config_path));
  if (cli.seed) config.master_seed = *cli.seed;
  if (cli.out_dir) config.output_dir = *cli.out_dir;
  if (cli.samples) config.samples_per_input = parse_samples(*cli.samples);
  if (cli.scenario) config.scenario = *cli.scenario;
  if (cli.rank_hint) config.rank_hint = *cli.rank_hint;
  if (cli.threads) config.n_threads = *cli.threads;
  return config;
}

void add_common_options(CLI::App* cmd, CliOverrides& cli) {
  cmd->add_option("--config", cli.config_path, "Experiment config JSON file");
  cmd->add_option("--seed", cli.seed, "Master seed (overrides config)");
  cmd->add_option("--out", cli.out_dir, "Output directory (overrides config)");
  cmd->add_option("--samples", cli.samples,
                  "Samples per input state: single count or comma-separated ascending sweep");
  cmd->add_option("--scenario", cli.scenario, "Scenario: pauli3q | random_qudit | custom");
  cmd->add_option("--rank-hint", cli.rank_hint, "Known signal rank for spectrum splitting");
  cmd->add_option("--threads", cli.threads,
                  "Sampling worker count (0 = hardware); never changes results");
}

int report_success(const qshadow::RunArtifact& artifact) {
  std::cout << "wrote " << artifact.output_dir << "/{";
  for (std::size_t i = 0; i < artifact.files.size(); ++i)
    std::cout << (i ? "," : "") << artifact.files[i];
  std::cout << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Shadow-tomography simulation and eigenstructure recovery of low-rank "
      "dissipative quantum channels"};
  app.require_subcommand(1);

  CliOverrides cli;
  CLI::App* run = app.add_subcommand("run", "Run the configured experiment end to end");
  add_common_options(run, cli);
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run an ascending sample-count sweep (needs >= 2 points)");
  add_common_options(sweep, cli);
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Classify the exact channel spectrum without sampling");
  add_common_options(spectrum, cli);
  CLI::App* validate =
      app.add_subcommand("validate-config", "Validate a config file and print its canonical form");
  add_common_options(validate, cli);

  CLI11_PARSE(app, argc, argv);

  try {
    const qshadow::ExperimentConfig config = resolve_config(cli);
    if (validate->parsed()) {
      qshadow::validate_config(config);
      std::cout << qshadow::config_to_json(config).dump(2) << '\n';
      return 0;
    }
    if (spectrum->parsed()) return report_success(qshadow::run_exact_spectrum(config));
    if (sweep->parsed() && config.samples_per_input.size() < 2) {
      std::cerr << "error [config]: sweep needs at least two samples_per_input points\n";
      return 1;
    }
    return report_success(qshadow::run_scenario(config));
  } catch (const qshadow::StageError& e) {
    std::cerr << "error " << e.what() << '\n';
    // Config mistakes are usage errors (1); later stages are runtime errors (2).
    return e.stage() == "config" ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error [config]: " << e.what() << '\n';
    return 1;
  }
}
