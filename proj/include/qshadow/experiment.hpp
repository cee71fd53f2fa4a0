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
// End-to-end experiment driver: scenario construction, shadow sampling,
// regression, denoising, random-matrix diagnostics, and artifact emission.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qshadow/channel.hpp"
#include "qshadow/denoise.hpp"
#include "qshadow/dense.hpp"
#include "qshadow/rmt.hpp"

namespace qshadow {

struct ExperimentConfig {
  // "pauli3q": three-qubit mixed-unitary benchmark (d = 8, rank 4).
  // "random_qudit": random dissipative model with n_lindblads jump operators.
  // "custom": channel loaded from channel_file (kraus/choi/superoperator JSON).
  std::string scenario = "pauli3q";
  Index d = 8;
  Index n_lindblads = 5;
  double p = 0.1;   // per-step jump probability; the jump rate is p/dt
  double dt = 0.1;  // step size of the discretized evolution
  std::vector<Index> samples_per_input = {10000};  // one entry per sweep point, ascending
  std::uint64_t master_seed = 42;
  std::optional<std::uint64_t> model_seed;  // random_qudit draw; derived from master_seed if unset
  std::optional<Index> rank_hint;           // spectrum split; automatic scan if unset
  std::string output_dir = "qshadow_out";
  std::string channel_file;       // custom scenario only
  bool log_measurements = false;  // write measurements.csv (large)
  // Worker count for sampling; 0 = hardware concurrency. Execution knob
  // only: results are bit-identical for any value, and it is deliberately
  // not part of the canonical config echo.
  unsigned n_threads = 0;
};

// Throws std::invalid_argument with a diagnostic on any bad field.
void validate_config(const ExperimentConfig& config);

// Canonical echo: resolved model_seed, sorted keys, no execution knobs.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Resolved seed for the random_qudit channel draw.
std::uint64_t resolved_model_seed(const ExperimentConfig& config);

// Error raised by run_scenario, tagged with the pipeline stage that failed.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage_name, const std::string& message)
      : std::runtime_error("[" + stage_name + "] " + message), stage_(std::move(stage_name)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ScenarioTruth {
  KrausSet<double> kraus;
  GroundTruth<double> truth;
  Index rank = 0;  // Kraus rank of the true channel
};

ScenarioTruth build_scenario_truth(const ExperimentConfig& config);

struct ErrorPoint {
  Index samples_per_input = 0;
  double choi_error = 0;
  double generator_error = 0;
};

struct RunArtifact {
  std::string output_dir;
  std::vector<std::string> files;  // file names relative to output_dir
  double wall_seconds = 0;
  std::vector<ErrorPoint> errors;
  // Summary of the largest sweep point, for programmatic consumers.
  Index classified_rank = 0;
  bool ambiguous = false;
  Index bulk_count = 0;
  double ks_distance = 0;
  double choi_error = 0;
  double generator_error = 0;
};

// Runs every sweep point of the configured experiment and writes
// config.json, spectrum.json, histogram.csv, denoise.json, rmt.json,
// errors.csv, artifact.json (and optionally measurements.csv) into
// output_dir. Point k samples with the stream hash(master_seed, k); file
// bytes are independent of n_threads (artifact.json's wall time excepted).
RunArtifact run_scenario(const ExperimentConfig& config);

// Classifies the exact channel spectrum (no sampling) and writes
// spectrum.json and histogram.csv.
RunArtifact run_exact_spectrum(const ExperimentConfig& config);

// Least-squares slope of log(y) against log(x); requires positive data.
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// histogram.csv: rows "bin_center,count,class,semicircle" where `semicircle`
// is the expected bulk count per bin for the fitted scale. Bins cover 1.5x
// the fitted bulk radius; signal eigenvalues outside get one row each.
void emit_histogram(const SpectrumClassification<double>& cls, double sigma_hat,
                    const std::string& path, Index n_bins = 40);

// errors.csv: rows "n,choi_error,generator_error" (n = samples per input),
// followed by "# loglog_slope_*" comment lines when the sweep has >= 2
// points with positive errors.
void emit_error_curve(const std::vector<ErrorPoint>& points, const std::string& path);

}  // namespace qshadow
