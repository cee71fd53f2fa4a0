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

#include "qshadow/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "qshadow/regression.hpp"
#include "qshadow/serialize.hpp"
#include "qshadow/shadows.hpp"

namespace qshadow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

// Deterministic float formatting for CSV output (shortest form that
// round-trips is not needed; 17 significant digits always round-trip).
std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::uint64_t resolved_model_seed(const ExperimentConfig& config) {
  if (config.model_seed) return *config.model_seed;
  // Fixed tag so the channel draw is decoupled from the sampling streams.
  return derive_seed(config.master_seed, {0x6d6f64656cULL});
}

void validate_config(const ExperimentConfig& config) {
  const std::set<std::string> known = {"pauli3q", "random_qudit", "custom"};
  detail::require(known.count(config.scenario) == 1,
                  "config: unknown scenario '" + config.scenario +
                      "' (expected pauli3q, random_qudit, or custom)");
  if (config.scenario == "pauli3q")
    detail::require(config.d == 8, "config: scenario pauli3q is three qubits; d must be 8");
  if (config.scenario == "random_qudit") {
    detail::require(config.d >= 2, "config: d must be >= 2");
    detail::require(config.n_lindblads >= 1 && config.n_lindblads <= config.d * config.d - 1,
                    "config: n_lindblads must be in [1, d^2-1]");
  }
  if (config.scenario == "custom")
    detail::require(!config.channel_file.empty(),
                    "config: scenario custom requires channel_file");
  detail::require(config.p > 0 && config.p < 1, "config: p must be in (0,1)");
  detail::require(config.dt > 0, "config: dt must be positive");
  detail::require(!config.samples_per_input.empty(), "config: samples_per_input is empty");
  Index prev = 0;
  for (Index n : config.samples_per_input) {
    detail::require(n >= 1, "config: samples_per_input entries must be >= 1");
    detail::require(n > prev, "config: samples_per_input must be strictly ascending");
    prev = n;
  }
  if (config.rank_hint)
    detail::require(*config.rank_hint >= 1 && *config.rank_hint <= config.d * config.d,
                    "config: rank_hint must be in [1, d^2]");
  detail::require(!config.output_dir.empty(), "config: output_dir is empty");
}

json config_to_json(const ExperimentConfig& config) {
  json j{{"scenario", config.scenario},
         {"d", config.d},
         {"p", config.p},
         {"dt", config.dt},
         {"samples_per_input", config.samples_per_input},
         {"master_seed", config.master_seed},
         {"output_dir", config.output_dir},
         {"log_measurements", config.log_measurements}};
  j["rank_hint"] = config.rank_hint ? json(*config.rank_hint) : json(nullptr);
  if (config.scenario == "random_qudit") {
    j["n_lindblads"] = config.n_lindblads;
    j["model_seed"] = resolved_model_seed(config);
  }
  if (config.scenario == "custom") j["channel_file"] = config.channel_file;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  detail::require(j.is_object(), "config: expected a JSON object");
  const std::set<std::string> known = {
      "scenario",    "d",          "n_lindblads",       "p",         "dt",
      "samples_per_input", "master_seed", "model_seed", "rank_hint", "output_dir",
      "channel_file", "log_measurements", "n_threads"};
  for (const auto& [key, value] : j.items())
    detail::require(known.count(key) == 1, "config: unknown key '" + key + "'");

  ExperimentConfig config;
  if (j.contains("scenario")) config.scenario = j.at("scenario").get<std::string>();
  if (j.contains("d")) config.d = j.at("d").get<Index>();
  if (j.contains("n_lindblads")) config.n_lindblads = j.at("n_lindblads").get<Index>();
  if (j.contains("p")) config.p = j.at("p").get<double>();
  if (j.contains("dt")) config.dt = j.at("dt").get<double>();
  if (j.contains("samples_per_input")) {
    const auto& s = j.at("samples_per_input");
    config.samples_per_input.clear();
    if (s.is_array())
      for (const auto& item : s) config.samples_per_input.push_back(item.get<Index>());
    else
      config.samples_per_input.push_back(s.get<Index>());
  }
  if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("model_seed") && !j.at("model_seed").is_null())
    config.model_seed = j.at("model_seed").get<std::uint64_t>();
  if (j.contains("rank_hint") && !j.at("rank_hint").is_null())
    config.rank_hint = j.at("rank_hint").get<Index>();
  if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("channel_file")) config.channel_file = j.at("channel_file").get<std::string>();
  if (j.contains("log_measurements"))
    config.log_measurements = j.at("log_measurements").get<bool>();
  if (j.contains("n_threads")) config.n_threads = j.at("n_threads").get<unsigned>();
  return config;
}

ScenarioTruth build_scenario_truth(const ExperimentConfig& config) {
  if (config.scenario == "custom") {
    KrausSet<double> kraus = kraus_from_json(load_json(config.channel_file));
    ChoiMatrix<double> choi = choi_from_kraus(kraus);
    const Index rank = kraus.rank();
    return ScenarioTruth{std::move(kraus), GroundTruth<double>{std::move(choi), std::nullopt},
                         rank};
  }

  const double rate = config.p / config.dt;
  std::optional<LindbladModel<double>> model;
  if (config.scenario == "pauli3q") {
    const Index d = 8;
    // H = Z on the first qubit; jump operators X_i / sqrt(3) on each qubit.
    ComplexMatrixXd h = ComplexMatrixXd::Zero(d, d);
    for (Index b = 0; b < d; ++b) h(b, b) = ((b >> 2) & 1) ? -1.0 : 1.0;
    std::vector<ComplexMatrixXd> ls;
    const double w = 1.0 / std::sqrt(3.0);
    for (Index q = 0; q < 3; ++q) {
      const Index bit = Index(1) << (2 - q);
      ComplexMatrixXd x = ComplexMatrixXd::Zero(d, d);
      for (Index b = 0; b < d; ++b) x(b ^ bit, b) = w;
      ls.push_back(std::move(x));
    }
    model.emplace(HermitianOperator<double>(std::move(h)), std::move(ls), rate, config.dt);
  } else {
    Xoshiro256StarStar rng(resolved_model_seed(config));
    model.emplace(
        random_lindblad_model<double>(config.d, config.n_lindblads, rate, config.dt, rng));
  }

  KrausSet<double> kraus = build_discrete_lindblad(*model);
  ChoiMatrix<double> choi = choi_from_kraus(kraus);
  Generator<double> gen = generator_from_model(*model);
  const Index rank = kraus.rank();
  return ScenarioTruth{std::move(kraus),
                       GroundTruth<double>{std::move(choi), std::move(gen)}, rank};
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  detail::require(xs.size() == ys.size() && xs.size() >= 2,
                  "fit_loglog_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    detail::require(xs[i] > 0 && ys[i] > 0, "fit_loglog_slope: data must be positive");
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const auto n = static_cast<double>(xs.size());
  const double denom = n * sxx - sx * sx;
  detail::require(std::abs(denom) > 1e-12, "fit_loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

void emit_histogram(const SpectrumClassification<double>& cls, double sigma_hat,
                    const std::string& path, Index n_bins) {
  detail::require(n_bins >= 2, "emit_histogram: need at least two bins");
  auto out = open_out(path);
  out << "bin_center,count,class,semicircle\n";

  const double radius = 2.0 * sigma_hat;
  const double window = sigma_hat > 0 ? 1.5 * radius : 1.0;
  const double width = 2.0 * window / static_cast<double>(n_bins);
  const auto bulk_n = static_cast<double>(cls.bulk_indices.size());

  auto bin_of = [&](double x) {
    return static_cast<Index>(std::floor((x + window) / width));
  };
  auto class_of = [&](Index i) -> const char* {
    if (i == cls.top_index) return "top";
    for (Index k : cls.intermediate_indices)
      if (k == i) return "intermediate";
    return "bulk";
  };

  std::vector<std::vector<Index>> counts(3, std::vector<Index>(n_bins, 0));
  auto class_row = [](const char* c) {
    return std::string(c) == "top" ? 0 : (std::string(c) == "intermediate" ? 1 : 2);
  };
  struct Outlier {
    double value;
    const char* cls;
  };
  std::vector<Outlier> outliers;
  for (Index i = 0; i < cls.eigenvalues.size(); ++i) {
    const double x = cls.eigenvalues[i];
    const char* c = class_of(i);
    if (x <= -window || x >= window) {
      outliers.push_back({x, c});
      continue;
    }
    const Index b = std::clamp<Index>(bin_of(x), 0, n_bins - 1);
    ++counts[class_row(c)][b];
  }

  const char* names[3] = {"top", "intermediate", "bulk"};
  for (Index b = 0; b < n_bins; ++b) {
    const double center = -window + (static_cast<double>(b) + 0.5) * width;
    const double expected =
        sigma_hat > 0 ? bulk_n * width * semicircle_pdf(center, sigma_hat) : 0.0;
    for (int c = 0; c < 3; ++c) {
      if (c != 2 && counts[c][b] == 0) continue;  // signal rows only where present
      out << fmt(center) << ',' << counts[c][b] << ',' << names[c] << ',' << fmt(expected)
          << '\n';
    }
  }
  std::sort(outliers.begin(), outliers.end(),
            [](const Outlier& a, const Outlier& b) { return a.value < b.value; });
  for (const auto& o : outliers) out << fmt(o.value) << ",1," << o.cls << ",0\n";
}

void emit_error_curve(const std::vector<ErrorPoint>& points, const std::string& path) {
  auto out = open_out(path);
  out << "n,choi_error,generator_error\n";
  std::vector<double> ns, choi, gen;
  for (const auto& pt : points) {
    out << pt.samples_per_input << ',' << fmt(pt.choi_error) << ',' << fmt(pt.generator_error)
        << '\n';
    if (pt.samples_per_input > 0 && pt.choi_error > 0 && std::isfinite(pt.choi_error)) {
      ns.push_back(static_cast<double>(pt.samples_per_input));
      choi.push_back(pt.choi_error);
      if (pt.generator_error > 0 && std::isfinite(pt.generator_error))
        gen.push_back(pt.generator_error);
    }
  }
  if (ns.size() >= 2) {
    out << "# loglog_slope_choi " << fmt(fit_loglog_slope(ns, choi)) << '\n';
    if (gen.size() == ns.size())
      out << "# loglog_slope_generator " << fmt(fit_loglog_slope(ns, gen)) << '\n';
  }
}

namespace {

void write_measurements_csv(const std::vector<MeasurementRecord>& records,
                            const std::string& path) {
  auto out = open_out(path);
  out << "input_index,sample_index,outcome\n";
  Index current_input = -1;
  Index sample_index = 0;
  for (const auto& r : records) {
    if (r.input_index != current_input) {
      current_input = r.input_index;
      sample_index = 0;
    }
    out << r.input_index << ',' << sample_index++ << ',' << r.outcome << '\n';
  }
}

}  // namespace

RunArtifact run_scenario(const ExperimentConfig& config) {
  stage("config", [&] { validate_config(config); });
  const auto t0 = std::chrono::steady_clock::now();

  RunArtifact artifact;
  artifact.output_dir = config.output_dir;
  stage("io", [&] { fs::create_directories(config.output_dir); });
  auto path_of = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  const ScenarioTruth scenario = stage("channel_model", [&] {
    return build_scenario_truth(config);
  });
  const Index d = scenario.kraus.dim();

  const InputStateSet<double> inputs =
      stage("shadow_sim", [&] { return ic_input_states<double>(d); });

  std::optional<ChoiMatrix<double>> last_choi;
  std::optional<SpectrumClassification<double>> last_cls;
  std::optional<DenoiseReport<double>> last_report;
  Index last_samples = 0;
  std::vector<MeasurementRecord> records;

  for (std::size_t point = 0; point < config.samples_per_input.size(); ++point) {
    const Index samples = config.samples_per_input[point];
    const std::uint64_t point_seed =
        derive_seed(config.master_seed, {static_cast<std::uint64_t>(point)});

    const std::vector<ComplexMatrixXd> outputs = stage("shadow_sim", [&] {
      return estimate_all_outputs(scenario.kraus, inputs, samples, point_seed, config.n_threads,
                                  config.log_measurements ? &records : nullptr);
    });
    const Superoperator<double> estimate = stage("regression", [&] {
      return ls_channel_estimate(make_covariance_pair(inputs.states, outputs));
    });
    DenoiseReport<double> report = stage("spectral_denoise", [&] {
      return denoise_pipeline(estimate, config.dt, config.rank_hint, &scenario.truth);
    });
    artifact.errors.push_back(
        {samples, report.choi_error, report.generator_error});

    if (point + 1 == config.samples_per_input.size()) {
      last_choi.emplace(reshuffle(estimate));
      last_cls.emplace(report.raw_spectrum);
      last_report.emplace(std::move(report));
      last_samples = samples;
    }
  }

  // Random-matrix diagnostics on the final (largest-n) estimate.
  const json rmt = stage("rmt_diag", [&] {
    const auto& cls = *last_cls;
    const Index total_samples = last_samples * static_cast<Index>(inputs.states.size());
    json out{{"n", total_samples}, {"dim", d}};
    if (static_cast<Index>(cls.bulk_indices.size()) >= 8) {
      const BulkParams<double> bulk = estimate_bulk_params(cls, total_samples);
      std::vector<double> bulk_vals;
      for (Index i : cls.bulk_indices) bulk_vals.push_back(cls.eigenvalues[i]);
      double edge = 0;
      for (double v : bulk_vals) edge = std::max(edge, std::abs(v));
      out["D"] = bulk.bulk_count;
      out["a_hat"] = bulk.a_hat;
      out["sigma_hat"] = bulk.sigma_hat;
      out["sigma_pred"] = predicted_sigma(bulk.bulk_count, total_samples, bulk.a_hat);
      out["bulk_edge_observed"] = edge;
      out["bulk_edge_predicted"] = 2.0 * bulk.sigma_hat;
      out["ks_distance"] = ks_distance(bulk_vals, bulk.sigma_hat);
      out["min_samples"] =
          min_samples(bulk.bulk_count, bulk.a_hat, config.dt, 1.0);

      std::vector<Index> signal;
      for (Index i = 0; i < scenario.rank; ++i) signal.push_back(i);
      const double expected_noise_sq =
          static_cast<double>(bulk.bulk_count) * static_cast<double>(bulk.bulk_count) *
          bulk.a_hat * bulk.a_hat / static_cast<double>(total_samples);
      DavisKahanReport<double> dk;
      double epsilon = std::numeric_limits<double>::quiet_NaN();
      {
        // First pass to learn g, then fix epsilon at the 90% Markov level.
        const DavisKahanReport<double> probe =
            davis_kahan_bound(scenario.truth.choi, *last_choi, signal);
        if (!probe.vacuous) epsilon = 10.0 * expected_noise_sq / (probe.g * probe.g);
        dk = davis_kahan_bound(scenario.truth.choi, *last_choi, signal, expected_noise_sq,
                               epsilon);
      }
      out["dk"] = json{{"g", dk.g},
                       {"observed", dk.observed},
                       {"bound", dk.bound},
                       {"noise_norm_sq", dk.noise_norm_sq},
                       {"expected_noise_sq", expected_noise_sq},
                       {"vacuous", dk.vacuous},
                       {"markov_epsilon", dk.markov_epsilon},
                       {"markov_prob_lower", dk.markov_prob_lower}};
      artifact.bulk_count = bulk.bulk_count;
      artifact.ks_distance = out["ks_distance"].get<double>();
    } else {
      out["D"] = static_cast<Index>(cls.bulk_indices.size());
      out["note"] = "bulk too small for semicircle diagnostics";
    }
    return out;
  });

  stage("io", [&] {
    save_json(config_to_json(config), path_of("config.json"));
    save_json(spectrum_to_json(*last_cls), path_of("spectrum.json"));
    save_json(denoise_report_to_json(*last_report), path_of("denoise.json"));
    save_json(rmt, path_of("rmt.json"));
    double sigma_hat = 0;
    if (static_cast<Index>(last_cls->bulk_indices.size()) >= 8)
      sigma_hat = estimate_bulk_params(*last_cls, last_samples *
                                                      static_cast<Index>(inputs.states.size()))
                      .sigma_hat;
    emit_histogram(*last_cls, sigma_hat, path_of("histogram.csv"));
    emit_error_curve(artifact.errors, path_of("errors.csv"));
    if (config.log_measurements) write_measurements_csv(records, path_of("measurements.csv"));

    artifact.files = {"config.json", "spectrum.json", "denoise.json",
                      "rmt.json",    "histogram.csv", "errors.csv"};
    if (config.log_measurements) artifact.files.push_back("measurements.csv");
    artifact.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json meta{{"files", artifact.files}, {"wall_seconds", artifact.wall_seconds}};
    save_json(meta, path_of("artifact.json"));
    artifact.files.push_back("artifact.json");
  });

  artifact.classified_rank = last_report->rank;
  artifact.ambiguous = last_report->ambiguous;
  artifact.choi_error = last_report->choi_error;
  artifact.generator_error = last_report->generator_error;
  return artifact;
}

RunArtifact run_exact_spectrum(const ExperimentConfig& config) {
  stage("config", [&] { validate_config(config); });
  RunArtifact artifact;
  artifact.output_dir = config.output_dir;
  stage("io", [&] { fs::create_directories(config.output_dir); });
  const ScenarioTruth scenario =
      stage("channel_model", [&] { return build_scenario_truth(config); });
  const SpectrumClassification<double> cls = stage("spectral_denoise", [&] {
    return classify_spectrum(scenario.truth.choi, config.rank_hint, config.dt);
  });
  stage("io", [&] {
    const auto dir = fs::path(config.output_dir);
    save_json(config_to_json(config), (dir / "config.json").string());
    save_json(spectrum_to_json(cls), (dir / "spectrum.json").string());
    emit_histogram(cls, 0.0, (dir / "histogram.csv").string());
  });
  artifact.files = {"config.json", "spectrum.json", "histogram.csv"};
  artifact.classified_rank = cls.rank();
  artifact.ambiguous = cls.ambiguous;
  return artifact;
}

}  // namespace qshadow
