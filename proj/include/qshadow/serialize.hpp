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
// JSON (de)serialization of matrices, channels, and analysis reports.
// Matrix format: {"rows": r, "cols": c, "re": [...], "im": [...]} with the
// entry arrays flat in row-major order.

#pragma once

#include <string>

#include <json.hpp>

#include "qshadow/channel.hpp"
#include "qshadow/denoise.hpp"
#include "qshadow/dense.hpp"

namespace qshadow {

nlohmann::json matrix_to_json(const ComplexMatrixXd& m);
ComplexMatrixXd matrix_from_json(const nlohmann::json& j);

// Channel JSON: {"dim": d, "representation": "kraus"|"choi"|"superoperator",
// and "operators" (list of matrices) or "matrix" accordingly}.
nlohmann::json channel_to_json(const KrausSet<double>& kraus);
nlohmann::json channel_to_json(const ChoiMatrix<double>& choi);
nlohmann::json channel_to_json(const Superoperator<double>& e);

// Reads any of the three representations and converts as needed.
KrausSet<double> kraus_from_json(const nlohmann::json& j);
Superoperator<double> superop_from_json(const nlohmann::json& j);

nlohmann::json spectrum_to_json(const SpectrumClassification<double>& cls);
nlohmann::json denoise_report_to_json(const DenoiseReport<double>& report);

// Reads/writes whole files; errors carry the path.
nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

}  // namespace qshadow
