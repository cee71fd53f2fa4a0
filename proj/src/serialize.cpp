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

#include "qshadow/serialize.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace qshadow {

using nlohmann::json;

json matrix_to_json(const ComplexMatrixXd& m) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrixXd matrix_from_json(const json& j) {
  detail::require(j.is_object() && j.contains("rows") && j.contains("cols") &&
                      j.contains("re") && j.contains("im"),
                  "matrix_from_json: expected {rows, cols, re, im}");
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  detail::require(rows > 0 && cols > 0, "matrix_from_json: nonpositive dimensions");
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  detail::require(static_cast<Index>(re.size()) == rows * cols &&
                      static_cast<Index>(im.size()) == rows * cols,
                  "matrix_from_json: entry count does not match rows*cols");
  ComplexMatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j2 = 0; j2 < cols; ++j2) {
      const auto flat = static_cast<std::size_t>(i * cols + j2);
      m(i, j2) = Complex<double>(re[flat], im[flat]);
    }
  return m;
}

json channel_to_json(const KrausSet<double>& kraus) {
  json ops = json::array();
  for (const auto& op : kraus.operators()) ops.push_back(matrix_to_json(op));
  return json{{"dim", kraus.dim()}, {"representation", "kraus"}, {"operators", ops}};
}

json channel_to_json(const ChoiMatrix<double>& choi) {
  return json{{"dim", choi.dim()},
              {"representation", "choi"},
              {"matrix", matrix_to_json(choi.matrix())}};
}

json channel_to_json(const Superoperator<double>& e) {
  return json{{"dim", e.dim()},
              {"representation", "superoperator"},
              {"matrix", matrix_to_json(e.matrix())}};
}

namespace {

std::string representation_of(const json& j) {
  detail::require(j.is_object() && j.contains("representation") && j.contains("dim"),
                  "channel JSON: expected {dim, representation, ...}");
  return j.at("representation").get<std::string>();
}

}  // namespace

KrausSet<double> kraus_from_json(const json& j) {
  const std::string rep = representation_of(j);
  const auto d = j.at("dim").get<Index>();
  if (rep == "kraus") {
    detail::require(j.contains("operators"), "channel JSON: kraus form needs 'operators'");
    std::vector<ComplexMatrixXd> ops;
    for (const auto& item : j.at("operators")) ops.push_back(matrix_from_json(item));
    KrausSet<double> kraus(std::move(ops));
    detail::require(kraus.dim() == d, "channel JSON: dim does not match operators");
    return kraus;
  }
  if (rep == "choi") {
    ChoiMatrix<double> choi(matrix_from_json(j.at("matrix")));
    detail::require(choi.dim() == d, "channel JSON: dim does not match matrix");
    return kraus_from_choi(choi);
  }
  if (rep == "superoperator") {
    Superoperator<double> e(matrix_from_json(j.at("matrix")));
    detail::require(e.dim() == d, "channel JSON: dim does not match matrix");
    ChoiMatrix<double> choi = reshuffle(e);
    return kraus_from_choi(ChoiMatrix<double>(choi.matrix()));
  }
  throw std::invalid_argument("channel JSON: unknown representation '" + rep + "'");
}

Superoperator<double> superop_from_json(const json& j) {
  const std::string rep = representation_of(j);
  if (rep == "superoperator") {
    Superoperator<double> e(matrix_from_json(j.at("matrix")));
    detail::require(e.dim() == j.at("dim").get<Index>(), "channel JSON: dim mismatch");
    return e;
  }
  return superop_from_kraus(kraus_from_json(j));
}

json spectrum_to_json(const SpectrumClassification<double>& cls) {
  const Index big = cls.eigenvalues.size();
  const auto d = detail::hilbert_dim_of(big, "spectrum_to_json");
  std::vector<double> evals(cls.eigenvalues.data(), cls.eigenvalues.data() + big);
  return json{{"dim", d},
              {"eigenvalues", evals},
              {"top_index", cls.top_index},
              {"intermediate_indices", cls.intermediate_indices},
              {"bulk_indices", cls.bulk_indices},
              {"rank", cls.rank()},
              {"gap_top", cls.gap_top},
              {"gap_bulk", cls.gap_bulk},
              {"ambiguous", cls.ambiguous}};
}

json denoise_report_to_json(const DenoiseReport<double>& report) {
  json lindblads = json::array();
  for (const auto& l : report.lindblads) lindblads.push_back(matrix_to_json(l));
  return json{{"rank", report.rank},
              {"ambiguous", report.ambiguous},
              {"cptp_iterations", report.cptp_iterations},
              {"cptp_converged", report.cptp_converged},
              {"choi_error", report.choi_error},
              {"choi_error_truncated", report.choi_error_truncated},
              {"generator_error", report.generator_error},
              {"k_top_deviation", report.k_top_deviation},
              {"hamiltonian", matrix_to_json(report.hamiltonian.matrix())},
              {"k_matrix", matrix_to_json(report.k_matrix.matrix())},
              {"k_top", matrix_to_json(report.k_top.matrix())},
              {"lindblads", lindblads},
              {"generator", matrix_to_json(report.generator.matrix())},
              {"processed_choi", channel_to_json(report.processed_choi)},
              {"spectrum", spectrum_to_json(report.raw_spectrum)}};
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qshadow
