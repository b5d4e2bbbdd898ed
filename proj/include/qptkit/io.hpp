// Copyright 2026 The qptkit Authors
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


#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"

#include "qptkit/errors.hpp"
#include "qptkit/nvsim.hpp"
#include "qptkit/qpt.hpp"
#include "qptkit/tolerances.hpp"

// JSON exchange formats. Every number is rounded to 6 significant digits
// before it is stored, so write -> read -> write is byte-stable.

namespace qptkit::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kRecordSchema = "qpt-record/1";
inline constexpr const char* kProcessSchema = "qpt-process/1";
inline constexpr const char* kToleranceEnv = "QPTKIT_TOLERANCES";

inline double round6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

/// %.6g text for tables and CSV.
inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

inline json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  const double r = round6(v);
  return r == 0.0 ? 0.0 : r;
}

inline std::string time_key(double t) { return fmt6(t); }

inline json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json complex_json(const CMatrix& m) { return {{"re", matrix_json(real_part(m))}, {"im", matrix_json(imag_part(m))}}; }

inline RMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const char* what) {
  if (!j.is_array() || j.size() != rows) throw data_error(std::string(what) + ": wrong number of rows");
  RMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw data_error(std::string(what) + ": wrong number of columns");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw data_error(std::string(what) + ": non-numeric entry");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline CMatrix complex_from_parts(const RMatrix& re, const RMatrix& im) {
  CMatrix m(re.rows(), re.cols());
  for (std::size_t i = 0; i < re.rows(); ++i)
    for (std::size_t k = 0; k < re.cols(); ++k) m(i, k) = cplx(re(i, k), im(i, k));
  return m;
}

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw data_error(path + ": invalid JSON (" + e.what() + ")");
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << text;
}

// ---- Records ----------------------------------------------------------------

inline json config_json(const SimConfig& c) {
  return {{"t1_ns", std::isinf(c.t1_ns) ? json("inf") : number(c.t1_ns)},
          {"t2_ns", number(c.t2_ns)},
          {"detuning", number(c.detuning)},
          {"alpha", number(c.alpha)},
          {"rabi_frequency", number(c.rabi_frequency)},
          {"pi_pulse_ns", number(c.pi_pulse_ns())},
          {"shots", c.shots},
          {"pulse_error", number(c.pulse_error)},
          {"fold_polarization", c.fold_polarization}};
}

inline json optional_number(std::optional<double> v) { return v ? number(*v) : json(nullptr); }

inline json record_json(const ExperimentRecord& rec, const json& config_override = nullptr) {
  json times = json::array();
  for (double t : rec.times_ns) times.push_back(number(t));
  json inputs = json::array();
  for (const char* l : InputStateSet::kLabels) inputs.push_back(l);
  json ex = json::object();
  for (std::size_t j = 0; j < 4; ++j) {
    json per_time = json::object();
    for (std::size_t m = 0; m < rec.times_ns.size(); ++m) {
      const auto& e = rec.expectations[j][m];
      per_time[time_key(rec.times_ns[m])] = {
          {"sx", optional_number(e.sx)}, {"sy", optional_number(e.sy)}, {"sz", optional_number(e.sz)}};
    }
    ex[InputStateSet::kLabels[j]] = std::move(per_time);
  }
  json cfg = !config_override.is_null() ? config_override : rec.has_config ? config_json(rec.config) : json::object();
  return {{"schema", kRecordSchema},
          {"times_ns", std::move(times)},
          {"inputs", std::move(inputs)},
          {"expectations", std::move(ex)},
          {"config", std::move(cfg)},
          {"seed", rec.seed ? json(*rec.seed) : json(nullptr)}};
}

struct RecordFile {
  ExperimentRecord record;
  json config;  // echoed verbatim
};

inline std::optional<double> read_expectation(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw data_error(where + ": " + key + " must be a number or null");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw data_error(where + ": non-finite expectation");
  return v;
}

inline RecordFile record_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kRecordSchema) {
    throw data_error(std::string("record: schema tag must be \"") + kRecordSchema + "\"");
  }
  RecordFile f;
  auto& rec = f.record;
  if (!j.contains("times_ns") || !j["times_ns"].is_array() || j["times_ns"].empty()) {
    throw data_error("record: times_ns must be a non-empty array");
  }
  for (const auto& t : j["times_ns"]) {
    if (!t.is_number()) throw data_error("record: times_ns must be numeric");
    const double v = t.get<double>();
    if (!rec.times_ns.empty() && !(v > rec.times_ns.back())) throw data_error("record: times must be strictly increasing");
    rec.times_ns.push_back(v);
  }
  const json& inputs = j.value("inputs", json::array());
  if (inputs.size() != 4) throw data_error("record: inputs must be exactly z+, z-, x+, y+");
  for (std::size_t k = 0; k < 4; ++k) {
    if (!inputs[k].is_string() || inputs[k].get<std::string>() != InputStateSet::kLabels[k]) {
      throw data_error("record: inputs must be exactly z+, z-, x+, y+");
    }
  }
  const json& ex = j.value("expectations", json::object());
  for (std::size_t k = 0; k < 4; ++k) {
    const char* label = InputStateSet::kLabels[k];
    if (!ex.contains(label)) throw data_error(std::string("record: no expectations for input ") + label);
    for (double t : rec.times_ns) {
      const std::string key = time_key(t);
      const std::string where = std::string("record ") + label + " @ " + key + " ns";
      if (!ex[label].contains(key)) throw data_error(where + ": missing");
      const json& e = ex[label][key];
      PauliExpectations p{read_expectation(e, "sx", where), read_expectation(e, "sy", where),
                          read_expectation(e, "sz", where)};
      for (auto v : {p.sx, p.sy, p.sz})
        if (v && std::abs(*v) > 1.5) throw data_error(where + ": expectation outside [-1, 1]");
      rec.expectations[k].push_back(p);
    }
  }
  f.config = j.value("config", json::object());
  rec.has_config = false;
  if (j.contains("seed") && j["seed"].is_number_unsigned()) rec.seed = j["seed"].get<std::uint64_t>();
  return f;
}

inline RecordFile read_record(const std::string& path) { return record_from_json(parse_file(path)); }

/// Folded records carry alpha in their config; anything else is returned unchanged.
inline ExperimentRecord analysis_record(const RecordFile& f) {
  const json& c = f.config;
  if (c.is_object() && c.value("fold_polarization", false)) {
    if (!c.contains("alpha") || !c["alpha"].is_number()) throw data_error("record: folded record without alpha");
    return unfold_polarization(f.record, c["alpha"].get<double>());
  }
  return f.record;
}

// ---- Process files ------------------------------------------------------------

struct ProcessFile {
  ChiMatrix chi;
  json diagnostics = json::object();
};

inline json process_json(const ChiMatrix& chi, const json& diagnostics) {
  // Round chi first so the affine block is exactly what a reader recomputes.
  CMatrix m = to_normal_basis(chi).matrix();
  for (auto& v : m.data()) v = cplx(round6(v.real()), round6(v.imag()));
  const ChiMatrix normal(m, OperatorBasis::normal(), 1e-5);
  return {{"schema", kProcessSchema},
          {"basis", "normal"},
          {"chi_re", matrix_json(real_part(normal.matrix()))},
          {"chi_im", matrix_json(imag_part(normal.matrix()))},
          {"affine", matrix_json(chi_to_affine(normal).matrix())},
          {"diagnostics", diagnostics}};
}

inline ProcessFile process_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kProcessSchema) {
    throw data_error(std::string("process: schema tag must be \"") + kProcessSchema + "\"");
  }
  const std::string basis_name = j.value("basis", "");
  OperatorBasis basis = OperatorBasis::normal();
  if (basis_name == "pauli") basis = OperatorBasis::pauli();
  else if (basis_name != "normal") throw data_error("process: unknown basis \"" + basis_name + "\"");
  const CMatrix m = complex_from_parts(matrix_from_json(j.value("chi_re", json()), 4, 4, "chi_re"),
                                       matrix_from_json(j.value("chi_im", json()), 4, 4, "chi_im"));
  // Six printed digits leave Hermiticity defects of order 1e-6.
  try {
    ProcessFile f{ChiMatrix(m, basis, 1e-5), j.value("diagnostics", json::object())};
    return f;
  } catch (const invalid_argument& e) {
    throw data_error(std::string("process: ") + e.what());
  }
}

inline ProcessFile read_process(const std::string& path) { return process_from_json(parse_file(path)); }

// ---- Tolerances -----------------------------------------------------------------

/// kDefaultTolerances with any fields named in the JSON object replaced.
inline Tolerances tolerances_from_json(const json& j) {
  Tolerances t;
  if (!j.is_object()) throw data_error("tolerances: expected a JSON object");
  const std::pair<const char*, double Tolerances::*> fields[] = {
      {"hermitian", &Tolerances::hermitian},
      {"psd_pivot", &Tolerances::psd_pivot},
      {"pinv_relative", &Tolerances::pinv_relative},
      {"log_branch", &Tolerances::log_branch},
      {"jacobi_off_diagonal", &Tolerances::jacobi_off_diagonal},
      {"state_hermitian", &Tolerances::state_hermitian},
      {"state_trace", &Tolerances::state_trace},
      {"state_min_eig", &Tolerances::state_min_eig},
      {"bloch_norm", &Tolerances::bloch_norm},
      {"kraus_negative_eig", &Tolerances::kraus_negative_eig},
      {"ellipsoid_violation", &Tolerances::ellipsoid_violation},
      {"projection_lagrange", &Tolerances::projection_lagrange},
      {"projection_min_eig", &Tolerances::projection_min_eig},
      {"projection_tp_defect", &Tolerances::projection_tp_defect},
      {"gks_negative_eig", &Tolerances::gks_negative_eig},
      {"lindblad_drop_relative", &Tolerances::lindblad_drop_relative},
      {"propagator_trace", &Tolerances::propagator_trace},
  };
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, member] : fields) {
      if (key != name) continue;
      if (!value.is_number()) throw data_error("tolerances: " + key + " must be numeric");
      t.*member = value.get<double>();
      known = true;
    }
    if (!known) throw data_error("tolerances: unknown key " + key);
  }
  return t;
}

/// Defaults, or the table named by $QPTKIT_TOLERANCES when set.
inline Tolerances load_tolerances() {
  const char* path = std::getenv(kToleranceEnv);
  if (path == nullptr || *path == '\0') return kDefaultTolerances;
  return tolerances_from_json(parse_file(path));
}

}  // namespace qptkit::io
