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
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qptkit/cpfit.hpp"
#include "qptkit/errors.hpp"
#include "qptkit/io.hpp"
#include "qptkit/lindblad.hpp"
#include "qptkit/nvsim.hpp"
#include "qptkit/qpt.hpp"
#include "qptkit/qstate.hpp"

// Command implementations behind the qptkit executable. Each returns the
// process exit code; flag parsing lives in tools/qptkit.cpp.

namespace qptkit::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kNumericalFailure = 4 };

using io::json;

namespace detail {

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else io::write_text(path, text);
}

/// Maps the library's exception types onto the exit-code contract.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const qptkit::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const data_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const numerical_error& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

inline std::size_t time_index(const ExperimentRecord& rec, double t) {
  for (std::size_t m = 0; m < rec.times_ns.size(); ++m) {
    if (std::abs(rec.times_ns[m] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return m;
  }
  throw data_error("time " + io::fmt6(t) + " ns is not in the record");
}

inline json expectations_json(const PauliExpectations& e) {
  return {{"sx", io::optional_number(e.sx)}, {"sy", io::optional_number(e.sy)}, {"sz", io::optional_number(e.sz)}};
}

// Which components MaxEnt had to fill or rescale for one input.
inline json maxent_notes(const PauliExpectations& e) {
  json missing = json::array();
  if (!e.sx) missing.push_back("sx");
  if (!e.sy) missing.push_back("sy");
  if (!e.sz) missing.push_back("sz");
  const BlochVector r{e.sx.value_or(0.0), e.sy.value_or(0.0), e.sz.value_or(0.0)};
  return {{"unmeasured", std::move(missing)}, {"rescaled_to_sphere", r.norm() > 1.0}};
}

inline std::array<CMatrix, 4> output_matrices(const ExperimentRecord& rec, std::size_t m) {
  const auto outs = outputs_at(rec, m);
  return {outs[0].matrix(), outs[1].matrix(), outs[2].matrix(), outs[3].matrix()};
}

inline bool completely_positive(const ChiMatrix& chi, const Tolerances& tol) {
  return min_eigenvalue(chi.matrix()) >= tol.projection_min_eig && tp_defect(chi) <= tol.projection_tp_defect;
}

}  // namespace detail

// ---- simulate ---------------------------------------------------------------

struct SimulateOptions {
  SimConfig config;
  double first_time_ns = 20.0;
  std::size_t time_points = 3;
  std::string out;
};

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    o.config.validate();
    if (!(o.first_time_ns > 0) || o.time_points < 1) throw invalid_argument("--t1ns must be positive");
    const ExperimentRecord rec = run_experiment(o.config, TimeSchedule{o.first_time_ns, o.time_points});
    detail::emit(o.out, io::dump(io::record_json(rec)), out);
    return kOk;
  });
}

// ---- reconstruct ------------------------------------------------------------

struct ReconstructOptions {
  std::string record;
  double time_ns = 0.0;
  std::string out;
};

inline int cmd_reconstruct(const ReconstructOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const io::RecordFile file = io::read_record(o.record);
    const ExperimentRecord rec = io::analysis_record(file);
    const std::size_t m = detail::time_index(rec, o.time_ns);
    const auto outs = detail::output_matrices(rec, m);
    const ChiMatrix chi = reconstruct_chi(std::span<const CMatrix, 4>(outs));
    const double min_eig = min_eigenvalue(chi.matrix());
    json maxent = json::object();
    for (std::size_t j = 0; j < 4; ++j) maxent[InputStateSet::kLabels[j]] = detail::maxent_notes(rec.expectations[j][m]);
    const Tolerances tol = io::load_tolerances();
    json diag = {{"stage", "reconstruct"},
                 {"time_ns", io::number(rec.times_ns[m])},
                 {"min_eigenvalue", io::number(min_eig)},
                 {"tp_defect", io::number(tp_defect(chi))},
                 {"completely_positive", min_eig >= tol.projection_min_eig},
                 {"maxent", std::move(maxent)}};
    detail::emit(o.out, io::dump(io::process_json(chi, diag)), out);
    return kOk;
  });
}

// ---- project ----------------------------------------------------------------

struct ProjectOptions {
  std::string process;
  std::optional<double> lagrange;
  std::string out;
};

inline int cmd_project(const ProjectOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const io::ProcessFile in = io::read_process(o.process);
    const Tolerances tol = io::load_tolerances();
    ProjectionOptions opts;
    opts.lagrange = o.lagrange.value_or(tol.projection_lagrange);
    opts.min_eig_threshold = tol.projection_min_eig;
    opts.tp_threshold = tol.projection_tp_defect;
    const ProjectionResult r = project_to_cp(in.chi, opts);
    const UnphysicalityNorms n = unphysicality_norms(to_normal_basis(in.chi), r.chi);
    const auto& d = r.diagnostics;
    json diag = {{"stage", "project"},
                 {"lagrange", io::number(opts.lagrange)},
                 {"success", d.success},
                 {"message", d.message},
                 {"min_eigenvalue", io::number(d.min_eigenvalue)},
                 {"tp_defect", io::number(d.tp_defect)},
                 {"input_min_eigenvalue", io::number(d.input_min_eigenvalue)},
                 {"deviation", io::number(r.deviation)},
                 {"start_deviation", io::number(r.start_deviation)},
                 {"evaluations", r.evaluations},
                 {"distance", {{"p1", io::number(n.p1)}, {"p2", io::number(n.p2)}, {"fro", io::number(n.fro)},
                               {"d_pro", io::number(n.d_pro)}}}};
    detail::emit(o.out, io::dump(io::process_json(r.chi, diag)), out);
    err << "physicality: min eigenvalue " << io::fmt6(d.min_eigenvalue) << ", tp defect " << io::fmt6(d.tp_defect)
        << ", |chi - chi~|_Fro " << io::fmt6(n.fro) << "\n";
    if (!d.success) {
      err << "error: " << d.message << "\n";
      return kNumericalFailure;
    }
    return kOk;
  });
}

// ---- metrics ----------------------------------------------------------------

struct MetricsOptions {
  std::string a;
  std::string b;
  bool as_json = false;
};

inline int cmd_metrics(const MetricsOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const io::ProcessFile a = io::read_process(o.a);
    const io::ProcessFile b = io::read_process(o.b);
    if (a.chi.basis().name() != b.chi.basis().name()) {
      throw data_error("processes use different bases (" + a.chi.basis().name() + " vs " + b.chi.basis().name() + ")");
    }
    const UnphysicalityNorms n = unphysicality_norms(a.chi, b.chi);
    const Tolerances tol = io::load_tolerances();
    std::vector<std::pair<std::string, double>> rows = {{"p1", n.p1}, {"p2", n.p2}, {"fro", n.fro}, {"d_pro", n.d_pro}};
    std::string warning;
    const bool a_ok = detail::completely_positive(a.chi, tol);
    const bool b_ok = detail::completely_positive(b.chi, tol);
    if (a_ok && b_ok) {
      const CMatrix ja = jamiolkowski_state(to_normal_basis(a.chi));
      const CMatrix jb = jamiolkowski_state(to_normal_basis(b.chi));
      rows.emplace_back("trace_distance", trace_distance(ja, jb));
      rows.emplace_back("fidelity", fidelity(ja, jb));
      rows.emplace_back("bures", bures(ja, jb));
      rows.emplace_back("c_metric", c_metric(ja, jb));
    } else {
      warning = std::string("fidelity-based metrics suppressed: ") + (a_ok ? "" : o.a) +
                (a_ok || b_ok ? "" : " and ") + (b_ok ? "" : o.b) + " not completely positive";
    }
    if (o.as_json) {
      json j = json::object();
      for (const auto& [k, v] : rows) j[k] = io::number(v);
      if (!warning.empty()) j["warning"] = warning;
      out << io::dump(j);
    } else {
      out << "metric          value\n";
      for (const auto& [k, v] : rows) {
        std::string name = k;
        name.resize(16, ' ');
        out << name << io::fmt6(v) << "\n";
      }
      if (!warning.empty()) out << "warning: " << warning << "\n";
    }
    if (!warning.empty()) err << "warning: " << warning << "\n";
    return kOk;
  });
}

// ---- lindblad ---------------------------------------------------------------

struct LindbladOptions {
  std::string record;
  double detuning = 0.0;  // rad/ns; H = (detuning/2) sigma_z
  std::string out;
};

inline int cmd_lindblad(const LindbladOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const io::RecordFile file = io::read_record(o.record);
    const ExperimentRecord rec = io::analysis_record(file);
    const TimeSchedule schedule = TimeSchedule::from_times(rec.times_ns);
    const Superoperator h_hat = hamiltonian_superop(qubit_hamiltonian(o.detuning));
    std::vector<Superoperator> props;
    for (std::size_t m = 0; m < rec.times_ns.size(); ++m) {
      const auto outs = detail::output_matrices(rec, m);
      props.push_back(propagator_from_outputs(std::span<const CMatrix, 4>(outs)));
    }
    Superoperator r_log;
    try {
      r_log = generator_log_estimate(props[0], h_hat, schedule.t1);
    } catch (const numerical_error& e) {
      throw numerical_error(std::string(e.what()) + "; reduce t1 so the first propagator stays near the identity");
    }
    const MarkovianEstimate est = estimate_markovian(props, h_hat, schedule);

    json lindblads = json::array();
    for (std::size_t k = 0; k < est.lindblads.ops.size(); ++k) {
      json l = io::complex_json(est.lindblads.ops[k]);
      l["rate"] = io::number(est.lindblads.rates[k]);
      l["contribution"] = io::number(est.lindblads.contributions[k]);
      lindblads.push_back(std::move(l));
    }
    std::vector<double> times{0.0};
    times.insert(times.end(), rec.times_ns.begin(), rec.times_ns.end());
    const auto inputs = InputStateSet::canonical();
    json predicted = json::object(), measured = json::object();
    for (std::size_t j = 0; j < 4; ++j) {
      const auto p = predict_expectations(est.fit.relaxation, h_hat, inputs.states[j], times);
      json pj = json::object(), mj = json::object();
      for (std::size_t m = 0; m < times.size(); ++m) pj[io::time_key(times[m])] = detail::expectations_json(p[m]);
      for (std::size_t m = 0; m < rec.times_ns.size(); ++m) {
        mj[io::time_key(rec.times_ns[m])] = detail::expectations_json(rec.expectations[j][m]);
      }
      predicted[InputStateSet::kLabels[j]] = std::move(pj);
      measured[InputStateSet::kLabels[j]] = std::move(mj);
    }
    json times_json = json::array();
    for (double t : rec.times_ns) times_json.push_back(io::number(t));
    json report = {{"schema", "qpt-lindblad/1"},
                   {"times_ns", std::move(times_json)},
                   {"detuning", io::number(o.detuning)},
                   {"r_log", io::complex_json(r_log)},
                   {"r_bch", io::complex_json(est.r_bch)},
                   {"a_start", io::complex_json(est.start.clipped)},
                   {"a_start_residual", io::number(est.start.residual)},
                   {"a_fit", io::complex_json(est.fit.a)},
                   {"residual", io::number(est.fit.residual)},
                   {"start_residual", io::number(est.fit.start_residual)},
                   {"evaluations", est.fit.evaluations},
                   {"lindblads", std::move(lindblads)},
                   {"predicted", std::move(predicted)},
                   {"measured", std::move(measured)}};
    detail::emit(o.out, io::dump(report), out);
    return kOk;
  });
}

// ---- ellipsoid --------------------------------------------------------------

struct EllipsoidOptions {
  std::string process;
  std::size_t points = 1000;
  std::string out;
};

inline int cmd_ellipsoid(const EllipsoidOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (o.points < 1) throw invalid_argument("--points must be at least 1");
    const io::ProcessFile p = io::read_process(o.process);
    const Tolerances tol = io::load_tolerances();
    const auto samples = ellipsoid_samples(chi_to_affine(p.chi), o.points, tol.ellipsoid_violation);
    std::ostringstream csv;
    csv << "in_x,in_y,in_z,out_x,out_y,out_z,violation\n";
    std::size_t violations = 0;
    for (const auto& s : samples) {
      csv << io::fmt6(s.input.x) << ',' << io::fmt6(s.input.y) << ',' << io::fmt6(s.input.z) << ','
          << io::fmt6(s.output.x) << ',' << io::fmt6(s.output.y) << ',' << io::fmt6(s.output.z) << ','
          << (s.violation ? 1 : 0) << "\n";
      violations += s.violation;
    }
    detail::emit(o.out, csv.str(), out);
    err << violations << " of " << samples.size() << " points outside the Bloch ball\n";
    return kOk;
  });
}

}  // namespace qptkit::cli
