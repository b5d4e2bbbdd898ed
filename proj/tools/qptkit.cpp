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


// qptkit: single-qubit process tomography from the command line.
//
//   qptkit simulate    --t1 1000 --t2 60 --seed 7 --out run.json
//   qptkit reconstruct run.json --time 20 --out chi20.json
//   qptkit project     chi20.json --out chi20_cp.json
//   qptkit metrics     chi20.json chi20_cp.json
//   qptkit lindblad    run.json --out generator.json
//   qptkit ellipsoid   chi20_cp.json --points 500 --out cloud.csv
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 numerical failure.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qptkit/cli.hpp"

using namespace qptkit::cli;

int main(int argc, char** argv) {
  CLI::App app{"Single-qubit quantum process tomography and Markovian generator estimation"};
  app.require_subcommand(1);

  SimulateOptions sim;
  std::string t1_text = "1000";
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic NV-centre tomography record");
  simulate->add_option("--t1", t1_text, "Longitudinal relaxation time T1 in ns ('inf' disables)")->capture_default_str();
  simulate->add_option("--t2", sim.config.t2_ns, "Coherence time T2 in ns")->capture_default_str();
  simulate->add_option("--detuning", sim.config.detuning, "Rotating-frame detuning in rad/ns")->capture_default_str();
  simulate->add_option("--alpha", sim.config.alpha, "Pseudopure polarization")->capture_default_str();
  simulate->add_option("--shots", sim.config.shots, "Shots per expectation value (0: noise-free)")->capture_default_str();
  simulate->add_option("--seed", sim.config.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--t1ns", sim.first_time_ns, "First decoherence time of the doubling schedule, ns")
      ->capture_default_str();
  simulate->add_option("--points", sim.time_points, "Number of schedule times")->capture_default_str();
  simulate->add_option("--rabi", sim.config.rabi_frequency, "Rabi frequency in rad/ns")->capture_default_str();
  simulate->add_option("--pulse-error", sim.config.pulse_error, "Fractional pulse-angle error")->capture_default_str();
  simulate->add_flag("--fold-polarization", sim.config.fold_polarization, "Keep the pseudopure scaling in the inputs");
  simulate->add_option("--out", sim.out, "Output file (default: stdout)");

  ReconstructOptions rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Raw chi and affine map at one time of a record");
  reconstruct->add_option("record", rec.record, "Record JSON")->required();
  reconstruct->add_option("--time", rec.time_ns, "Decoherence time in ns")->required();
  reconstruct->add_option("--out", rec.out, "Output file (default: stdout)");

  ProjectOptions proj;
  double lagrange = 0.0;
  auto* project = app.add_subcommand("project", "Nearest completely positive, trace-preserving process");
  project->add_option("process", proj.process, "Process JSON")->required();
  auto* lagrange_opt = project->add_option("--lagrange", lagrange, "Trace-preservation penalty weight");
  project->add_option("--out", proj.out, "Output file (default: stdout)");

  MetricsOptions met;
  auto* metrics = app.add_subcommand("metrics", "Distance measures between two processes");
  metrics->add_option("a", met.a, "First process JSON")->required();
  metrics->add_option("b", met.b, "Second process JSON")->required();
  metrics->add_flag("--json", met.as_json, "Print JSON instead of a table");

  LindbladOptions lin;
  auto* lindblad = app.add_subcommand("lindblad", "Fit a Markovian generator to a doubling-schedule record");
  lindblad->add_option("record", lin.record, "Record JSON")->required();
  lindblad->add_option("--hamiltonian", lin.detuning, "Detuning of H = (d/2) sigma_z in rad/ns")->capture_default_str();
  lindblad->add_option("--out", lin.out, "Output file (default: stdout)");

  EllipsoidOptions ell;
  auto* ellipsoid = app.add_subcommand("ellipsoid", "Bloch-sphere image of a process as CSV");
  ellipsoid->add_option("process", ell.process, "Process JSON")->required();
  ellipsoid->add_option("--points", ell.points, "Number of sphere points")->capture_default_str();
  ellipsoid->add_option("--out", ell.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (simulate->parsed()) {
    try {
      sim.config.t1_ns = std::stod(t1_text);
    } catch (const std::exception&) {
      std::cerr << "error: --t1 expects a number or 'inf'\n";
      return kUsage;
    }
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (reconstruct->parsed()) return cmd_reconstruct(rec, std::cout, std::cerr);
  if (project->parsed()) {
    if (*lagrange_opt) proj.lagrange = lagrange;
    return cmd_project(proj, std::cout, std::cerr);
  }
  if (metrics->parsed()) return cmd_metrics(met, std::cout, std::cerr);
  if (lindblad->parsed()) return cmd_lindblad(lin, std::cout, std::cerr);
  if (ellipsoid->parsed()) return cmd_ellipsoid(ell, std::cout, std::cerr);
  return kUsage;
}
