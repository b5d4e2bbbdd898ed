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

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "qptkit/errors.hpp"
#include "qptkit/lindblad.hpp"
#include "qptkit/numkit.hpp"
#include "qptkit/qpt.hpp"
#include "qptkit/qstate.hpp"

// Synthetic NV-centre tomography runs: pulsed preparation of the canonical
// inputs, free decay under a T1/T2 qubit channel, noisy Pauli readout.

namespace qptkit {

struct SimConfig {
  double t1_ns = 1000.0;  // infinity disables amplitude damping
  double t2_ns = 60.0;
  double detuning = 0.0;         // rad/ns
  double alpha = 0.4;            // pseudopure polarization
  double rabi_frequency = 0.0628;  // rad/ns, sets the reference pi-pulse length
  std::uint64_t shots = 10000;   // 0 disables readout noise
  std::uint64_t seed = 0;
  double pulse_error = 0.0;      // fractional rotation-angle error
  bool fold_polarization = false;  // keep the alpha scaling in the inputs

  void validate() const {
    if (!(t1_ns > 0) || !(t2_ns > 0) || std::isnan(t1_ns) || !std::isfinite(t2_ns)) {
      throw invalid_argument("unphysical T1/T2: times must be positive");
    }
    if (t2_ns > 2.0 * t1_ns) throw invalid_argument("unphysical T1/T2: T2 must not exceed 2 T1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw invalid_argument("alpha must lie in [0, 1]");
    if (fold_polarization && !(alpha > 0)) throw invalid_argument("alpha must be positive to fold polarization");
    if (!std::isfinite(detuning) || !std::isfinite(pulse_error)) {
      throw invalid_argument("detuning and pulse error must be finite");
    }
    if (!(rabi_frequency > 0) || !std::isfinite(rabi_frequency)) {
      throw invalid_argument("Rabi frequency must be positive");
    }
  }

  double pi_pulse_ns() const { return std::numbers::pi / rabi_frequency; }
};

namespace detail {

inline CMatrix rotation(const CMatrix& pauli_axis, double angle) {
  return pauli::I() * cplx(std::cos(angle / 2)) - pauli_axis * cplx(0.0, std::sin(angle / 2));
}

}  // namespace detail

/// The canonical inputs produced from |0><0| by Ry(pi), Ry(pi/2), Rx(-pi/2),
/// every angle scaled by (1 + pulse_error). With fold_polarization the
/// pseudopure alpha scaling is kept; otherwise the identity part is dropped.
inline std::array<DensityMatrix, 4> prepare_inputs(const SimConfig& cfg) {
  cfg.validate();
  const double k = 1.0 + cfg.pulse_error;
  const std::array<CMatrix, 4> pulses = {pauli::I(), detail::rotation(pauli::Y(), k * std::numbers::pi),
                                         detail::rotation(pauli::Y(), k * std::numbers::pi / 2),
                                         detail::rotation(pauli::X(), -k * std::numbers::pi / 2)};
  const DensityMatrix ground = pure_state(1.0, 0.0);
  const double alpha = cfg.fold_polarization ? cfg.alpha : 1.0;
  const DensityMatrix start = make_pseudopure(alpha, ground);
  std::array<DensityMatrix, 4> out = {start, start, start, start};
  for (std::size_t j = 0; j < 4; ++j) {
    out[j] = DensityMatrix(hermitian_part(pulses[j] * start.matrix() * pulses[j].adjoint()));
  }
  return out;
}

struct TrueGenerator {
  Superoperator h_hat;
  Superoperator r_hat;
  GKSMatrix a;
};

/// Amplitude damping toward |0> at 1/T1 plus pure dephasing at 1/T2 - 1/(2 T1),
/// with H = (detuning/2) sigma_z.
inline TrueGenerator true_generator(const SimConfig& cfg) {
  cfg.validate();
  const double gamma = std::isinf(cfg.t1_ns) ? 0.0 : 1.0 / cfg.t1_ns;
  const double dephasing = std::max(0.0, 1.0 / cfg.t2_ns - gamma / 2.0);
  // L = sqrt(gamma) |0><1| = sqrt(gamma) (F1 + i F2) / sqrt(2); L = sqrt(dephasing) F3.
  GKSMatrix a{{0.5 * gamma, cplx(0, -0.5 * gamma), 0.0}, {cplx(0, 0.5 * gamma), 0.5 * gamma, 0.0}, {0.0, 0.0, dephasing}};
  return {hamiltonian_superop(qubit_hamiltonian(cfg.detuning)), dissipator_superop(a), a};
}

/// Pauli expectations with additive Gaussian readout noise of width
/// 1/sqrt(shots), clamped to [-1, 1]. shots == 0 returns exact values.
template <typename Rng>
PauliExpectations measure_expectations(const DensityMatrix& rho, const SimConfig& cfg, Rng& rng) {
  const BlochVector r = density_to_bloch(rho);
  if (cfg.shots == 0) return {r.x, r.y, r.z};
  std::normal_distribution<double> noise(0.0, 1.0 / std::sqrt(static_cast<double>(cfg.shots)));
  auto read = [&](double v) { return std::clamp(v + noise(rng), -1.0, 1.0); };
  const double x = read(r.x);
  const double y = read(r.y);
  const double z = read(r.z);
  return {x, y, z};
}

struct ExperimentRecord {
  std::vector<double> times_ns;
  // expectations[input][time], inputs in InputStateSet::kLabels order
  std::array<std::vector<PauliExpectations>, 4> expectations;
  SimConfig config;
  bool has_config = true;
  std::optional<std::uint64_t> seed;
};

/// Evolves each prepared input under the true generator and reads it out at
/// every time of the schedule. The RNG is std::mt19937_64 seeded from cfg.seed.
inline ExperimentRecord run_experiment(const SimConfig& cfg, const TimeSchedule& schedule) {
  const auto inputs = prepare_inputs(cfg);
  const TrueGenerator g = true_generator(cfg);
  std::mt19937_64 rng(cfg.seed);
  ExperimentRecord rec;
  rec.times_ns = schedule.times();
  rec.config = cfg;
  rec.seed = cfg.seed;
  for (double t : rec.times_ns) {
    const Superoperator p = propagator(g.h_hat, g.r_hat, t);
    for (std::size_t j = 0; j < 4; ++j) {
      const CMatrix rho = hermitian_part(apply_superop(p, inputs[j].matrix()));
      rec.expectations[j].push_back(measure_expectations(DensityMatrix(rho), cfg, rng));
    }
  }
  return rec;
}

/// Undoes the pseudopure scaling on a folded record. For any trace-preserving
/// process the mixed-state image is the mean of the z+ and z- outputs, so
/// r_j = (r_alpha_j - (1 - alpha) r_mix) / alpha.
inline ExperimentRecord unfold_polarization(const ExperimentRecord& rec, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw invalid_argument("unfold_polarization: alpha must lie in (0, 1]");
  ExperimentRecord out = rec;
  for (std::size_t m = 0; m < rec.times_ns.size(); ++m) {
    const auto& up = rec.expectations[0][m];
    const auto& down = rec.expectations[1][m];
    auto mix = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
      if (!a || !b) return std::nullopt;
      return 0.5 * (*a + *b);
    };
    const PauliExpectations centre{mix(up.sx, down.sx), mix(up.sy, down.sy), mix(up.sz, down.sz)};
    for (std::size_t j = 0; j < 4; ++j) {
      auto fix = [&](std::optional<double> v, std::optional<double> c) -> std::optional<double> {
        if (!v) return std::nullopt;
        return (*v - (1.0 - alpha) * c.value_or(0.0)) / alpha;
      };
      const auto& e = rec.expectations[j][m];
      out.expectations[j][m] = {fix(e.sx, centre.sx), fix(e.sy, centre.sy), fix(e.sz, centre.sz)};
    }
  }
  out.config.fold_polarization = false;
  return out;
}

/// MaxEnt output states for the four inputs at time index m.
inline std::array<DensityMatrix, 4> outputs_at(const ExperimentRecord& rec, std::size_t m) {
  if (m >= rec.times_ns.size()) throw data_error("time index outside the record");
  return {maxent_reconstruct(rec.expectations[0][m]), maxent_reconstruct(rec.expectations[1][m]),
          maxent_reconstruct(rec.expectations[2][m]), maxent_reconstruct(rec.expectations[3][m])};
}

}  // namespace qptkit
