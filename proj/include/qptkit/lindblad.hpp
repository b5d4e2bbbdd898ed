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
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "qptkit/errors.hpp"
#include "qptkit/numkit.hpp"
#include "qptkit/qpt.hpp"
#include "qptkit/qstate.hpp"
#include "qptkit/tolerances.hpp"

// Markovian generators in Liouville space. Density matrices are stacked by
// column, vec(rho) = (rho00, rho10, rho01, rho11), so the trace functional
// is the fixed row (1, 0, 0, 1). Times are in ns, rates in 1/ns.

namespace qptkit {

/// 4x4 matrix acting on column-stacked 2x2 operators.
using Superoperator = CMatrix;

inline CMatrix vectorize(const CMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw invalid_argument("vectorize: expected a 2x2 matrix");
  CMatrix v(4, 1);
  v(0, 0) = rho(0, 0);
  v(1, 0) = rho(1, 0);
  v(2, 0) = rho(0, 1);
  v(3, 0) = rho(1, 1);
  return v;
}

inline CMatrix devectorize(const CMatrix& v) {
  if (v.size() != 4) throw invalid_argument("devectorize: expected 4 entries");
  const auto d = v.data();
  return CMatrix{{d[0], d[2]}, {d[1], d[3]}};
}

/// Column c is vec(map(unit_c)) where unit_c = devectorize(e_c).
inline Superoperator superop_from_map(const std::function<CMatrix(const CMatrix&)>& map) {
  Superoperator s(4, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    CMatrix e(4, 1);
    e(c, 0) = 1.0;
    const CMatrix col = vectorize(map(devectorize(e)));
    for (std::size_t r = 0; r < 4; ++r) s(r, c) = col(r, 0);
  }
  return s;
}

inline CMatrix apply_superop(const Superoperator& s, const CMatrix& rho) {
  return devectorize(s * vectorize(rho));
}

/// max_j |sum over the trace row of column j - [j is diagonal]|; zero for a
/// trace-preserving propagator.
inline double trace_row_defect(const Superoperator& p) {
  double worst = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    const cplx target = (c == 0 || c == 3) ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(p(0, c) + p(3, c) - target));
  }
  return worst;
}

/// t_m = 2^m t1 for m = 0 .. count-1.
struct TimeSchedule {
  double t1 = 20.0;
  std::size_t count = 3;

  std::vector<double> times() const {
    std::vector<double> out(count);
    for (std::size_t m = 0; m < count; ++m) out[m] = std::ldexp(t1, static_cast<int>(m));
    return out;
  }

  /// Rejects anything other than a strictly doubling list of at least three times.
  static TimeSchedule from_times(std::span<const double> times, double rel_tol = 1e-9) {
    if (times.size() < 3) throw data_error("schedule needs at least three doubling times t1, 2 t1, 4 t1");
    if (!(times[0] > 0) || !std::isfinite(times[0])) throw data_error("schedule: t1 must be positive");
    TimeSchedule s{times[0], times.size()};
    const auto expect = s.times();
    for (std::size_t m = 0; m < times.size(); ++m) {
      if (std::abs(times[m] - expect[m]) > rel_tol * expect[m]) {
        throw data_error("schedule: times are not a doubling sequence t_m = 2^m t1");
      }
    }
    return s;
  }
};

// ---- Hamiltonians ----------------------------------------------------------

/// NV ground-triplet parameters; frequencies in MHz, field in Gauss.
struct NVParams {
  double d = 2880.0;       // zero-field splitting
  double e = 0.0;          // transverse splitting; axial symmetry only
  double g_beta = 2.8025;  // MHz per Gauss
  double bz = 0.0;
};

struct NVHamiltonian {
  CMatrix h;                   // 3x3 on m_s = +1, 0, -1
  double transition_mhz = 0;   // m_s = 0 -> +1
};

/// H = g beta Bz Sz + D (Sz^2 - 2/3) on the spin-1 triplet.
inline NVHamiltonian nv_hamiltonian(const NVParams& p) {
  if (!(p.d > 0) || !(p.g_beta > 0)) throw invalid_argument("nv_hamiltonian: D and g beta must be positive");
  if (p.e != 0.0) throw invalid_argument("nv_hamiltonian: only axially symmetric centres (E = 0) are modelled");
  if (!std::isfinite(p.bz)) throw invalid_argument("nv_hamiltonian: non-finite field");
  CMatrix h(3, 3);
  const double sz[3] = {1.0, 0.0, -1.0};
  for (std::size_t i = 0; i < 3; ++i) h(i, i) = p.g_beta * p.bz * sz[i] + p.d * (sz[i] * sz[i] - 2.0 / 3.0);
  return {std::move(h), p.d + p.g_beta * p.bz};
}

/// Rotating-frame qubit Hamiltonian (detuning/2) sigma_z, detuning in rad/ns.
inline CMatrix qubit_hamiltonian(double detuning) { return pauli::Z() * cplx(0.5 * detuning); }

/// H_hat vec(rho) = vec(H rho - rho H).
inline Superoperator hamiltonian_superop(const CMatrix& h) {
  if (h.rows() != 2 || h.cols() != 2) throw invalid_argument("hamiltonian_superop: expected a 2x2 Hamiltonian");
  if (!is_hermitian(h, kDefaultTolerances.hermitian)) {
    throw invalid_argument("hamiltonian_superop: Hamiltonian is not Hermitian");
  }
  return superop_from_map([&](const CMatrix& rho) { return h * rho - rho * h; });
}

// ---- Propagators and generator estimates -----------------------------------

/// Columns are vec(E(unit)) for the units in column-stacked order, recovered
/// from the outputs of the canonical inputs z+, z-, x+, y+.
inline Superoperator propagator_from_outputs(std::span<const CMatrix, 4> outputs) {
  const auto img = matrix_unit_images(outputs);  // |0><0|, |0><1|, |1><0|, |1><1|
  const std::array<const CMatrix*, 4> by_column = {&img[0], &img[2], &img[1], &img[3]};
  Superoperator p(4, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    const CMatrix v = vectorize(*by_column[c]);
    for (std::size_t r = 0; r < 4; ++r) p(r, c) = v(r, 0);
  }
  return p;
}

inline Superoperator propagator_from_outputs(std::span<const DensityMatrix, 4> outputs) {
  const std::array<CMatrix, 4> m = {outputs[0].matrix(), outputs[1].matrix(), outputs[2].matrix(),
                                    outputs[3].matrix()};
  return propagator_from_outputs(std::span<const CMatrix, 4>(m));
}

/// exp(-(i H_hat + R_hat) t).
inline Superoperator propagator(const Superoperator& h_hat, const Superoperator& r_hat, double t) {
  return matrix_exp((h_hat * cplx(0.0, 1.0) + r_hat) * cplx(-t));
}

/// R_hat = -i H_hat - log(P_hat) / t.
inline Superoperator generator_log_estimate(const Superoperator& p_hat, const Superoperator& h_hat, double t) {
  if (!(t > 0)) throw invalid_argument("generator_log_estimate: t must be positive");
  return h_hat * cplx(0.0, -1.0) - matrix_log_principal(p_hat) / cplx(t);
}

/// Richardson estimate of -d/dt [exp(i t H/2) P(t) exp(i t H/2)] at t = 0
/// from the propagators at t1, 2 t1, 4 t1.
inline Superoperator generator_bch_estimate(std::span<const Superoperator> props, const Superoperator& h_hat,
                                            const TimeSchedule& schedule) {
  if (props.size() < 3 || schedule.count < 3) {
    throw invalid_argument("generator_bch_estimate: need propagators at t1, 2 t1, 4 t1");
  }
  const auto times = schedule.times();
  std::vector<CMatrix> f;
  for (std::size_t m = 0; m < 3; ++m) {
    const CMatrix half = matrix_exp(h_hat * cplx(0.0, 0.5 * times[m]));
    f.push_back(half * props[m] * half);
  }
  return -richardson_derivative(f, CMatrix::identity(4), schedule.t1);
}

// ---- GKS parameterization --------------------------------------------------

/// x(1)..x(9) (stored zero-based) in the lower-triangular X; a = X^dagger X.
///
///     x1          0          0
///     x4 + i x5   x2         0
///     x8 + i x9   x6 + i x7  x3
struct GKSParams {
  std::array<double, 9> x{};
};

/// 3x3 Hermitian coefficient matrix over the F basis.
using GKSMatrix = CMatrix;

inline CMatrix gks_factor(const GKSParams& p) {
  const auto& x = p.x;
  return CMatrix{{x[0], 0.0, 0.0}, {cplx(x[3], x[4]), x[1], 0.0}, {cplx(x[7], x[8]), cplx(x[5], x[6]), x[2]}};
}

inline GKSMatrix gks_matrix(const GKSParams& p) {
  const CMatrix f = gks_factor(p);
  return f.adjoint() * f;
}

/// Trace-orthonormal F1, F2, F3 = sigma_x, sigma_y, sigma_z over sqrt(2).
inline const std::array<CMatrix, 3>& gks_basis() {
  static const std::array<CMatrix, 3> f = [] {
    const cplx s(1.0 / std::sqrt(2.0));
    return std::array<CMatrix, 3>{pauli::X() * s, pauli::Y() * s, pauli::Z() * s};
  }();
  return f;
}

namespace detail {

// -R_hat rho = sum_ab a_ab (F_a rho F_b^dag - {F_b^dag F_a, rho} / 2).
inline Superoperator dissipator_unchecked(const GKSMatrix& a) {
  const auto& f = gks_basis();
  return -superop_from_map([&](const CMatrix& rho) {
    CMatrix out(2, 2);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        if (a(i, j) == cplx(0.0)) continue;
        const CMatrix fbd = f[j].adjoint();
        const CMatrix k = fbd * f[i];
        out += (f[i] * rho * fbd - (k * rho + rho * k) * cplx(0.5)) * a(i, j);
      }
    return out;
  });
}

}  // namespace detail

/// R_hat(a), sign chosen so that d vec(rho)/dt = -R_hat vec(rho).
inline Superoperator dissipator_superop(const GKSMatrix& a) {
  if (a.rows() != 3 || a.cols() != 3) throw invalid_argument("dissipator_superop: GKS matrix must be 3x3");
  if (!is_hermitian(a, kDefaultTolerances.hermitian * std::max(1.0, a.max_abs()))) {
    throw invalid_argument("dissipator_superop: GKS matrix is not Hermitian");
  }
  return detail::dissipator_unchecked(a);
}

/// R_hat for explicit Lindblad operators: -R_hat rho = sum_k L rho L^dag - {L^dag L, rho}/2.
inline Superoperator lindblad_relaxation(std::span<const CMatrix> ops) {
  return -superop_from_map([&](const CMatrix& rho) {
    CMatrix out(2, 2);
    for (const auto& l : ops) {
      const CMatrix k = l.adjoint() * l;
      out += l * rho * l.adjoint() - (k * rho + rho * k) * cplx(0.5);
    }
    return out;
  });
}

/// GKS matrix of sum_k L_k . L_k^dag for traceless L_k = sum c_a F_a: a = sum_k c c^dag.
inline GKSMatrix gks_from_lindblads(std::span<const CMatrix> ops) {
  const auto& f = gks_basis();
  GKSMatrix a(3, 3);
  for (const auto& l : ops) {
    std::array<cplx, 3> c;
    for (std::size_t i = 0; i < 3; ++i) c[i] = inner(f[i], l);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) a(i, j) += c[i] * std::conj(c[j]);
  }
  return a;
}

/// Parameters x with X^dagger X = a for PSD a.
inline GKSParams gks_params_from_matrix(const GKSMatrix& a) {
  const CMatrix t = cholesky_reversed_lower(a);
  GKSParams p;
  p.x = {t(0, 0).real(), t(1, 1).real(), t(2, 2).real(), t(1, 0).real(), t(1, 0).imag(),
         t(2, 1).real(), t(2, 1).imag(), t(2, 0).real(), t(2, 0).imag()};
  return p;
}

struct GKSStart {
  GKSParams x;
  GKSMatrix least_squares;  // Hermitian a minimizing |R_hat(a) - R_RE|_Fro
  GKSMatrix clipped;        // least_squares with negative eigenvalues set to zero
  double residual = 0.0;    // |R_hat(least_squares) - R_RE|_Fro
};

namespace detail {

// Real coordinates of a Hermitian 3x3: a00, a11, a22, Re/Im a10, a21, a20.
inline GKSMatrix hermitian_from_coords(std::span<const double, 9> c) {
  GKSMatrix a(3, 3);
  a(0, 0) = c[0];
  a(1, 1) = c[1];
  a(2, 2) = c[2];
  const std::size_t rows[3] = {1, 2, 2}, cols[3] = {0, 1, 0};
  for (std::size_t k = 0; k < 3; ++k) {
    a(rows[k], cols[k]) = cplx(c[3 + 2 * k], c[4 + 2 * k]);
    a(cols[k], rows[k]) = cplx(c[3 + 2 * k], -c[4 + 2 * k]);
  }
  return a;
}

}  // namespace detail

/// Least-squares projection of an unconstrained relaxation estimate onto
/// the GKS form, then eigenvalue clipping and Cholesky factorization.
inline GKSStart gks_start_from_generator(const Superoperator& r_re) {
  if (r_re.rows() != 4 || r_re.cols() != 4) throw invalid_argument("gks_start_from_generator: expected 4x4");
  // The map a -> R_hat(a) is real-linear; stack Re and Im of its 16 outputs.
  CMatrix design(32, 9);
  for (std::size_t k = 0; k < 9; ++k) {
    std::array<double, 9> e{};
    e[k] = 1.0;
    const Superoperator col = detail::dissipator_unchecked(detail::hermitian_from_coords(e));
    for (std::size_t i = 0; i < 16; ++i) {
      design(i, k) = col.data()[i].real();
      design(16 + i, k) = col.data()[i].imag();
    }
  }
  CMatrix rhs(32, 1);
  for (std::size_t i = 0; i < 16; ++i) {
    rhs(i, 0) = r_re.data()[i].real();
    rhs(16 + i, 0) = r_re.data()[i].imag();
  }
  const CMatrix sol = pseudoinverse(design) * rhs;
  std::array<double, 9> coords;
  for (std::size_t k = 0; k < 9; ++k) coords[k] = sol(k, 0).real();

  GKSStart s;
  s.least_squares = detail::hermitian_from_coords(coords);
  s.residual = distance(detail::dissipator_unchecked(s.least_squares), r_re);
  const EigResult e = eig_hermitian(s.least_squares);
  s.clipped = hermitian_function(e, [](double d) { return cplx(std::max(d, 0.0)); });
  s.x = gks_params_from_matrix(s.clipped);
  return s;
}

struct GeneratorFit {
  GKSParams x;
  GKSMatrix a;
  Superoperator relaxation;  // R_hat(a)
  double residual = 0.0;
  double start_residual = 0.0;
  std::size_t evaluations = 0;
};

/// sum_m |exp(-(i H_hat + R_hat(x)) t_m) - P_m|^2_Fro.
inline double generator_residual(const GKSParams& x, std::span<const Superoperator> props,
                                 const Superoperator& h_hat, std::span<const double> times) {
  const Superoperator r = detail::dissipator_unchecked(gks_matrix(x));
  double sum = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const double d = distance(propagator(h_hat, r, times[m]), props[m]);
    sum += d * d;
  }
  return sum;
}

inline constexpr SimplexOptions kGeneratorSimplex{1e-20, 1e-12, 40000, 3};

/// Nelder-Mead fit of the 9 GKS parameters to the measured propagators.
inline GeneratorFit fit_generator(std::span<const Superoperator> props, const Superoperator& h_hat,
                                  const TimeSchedule& schedule, const GKSParams& x0,
                                  const SimplexOptions& opts = kGeneratorSimplex) {
  const auto times = schedule.times();
  if (props.size() != times.size()) throw invalid_argument("fit_generator: one propagator per schedule time");
  const Objective f = [&](const std::vector<double>& v) {
    GKSParams p;
    std::copy(v.begin(), v.end(), p.x.begin());
    return generator_residual(p, props, h_hat, times);
  };
  const std::vector<double> start(x0.x.begin(), x0.x.end());
  const SimplexResult r = nelder_mead(f, start, opts);
  GeneratorFit fit;
  std::copy(r.x.begin(), r.x.end(), fit.x.x.begin());
  fit.a = gks_matrix(fit.x);
  fit.relaxation = detail::dissipator_unchecked(fit.a);
  fit.residual = r.value;
  fit.start_residual = f(start);
  fit.evaluations = r.evaluations;
  return fit;
}

// ---- Lindblad operators ----------------------------------------------------

struct LindbladSet {
  std::vector<CMatrix> ops;
  std::vector<double> rates;          // eigenvalues d_i of the GKS matrix
  std::vector<double> contributions;  // |L_i|^2 / sum_j |L_j|^2
};

inline std::vector<double> relative_contributions(std::span<const CMatrix> ops) {
  std::vector<double> w;
  double total = 0.0;
  for (const auto& l : ops) {
    const double n = l.frobenius_norm();
    w.push_back(n * n);
    total += n * n;
  }
  if (total > 0)
    for (double& v : w) v /= total;
  return w;
}

/// L_i = sqrt(d_i) sum_j U_ji F_j for a = U diag(d) U^dagger, largest d first.
inline LindbladSet lindblads_from_gks(const GKSMatrix& a, const Tolerances& tol = kDefaultTolerances) {
  const EigResult e = eig_hermitian(a);
  const double top = e.eigenvalues.back();
  if (e.eigenvalues.front() < -tol.gks_negative_eig) {
    throw numerical_error("lindblads_from_gks: GKS matrix has a negative eigenvalue");
  }
  LindbladSet s;
  const auto& f = gks_basis();
  for (std::size_t i = 3; i-- > 0;) {
    const double d = e.eigenvalues[i];
    if (!(top > 0) || d < tol.lindblad_drop_relative * top) continue;
    CMatrix l(2, 2);
    for (std::size_t j = 0; j < 3; ++j) l += f[j] * (e.eigenvectors(j, i) * std::sqrt(d));
    s.ops.push_back(std::move(l));
    s.rates.push_back(d);
  }
  s.contributions = relative_contributions(s.ops);
  return s;
}

/// Pauli expectations of exp(-(i H_hat + R_hat) t) applied to rho0 at each time.
inline std::vector<PauliExpectations> predict_expectations(const Superoperator& r_hat, const Superoperator& h_hat,
                                                           const DensityMatrix& rho0,
                                                           std::span<const double> times) {
  std::vector<PauliExpectations> out;
  const CMatrix v0 = vectorize(rho0.matrix());
  for (double t : times) {
    const CMatrix rho = t == 0.0 ? rho0.matrix() : devectorize(propagator(h_hat, r_hat, t) * v0);
    out.push_back(expectations_of(rho));
  }
  return out;
}

// ---- Pipeline ---------------------------------------------------------------

struct MarkovianEstimate {
  Superoperator r_bch;  // Richardson estimate R_RE
  GKSStart start;
  GeneratorFit fit;
  LindbladSet lindblads;
};

/// Richardson estimate, projection to GKS form, constrained fit, extraction.
inline MarkovianEstimate estimate_markovian(std::span<const Superoperator> props, const Superoperator& h_hat,
                                            const TimeSchedule& schedule,
                                            const SimplexOptions& opts = kGeneratorSimplex) {
  MarkovianEstimate est;
  est.r_bch = generator_bch_estimate(props, h_hat, schedule);
  est.start = gks_start_from_generator(est.r_bch);
  est.fit = fit_generator(props, h_hat, schedule, est.start.x, opts);
  est.lindblads = lindblads_from_gks(est.fit.a);
  return est;
}

}  // namespace qptkit
