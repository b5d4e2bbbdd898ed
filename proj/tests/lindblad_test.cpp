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


#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "channels.hpp"
#include "fixtures.hpp"
#include "qptkit/lindblad.hpp"

namespace qptkit {
namespace {

const Superoperator kZeroH = CMatrix(4, 4);

CMatrix diag3(double a, double b, double c) {
  CMatrix m(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

GKSMatrix random_gks(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g;
  GKSParams p;
  for (double& v : p.x) v = g(rng);
  GKSMatrix a = gks_matrix(p);
  return a * cplx(scale / a.max_abs());
}

std::vector<Superoperator> exact_props(const Superoperator& h_hat, const Superoperator& r_hat,
                                       const TimeSchedule& s) {
  std::vector<Superoperator> out;
  for (double t : s.times()) out.push_back(propagator(h_hat, r_hat, t));
  return out;
}

std::vector<Superoperator> nv_propagators() {
  std::vector<Superoperator> out;
  for (const auto& p : testing::nv_processes()) {
    const auto outs = testing::affine_outputs(p.reconstructed);
    out.push_back(propagator_from_outputs(std::span<const CMatrix, 4>(outs)));
  }
  return out;
}

// A realistic NV-like generator: slow amplitude damping, faster dephasing (1/ns).
GKSMatrix nv_like_gks() {
  const double gamma = 1e-3, dephase = 1.0 / 60 - gamma / 2;
  GKSMatrix a(3, 3);
  a(0, 0) = a(1, 1) = gamma / 2;
  a(0, 1) = cplx(0, -gamma / 2);
  a(1, 0) = cplx(0, gamma / 2);
  a(2, 2) = dephase;
  return a;
}

// ---- vectorization ----

TEST(Vectorize, GroundStateIsFirstUnitColumn) {
  const CMatrix v = vectorize(CMatrix{{1.0, 0.0}, {0.0, 0.0}});
  EXPECT_EQ(v, (CMatrix{{1.0}, {0.0}, {0.0}, {0.0}}));
  EXPECT_EQ(vectorize(matrix_unit(2, 1, 0))(1, 0), cplx(1.0));  // column stacking
}

TEST(Vectorize, RoundTripAndLinearity) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix r(2, 2), s(2, 2);
    for (auto& v : r.data()) v = cplx(g(rng), g(rng));
    for (auto& v : s.data()) v = cplx(g(rng), g(rng));
    EXPECT_EQ(devectorize(vectorize(r)), r);
    const cplx a(g(rng), g(rng)), b(g(rng), g(rng));
    EXPECT_LE(distance(vectorize(r * a + s * b), vectorize(r) * a + vectorize(s) * b), 1e-14);
  }
}

TEST(TimeScheduleType, DoublingTimes) {
  EXPECT_EQ(TimeSchedule{}.times(), (std::vector<double>{20, 40, 80}));
  const std::vector<double> ok = {5, 10, 20, 40};
  EXPECT_EQ(TimeSchedule::from_times(ok).count, 4u);
  const std::vector<double> two = {20, 40}, skew = {20, 40, 90}, neg = {-1, -2, -4};
  EXPECT_THROW(TimeSchedule::from_times(two), data_error);
  EXPECT_THROW(TimeSchedule::from_times(skew), data_error);
  EXPECT_THROW(TimeSchedule::from_times(neg), data_error);
}

// ---- Hamiltonians ----

TEST(NvHamiltonian, TransitionFrequencies) {
  EXPECT_DOUBLE_EQ(nv_hamiltonian({}).transition_mhz, 2880.0);
  NVParams p;
  p.bz = 200;
  const NVHamiltonian h = nv_hamiltonian(p);
  EXPECT_NEAR(h.transition_mhz, 3440.5, 1e-9);
  // Level spacing m_s = 0 -> +1 from the matrix itself.
  EXPECT_NEAR((h.h(0, 0) - h.h(1, 1)).real(), 3440.5, 1e-9);
  EXPECT_NEAR(std::abs(h.h.trace()), 0.0, 1e-9);
  p.e = 5;
  EXPECT_THROW(nv_hamiltonian(p), invalid_argument);
}

TEST(HamiltonianSuperop, ZeroAndResonantFrame) {
  EXPECT_EQ(qubit_hamiltonian(0.0), CMatrix(2, 2));
  EXPECT_EQ(hamiltonian_superop(CMatrix(2, 2)), CMatrix(4, 4));
  EXPECT_THROW(hamiltonian_superop(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), invalid_argument);
}

TEST(HamiltonianSuperop, ActsAsCommutator) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  CMatrix h(2, 2);
  for (auto& v : h.data()) v = cplx(g(rng), g(rng));
  h = hermitian_part(h);
  const Superoperator hh = hamiltonian_superop(h);
  for (std::size_t k = 0; k < 4; ++k) {
    const CMatrix u = matrix_unit(2, k % 2, k / 2);
    EXPECT_LE(distance(apply_superop(hh, u), h * u - u * h), 1e-14);
  }
}

TEST(HamiltonianSuperop, DetuningRotatesXIntoY) {
  const double delta = 0.03, t = 17.0;
  const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(delta));
  const CMatrix out = apply_superop(matrix_exp(hh * cplx(0, -t)), bloch_to_density({1, 0, 0}).matrix());
  const BlochVector r = bloch_of(out);
  EXPECT_NEAR(r.x, std::cos(delta * t), 1e-12);
  EXPECT_NEAR(r.y, std::sin(delta * t), 1e-12);
  EXPECT_NEAR(r.z, 0.0, 1e-12);
}

TEST(HamiltonianSuperop, SpectrumIsEnergyDifferences) {
  const CMatrix h{{0.7, cplx(0.2, -0.1)}, {cplx(0.2, 0.1), -0.4}};
  const auto e = eig_hermitian(h).eigenvalues;
  // H_hat is Hermitian for Hermitian H, so its eigenvalues are real.
  auto got = eig_hermitian(hamiltonian_superop(h)).eigenvalues;
  std::vector<double> want = {0.0, 0.0, e[1] - e[0], e[0] - e[1]};
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

// ---- propagators ----

TEST(PropagatorFromOutputs, IdentityAndDephasing) {
  const auto id = testing::canonical_outputs(testing::identity_channel());
  EXPECT_LE(distance(propagator_from_outputs(std::span<const CMatrix, 4>(id)), CMatrix::identity(4)), 1e-14);
  const double p = 0.2;
  const auto deph = testing::canonical_outputs(testing::dephasing(p));
  CMatrix want = CMatrix::identity(4);
  want(1, 1) = want(2, 2) = 1 - 2 * p;
  EXPECT_LE(distance(propagator_from_outputs(std::span<const CMatrix, 4>(deph)), want), 1e-14);
}

TEST(PropagatorFromOutputs, MatchesSuperopOfChannel) {
  std::mt19937_64 rng(3);
  const auto e = testing::kraus_channel(testing::random_kraus(rng, 3));
  const auto outs = testing::canonical_outputs(e);
  EXPECT_LE(distance(propagator_from_outputs(std::span<const CMatrix, 4>(outs)), superop_from_map(e)), 1e-14);
}

TEST(PropagatorFromOutputs, NvRawEstimateKeepsTraceRow) {
  for (const auto& p : testing::nv_processes()) {
    const auto outs = testing::affine_outputs(p.experimental);
    EXPECT_LE(trace_row_defect(propagator_from_outputs(std::span<const CMatrix, 4>(outs))), 1e-14);
  }
}

// ---- generator estimates ----

TEST(GeneratorLogEstimate, RoundTripAndSpecialCases) {
  std::mt19937_64 rng(4);
  const Superoperator r0 = dissipator_superop(random_gks(rng, 0.01));
  EXPECT_LE(distance(generator_log_estimate(propagator(kZeroH, r0, 30.0), kZeroH, 30.0), r0), 1e-8);

  const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(0.02));
  EXPECT_LE(distance(generator_log_estimate(CMatrix::identity(4), hh, 20.0), hh * cplx(0, -1)), 1e-15);

  const double g = 0.01, t = 20;
  CMatrix p = CMatrix::identity(4);
  p(1, 1) = p(2, 2) = std::exp(-g * t);
  CMatrix want(4, 4);
  want(1, 1) = want(2, 2) = g;
  EXPECT_LE(distance(generator_log_estimate(p, kZeroH, t), want), 1e-14);
  EXPECT_THROW(generator_log_estimate(p, kZeroH, 0.0), invalid_argument);
}

TEST(GeneratorBchEstimate, CommutingCaseIsPureRichardson) {
  // Dephasing along z commutes with a z detuning: error is Richardson truncation only.
  const Superoperator r = dissipator_superop(diag3(0, 0, 0.01));
  const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(0.05));
  const TimeSchedule s{2.0};
  const Superoperator est = generator_bch_estimate(exact_props(hh, r, s), hh, s);
  // Leading term: |R^4| h^3 / 3 with the 4th derivative of exp(-tR) at 0.
  const double bound = std::pow(0.02, 4) * std::pow(2.0, 3) / 3 * std::sqrt(2.0) * 1.01;
  EXPECT_LE(distance(est, r), bound);
  const Superoperator plain = generator_bch_estimate(exact_props(kZeroH, r, s), kZeroH, s);
  EXPECT_LE(distance(plain, est), 1e-14);
}

TEST(GeneratorBchEstimate, NonCommutingConvergence) {
  const Superoperator r = dissipator_superop(diag3(0.01, 0, 0));
  const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(0.05));
  double prev = 0.0;
  for (double t1 : {8.0, 4.0, 2.0, 1.0}) {
    const TimeSchedule s{t1};
    const double err = distance(generator_bch_estimate(exact_props(hh, r, s), hh, s), r);
    if (prev > 0) {
      EXPECT_GE(prev / err, 4.0) << "t1 = " << t1;
    }
    prev = err;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(GeneratorBchEstimate, AgreesWithLogEstimate) {
  const Superoperator r = dissipator_superop(nv_like_gks());
  const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(0.01));
  double prev = 0.0;
  for (double t1 : {8.0, 4.0, 2.0}) {
    const TimeSchedule s{t1};
    const auto props = exact_props(hh, r, s);
    const double gap = distance(generator_bch_estimate(props, hh, s), generator_log_estimate(props[0], hh, t1));
    EXPECT_LE(distance(generator_log_estimate(props[0], hh, t1), r), 1e-10);
    if (prev > 0) {
      EXPECT_GE(prev / gap, 3.5);
    }
    prev = gap;
  }
}

TEST(GeneratorBchEstimate, NeedsThreeTimes) {
  const std::vector<Superoperator> two(2, CMatrix::identity(4));
  EXPECT_THROW(generator_bch_estimate(two, kZeroH, TimeSchedule{}), invalid_argument);
}

// ---- GKS form ----

TEST(GksMatrix, ZeroIdentityAndLayout) {
  EXPECT_EQ(gks_matrix(GKSParams{}), CMatrix(3, 3));
  GKSParams p;
  p.x[0] = p.x[1] = p.x[2] = 1.0;
  EXPECT_EQ(gks_matrix(p), CMatrix::identity(3));
  for (std::size_t i = 0; i < 9; ++i) p.x[i] = static_cast<double>(i + 1);
  const CMatrix f = gks_factor(p);
  EXPECT_EQ(f(1, 0), cplx(4, 5));
  EXPECT_EQ(f(2, 1), cplx(6, 7));
  EXPECT_EQ(f(2, 0), cplx(8, 9));
  EXPECT_EQ(f(0, 1), cplx(0));
}

TEST(GksMatrix, AlwaysPositiveSemidefinite) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    GKSParams p;
    for (double& v : p.x) v = g(rng);
    const GKSMatrix a = gks_matrix(p);
    EXPECT_GE(min_eigenvalue(a), -1e-12 * (1 + a.max_abs()));
    EXPECT_TRUE(is_hermitian(a, 1e-12));
  }
}

TEST(GksParamsFromMatrix, RoundTrip) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const GKSMatrix a = random_gks(rng, 1.0);
    EXPECT_LE(distance(gks_matrix(gks_params_from_matrix(a)), a), 1e-10);
  }
}

TEST(DissipatorSuperop, ZeroAndValidation) {
  EXPECT_EQ(dissipator_superop(CMatrix(3, 3)), CMatrix(4, 4));
  CMatrix bad(3, 3);
  bad(0, 1) = 1.0;
  EXPECT_THROW(dissipator_superop(bad), invalid_argument);
}

TEST(DissipatorSuperop, DephasingAlongZ) {
  const double g = 0.02;
  const Superoperator r = dissipator_superop(diag3(0, 0, g));
  for (double t : {1.0, 25.0, 100.0}) {
    const AffineMap e = chi_to_affine(reconstruct_chi(testing::canonical_outputs([&](const CMatrix& rho) {
      return apply_superop(matrix_exp(r * cplx(-t)), rho);
    })));
    RMatrix want = RMatrix::identity(4);
    want(1, 1) = want(2, 2) = std::exp(-g * t);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(e.matrix()(i, j), want(i, j), 1e-12);
  }
}

TEST(DissipatorSuperop, IsotropicMatchesMasterEquationIntegration) {
  const double gamma = 0.01;
  const Superoperator r = dissipator_superop(diag3(gamma, gamma, gamma));
  const auto& f = gks_basis();
  // Direct RK4 on d rho/dt = gamma sum_k (F_k rho F_k - {F_k F_k, rho}/2).
  auto rhs = [&](const CMatrix& rho) {
    CMatrix d(2, 2);
    for (const auto& fk : f) {
      const CMatrix k = fk.adjoint() * fk;
      d += (fk * rho * fk.adjoint() - (k * rho + rho * k) * cplx(0.5)) * cplx(gamma);
    }
    return d;
  };
  const CMatrix rho0 = bloch_to_density({0.3, -0.5, 0.6}).matrix();
  CMatrix rho = rho0;
  const double t_end = 50.0, h = 0.05;
  for (int step = 0; step < static_cast<int>(t_end / h + 0.5); ++step) {
    const CMatrix k1 = rhs(rho);
    const CMatrix k2 = rhs(rho + k1 * cplx(h / 2));
    const CMatrix k3 = rhs(rho + k2 * cplx(h / 2));
    const CMatrix k4 = rhs(rho + k3 * cplx(h));
    rho += (k1 + k2 * cplx(2.0) + k3 * cplx(2.0) + k4) * cplx(h / 6);
  }
  const CMatrix via_exp = apply_superop(matrix_exp(r * cplx(-t_end)), rho0);
  EXPECT_LE(distance(via_exp, rho), 1e-10);
  const BlochVector b = bloch_of(via_exp);
  const double shrink = std::exp(-2 * gamma * t_end);
  EXPECT_NEAR(b.x, 0.3 * shrink, 1e-12);
  EXPECT_NEAR(b.y, -0.5 * shrink, 1e-12);
  EXPECT_NEAR(b.z, 0.6 * shrink, 1e-12);
}

TEST(DissipatorSuperop, AmplitudeDampingFromLoweringOperator) {
  // L = sqrt(g) |0><1| relaxes towards |0>.
  const double g = 0.01;
  const std::vector<CMatrix> ops = {CMatrix{{0.0, std::sqrt(g)}, {0.0, 0.0}}};
  const GKSMatrix a = gks_from_lindblads(ops);
  EXPECT_LE(distance(dissipator_superop(a), lindblad_relaxation(ops)), 1e-15);
  const double t = 40;
  const CMatrix out = apply_superop(propagator(kZeroH, dissipator_superop(a), t), CMatrix{{0.0, 0.0}, {0.0, 1.0}});
  EXPECT_NEAR(out(1, 1).real(), std::exp(-g * t), 1e-12);
}

TEST(DissipatorSuperop, TracePreservedOverLongTimes) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Superoperator r = dissipator_superop(random_gks(rng, 0.02));
    const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(0.03 * trial));
    for (double t = 0; t <= 1000; t += 50) {
      EXPECT_LE(trace_row_defect(propagator(hh, r, t)), 1e-9) << t;
    }
  }
}

TEST(DissipatorSuperop, EvolutionKeepsStatesValid) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Superoperator r = dissipator_superop(random_gks(rng, 0.05));
    const Superoperator hh = hamiltonian_superop(qubit_hamiltonian(0.1));
    for (double t : {0.5, 5.0, 50.0, 500.0}) {
      BlochVector b{u(rng), u(rng), u(rng)};
      const double n = b.norm();
      if (n > 1) b = {b.x / n, b.y / n, b.z / n};
      const CMatrix out = apply_superop(propagator(hh, r, t), bloch_to_density(b).matrix());
      EXPECT_GE(min_eigenvalue(hermitian_part(out)), -1e-6);
    }
  }
}

// ---- start point bridge ----

TEST(GksStart, RecoversKnownMatrix) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const GKSMatrix a0 = random_gks(rng, 0.02);
    const GKSStart s = gks_start_from_generator(dissipator_superop(a0));
    EXPECT_LE(distance(gks_matrix(s.x), a0), 1e-8);
    EXPECT_LE(s.residual, 1e-12);
  }
}

TEST(GksStart, ZeroGenerator) {
  const GKSStart s = gks_start_from_generator(CMatrix(4, 4));
  for (double v : s.x.x) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(GksStart, DiscardsHamiltonianLeakage) {
  const GKSMatrix a0 = nv_like_gks();
  const Superoperator leak = hamiltonian_superop(qubit_hamiltonian(0.004)) * cplx(0, 1);
  const GKSStart s = gks_start_from_generator(dissipator_superop(a0) + leak);
  // The commutator part lies outside the range of a -> R(a).
  EXPECT_NEAR(s.residual, leak.frobenius_norm(), 1e-12);
  EXPECT_LE(distance(s.least_squares, a0), 1e-12);
}

TEST(GksStart, ClipsIndefiniteEstimate) {
  const GKSStart s = gks_start_from_generator(dissipator_superop(diag3(0.01, -0.002, 0.0)) * cplx(1.0));
  EXPECT_LT(min_eigenvalue(s.least_squares), -1e-3);
  EXPECT_LE(distance(gks_matrix(s.x), diag3(0.01, 0, 0)), 1e-9);
}

// ---- constrained fit ----

TEST(FitGenerator, RecoversSyntheticMarkovianGenerator) {
  std::mt19937_64 rng(10);
  const TimeSchedule s;
  for (int trial = 0; trial < 3; ++trial) {
    const GKSMatrix a0 = trial == 0 ? nv_like_gks() : random_gks(rng, 0.01);
    const auto props = exact_props(kZeroH, dissipator_superop(a0), s);
    const MarkovianEstimate est = estimate_markovian(props, kZeroH, s);
    EXPECT_LE(distance(est.fit.a, a0), 1e-6) << trial;
    EXPECT_LE(est.fit.residual, est.fit.start_residual);
  }
}

TEST(FitGenerator, OnePercentPropagatorNoise) {
  const GKSMatrix a0 = nv_like_gks();
  const TimeSchedule s;
  const auto clean = exact_props(kZeroH, dissipator_superop(a0), s);
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.01);
    auto noisy = clean;
    for (auto& p : noisy)
      for (auto& v : p.data()) v += cplx(g(rng), g(rng));
    const MarkovianEstimate est = estimate_markovian(noisy, kZeroH, s);
    EXPECT_LE(est.fit.residual, est.fit.start_residual);
    errors.push_back(distance(est.fit.a, a0) / a0.frobenius_norm());
  }
  std::nth_element(errors.begin(), errors.begin() + 10, errors.end());
  EXPECT_LE(errors[10], 0.10);
}

TEST(FitGenerator, NvPropagatorsGiveZDephasingDominance) {
  const auto props = nv_propagators();
  const MarkovianEstimate est = estimate_markovian(props, kZeroH, TimeSchedule{});
  ASSERT_FALSE(est.lindblads.ops.empty());
  EXPECT_GT(est.lindblads.contributions[0], 0.85);
  const CMatrix& l = est.lindblads.ops[0];
  // sigma_z-like: most of |L|^2 along sigma_z, and traceless.
  const double along_z = std::norm((pauli::Z() * l).trace()) / 2;
  EXPECT_GT(along_z / std::pow(l.frobenius_norm(), 2), 0.9);
  EXPECT_NEAR(std::abs(l(0, 0) + l(1, 1)), 0.0, 1e-9);
  EXPECT_LE(est.fit.residual, est.fit.start_residual);
  EXPECT_GE(min_eigenvalue(est.fit.a), -1e-9);
}

TEST(FitGenerator, RejectsMismatchedSchedule) {
  const std::vector<Superoperator> two(2, CMatrix::identity(4));
  EXPECT_THROW(fit_generator(two, kZeroH, TimeSchedule{}, GKSParams{}), invalid_argument);
}

// ---- Lindblad operators ----

TEST(LindbladsFromGks, SingleAndDegenerate) {
  const double g = 0.3;
  const LindbladSet one = lindblads_from_gks(diag3(g, 0, 0));
  ASSERT_EQ(one.ops.size(), 1u);
  EXPECT_NEAR(one.contributions[0], 1.0, 1e-15);
  const CMatrix l = one.ops[0];
  // sqrt(g/2) sigma_x up to a global phase.
  const cplx phase = l(0, 1) / std::abs(l(0, 1));
  EXPECT_LE(distance(l, pauli::X() * (phase * std::sqrt(g / 2))), 1e-12);

  const LindbladSet two = lindblads_from_gks(diag3(0.2, 0.2, 0));
  ASSERT_EQ(two.ops.size(), 2u);
  EXPECT_NEAR(two.contributions[0], 0.5, 1e-12);
  EXPECT_NEAR(two.contributions[1], 0.5, 1e-12);
  EXPECT_TRUE(lindblads_from_gks(CMatrix(3, 3)).ops.empty());
  EXPECT_THROW(lindblads_from_gks(diag3(0.1, -0.01, 0)), numerical_error);
}

TEST(LindbladsFromGks, InvariantsOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const GKSMatrix a = random_gks(rng, 0.05);
    const LindbladSet s = lindblads_from_gks(a);
    double total = 0.0;
    for (std::size_t i = 0; i < s.ops.size(); ++i) {
      EXPECT_LE(std::abs(s.ops[i].trace()), 1e-9);
      EXPECT_GE(s.contributions[i], 0.0);
      total += s.contributions[i];
      if (i > 0) {
        EXPECT_LE(s.rates[i], s.rates[i - 1]);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_LE(distance(lindblad_relaxation(s.ops), dissipator_superop(a)), 1e-9);
    EXPECT_LE(distance(gks_from_lindblads(s.ops), a), 1e-9);
  }
}

TEST(LindbladsFromGks, NvOperatorContributions) {
  const auto nv = testing::nv_lindblads();
  std::vector<CMatrix> ops;
  for (const auto& l : nv) ops.push_back(l.op);
  const auto w = relative_contributions(ops);
  for (std::size_t i = 0; i < nv.size(); ++i) EXPECT_NEAR(100 * w[i], nv[i].contribution_percent, 0.2) << i;
  // Printed operators are only orthogonal up to rounding, so re-extraction moves weights slightly.
  const LindbladSet again = lindblads_from_gks(gks_from_lindblads(ops));
  for (std::size_t i = 0; i < again.contributions.size(); ++i) {
    EXPECT_NEAR(100 * again.contributions[i], nv[i].contribution_percent, 0.2);
  }
}

// ---- predictions ----

TEST(PredictExpectations, NoDynamicsIsConstant) {
  const DensityMatrix rho = bloch_to_density({0.2, 0.3, -0.4});
  const std::vector<double> times = {0, 10, 100};
  for (const auto& e : predict_expectations(kZeroH, kZeroH, rho, times)) {
    EXPECT_NEAR(e.sx.value(), 0.2, 1e-14);
    EXPECT_NEAR(e.sy.value(), 0.3, 1e-14);
    EXPECT_NEAR(e.sz.value(), -0.4, 1e-14);
  }
}

TEST(PredictExpectations, PureDephasingOnPlusState) {
  const double g = 0.02;
  const std::vector<double> times = {0, 20, 40, 80};
  const auto e = predict_expectations(dissipator_superop(diag3(0, 0, g)), kZeroH, bloch_to_density({1, 0, 0}),
                                      times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_NEAR(e[i].sx.value(), std::exp(-g * times[i]), 1e-12);
    EXPECT_NEAR(e[i].sz.value(), 0.0, 1e-14);
  }
  EXPECT_EQ(e[0].sx.value(), 1.0);
}

TEST(PredictExpectations, FittedNvGeneratorTracksMeasuredOutputs) {
  const auto props = nv_propagators();
  const MarkovianEstimate est = estimate_markovian(props, kZeroH, TimeSchedule{});
  const auto inputs = InputStateSet::canonical();
  const auto nv = testing::nv_processes();
  const std::vector<double> times = {20, 40, 80};
  for (std::size_t j = 0; j < 4; ++j) {
    const auto pred = predict_expectations(est.fit.relaxation, kZeroH, inputs.states[j], times);
    for (std::size_t m = 0; m < 3; ++m) {
      const BlochVector meas = nv[m].reconstructed.apply(InputStateSet::bloch_vectors()[j]);
      EXPECT_NEAR(pred[m].sx.value(), meas.x, 0.15);
      EXPECT_NEAR(pred[m].sy.value(), meas.y, 0.15);
      EXPECT_NEAR(pred[m].sz.value(), meas.z, 0.15);
    }
  }
}

}  // namespace
}  // namespace qptkit
