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

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "qptkit/errors.hpp"
#include "qptkit/numkit.hpp"
#include "qptkit/tolerances.hpp"

// Single-qubit states. Pole convention throughout: |0> has Bloch z = +1.

namespace qptkit {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// A validated 2x2 density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m, const Tolerances& tol = kDefaultTolerances) {
    if (m.rows() != 2 || m.cols() != 2) throw invalid_argument("DensityMatrix: must be 2x2");
    if (!m.all_finite()) throw invalid_argument("DensityMatrix: non-finite entries");
    if (!is_hermitian(m, tol.state_hermitian)) throw invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace() - 1.0) > tol.state_trace) {
      throw invalid_argument("DensityMatrix: trace is not 1");
    }
    m = hermitian_part(m);
    // For a 2x2 unit-trace Hermitian matrix the smaller eigenvalue is (1 - |r|)/2.
    const double r = std::sqrt(std::norm(m(0, 0) - m(1, 1)) + 4 * std::norm(m(0, 1)));
    if ((1.0 - r) / 2.0 < -tol.state_min_eig) {
      throw invalid_argument("DensityMatrix: negative eigenvalue");
    }
    m_ = std::move(m);
  }

  const CMatrix& matrix() const { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  CMatrix m_;
};

/// Pauli expectation values; an unset component was not measured.
struct PauliExpectations {
  std::optional<double> sx;
  std::optional<double> sy;
  std::optional<double> sz;

  friend bool operator==(const PauliExpectations&, const PauliExpectations&) = default;
};

/// rho = (I + r . sigma) / 2. Norms within tolerance of 1 are clamped onto the sphere.
inline DensityMatrix bloch_to_density(BlochVector r, double tol = kDefaultTolerances.bloch_norm) {
  if (!std::isfinite(r.x) || !std::isfinite(r.y) || !std::isfinite(r.z)) {
    throw invalid_argument("bloch_to_density: non-finite Bloch vector");
  }
  const double n = r.norm();
  if (n > 1.0 + tol) throw invalid_argument("bloch_to_density: |r| > 1 is not a valid state");
  if (n > 1.0) {
    r.x /= n;
    r.y /= n;
    r.z /= n;
  }
  CMatrix m{{0.5 * (1.0 + r.z), cplx(0.5 * r.x, -0.5 * r.y)},
            {cplx(0.5 * r.x, 0.5 * r.y), 0.5 * (1.0 - r.z)}};
  return DensityMatrix(std::move(m));
}

/// r_i = tr(rho sigma_i) for any 2x2 operator (real part taken).
inline BlochVector bloch_of(const CMatrix& m) {
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

inline BlochVector density_to_bloch(const DensityMatrix& rho) { return bloch_of(rho.matrix()); }

/// Pure-state projector |psi><psi| for a normalized 2-vector.
inline DensityMatrix pure_state(cplx a0, cplx a1) {
  const double n2 = std::norm(a0) + std::norm(a1);
  if (std::abs(n2 - 1.0) > 1e-9) throw invalid_argument("pure_state: vector is not normalized");
  CMatrix m{{a0 * std::conj(a0), a0 * std::conj(a1)}, {a1 * std::conj(a0), a1 * std::conj(a1)}};
  return DensityMatrix(std::move(m));
}

/// (1 - alpha)/2 I + alpha |psi><psi|.
inline DensityMatrix make_pseudopure(double alpha, const DensityMatrix& psi) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw invalid_argument("make_pseudopure: alpha outside [0, 1]");
  CMatrix m = CMatrix::identity(2) * cplx(0.5 * (1.0 - alpha)) + psi.matrix() * cplx(alpha);
  return DensityMatrix(std::move(m));
}

/// Maximum-entropy state consistent with the measured Pauli expectations.
///
/// Unmeasured components are zero (the entropy maximizer under no
/// constraint). A measured sub-vector outside the unit ball is scaled
/// radially onto the sphere, the closest physical match.
inline DensityMatrix maxent_reconstruct(const PauliExpectations& e) {
  BlochVector r{e.sx.value_or(0.0), e.sy.value_or(0.0), e.sz.value_or(0.0)};
  const double n = r.norm();
  if (n > 1.0) {
    r.x /= n;
    r.y /= n;
    r.z /= n;
  }
  return bloch_to_density(r);
}

inline PauliExpectations expectations_of(const CMatrix& rho) {
  const BlochVector r = bloch_of(rho);
  return {r.x, r.y, r.z};
}

// Metrics below accept any Hermitian matrices of equal dimension, so they
// serve both qubit states and 4x4 Jamiolkowski states.

/// D = 1/2 tr|rho1 - rho2|.
inline double trace_distance(const CMatrix& rho1, const CMatrix& rho2) {
  const auto ev = eig_hermitian(rho1 - rho2).eigenvalues;
  double s = 0.0;
  for (double v : ev) s += std::abs(v);
  return 0.5 * s;
}

/// F = (tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, clamped to [0, 1].
inline double fidelity(const CMatrix& rho1, const CMatrix& rho2) {
  const CMatrix s1 = sqrt_psd(rho1);
  const CMatrix inner_m = hermitian_part(s1 * rho2 * s1);
  const auto ev = eig_hermitian(inner_m).eigenvalues;
  double tr = 0.0;
  for (double v : ev) tr += std::sqrt(std::max(v, 0.0));
  return std::clamp(tr * tr, 0.0, 1.0);
}

inline double bures(const CMatrix& rho1, const CMatrix& rho2) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(fidelity(rho1, rho2))));
}

inline double c_metric(const CMatrix& rho1, const CMatrix& rho2) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(rho1, rho2)));
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  return fidelity(a.matrix(), b.matrix());
}
inline double bures(const DensityMatrix& a, const DensityMatrix& b) { return bures(a.matrix(), b.matrix()); }
inline double c_metric(const DensityMatrix& a, const DensityMatrix& b) {
  return c_metric(a.matrix(), b.matrix());
}

}  // namespace qptkit
