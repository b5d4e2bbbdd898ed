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
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qptkit/errors.hpp"
#include "qptkit/numkit.hpp"
#include "qptkit/qstate.hpp"
#include "qptkit/tolerances.hpp"

namespace qptkit {

/// Four linearly independent 2x2 operators A_1..A_4 used to expand a process.
class OperatorBasis {
 public:
  OperatorBasis(std::string name, std::array<CMatrix, 4> ops) : name_(std::move(name)), ops_(std::move(ops)) {
    CMatrix cols(4, 4);
    for (std::size_t k = 0; k < 4; ++k) {
      if (ops_[k].rows() != 2 || ops_[k].cols() != 2) {
        throw invalid_argument("OperatorBasis: operators must be 2x2");
      }
      for (std::size_t i = 0; i < 4; ++i) cols(i, k) = ops_[k].data()[i];
    }
    const auto sv = singular_values(cols);
    if (sv.back() <= 1e-10 * sv.front()) {
      throw invalid_argument("OperatorBasis: operators are linearly dependent (singular Gram matrix)");
    }
  }

  /// Matrix units, A_{2i+j} = |i><j| (zero-based).
  static OperatorBasis normal() {
    return OperatorBasis("normal", {matrix_unit(2, 0, 0), matrix_unit(2, 0, 1), matrix_unit(2, 1, 0),
                                    matrix_unit(2, 1, 1)});
  }

  static OperatorBasis pauli() {
    return OperatorBasis("pauli", {pauli::I(), pauli::X(), pauli::Y(), pauli::Z()});
  }

  const std::string& name() const { return name_; }
  const CMatrix& operator[](std::size_t k) const { return ops_[k]; }
  const std::array<CMatrix, 4>& ops() const { return ops_; }
  bool is_normal() const { return name_ == "normal"; }

 private:
  std::string name_;
  std::array<CMatrix, 4> ops_;
};

/// The four canonical inputs |0>, |1>, (|0>+|1>)/sqrt2, (|0>+i|1>)/sqrt2.
struct InputStateSet {
  std::array<DensityMatrix, 4> states;

  static InputStateSet canonical() {
    const double h = 1.0 / std::numbers::sqrt2;
    return {{pure_state(1.0, 0.0), pure_state(0.0, 1.0), pure_state(h, h), pure_state(h, cplx(0, h))}};
  }

  static constexpr std::array<const char*, 4> kLabels = {"z+", "z-", "x+", "y+"};

  static std::array<BlochVector, 4> bloch_vectors() {
    return {BlochVector{0, 0, 1}, BlochVector{0, 0, -1}, BlochVector{1, 0, 0}, BlochVector{0, 1, 0}};
  }
};

/// Process matrix chi over an operator basis; Hermitian, not necessarily positive.
class ChiMatrix {
 public:
  ChiMatrix(CMatrix m, OperatorBasis basis, double tol = kDefaultTolerances.hermitian)
      : basis_(std::move(basis)) {
    if (m.rows() != 4 || m.cols() != 4) throw invalid_argument("ChiMatrix: must be 4x4");
    if (!m.all_finite()) throw invalid_argument("ChiMatrix: non-finite entries");
    if (!is_hermitian(m, tol * std::max(1.0, m.max_abs()))) {
      throw invalid_argument("ChiMatrix: not Hermitian");
    }
    m_ = hermitian_part(m);
  }

  explicit ChiMatrix(CMatrix m) : ChiMatrix(std::move(m), OperatorBasis::normal()) {}

  const CMatrix& matrix() const { return m_; }
  const OperatorBasis& basis() const { return basis_; }
  cplx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  CMatrix m_;
  OperatorBasis basis_;
};

/// lambda_{jk}: coefficient of the k-th matrix unit in E(rho_j).
struct LambdaMatrix {
  CMatrix matrix;
};

/// beta^{mn}_{jk} stored as a 16x16 matrix, row 4j+k, column 4m+n.
struct BetaTensor {
  CMatrix matrix;
  OperatorBasis basis;
};

struct KrausSet {
  std::vector<CMatrix> ops;
};

/// Real 4x4 map on (1, r): first row (1,0,0,0), then (t | E).
class AffineMap {
 public:
  explicit AffineMap(RMatrix m) {
    if (m.rows() != 4 || m.cols() != 4) throw invalid_argument("AffineMap: must be 4x4");
    if (!m.all_finite()) throw invalid_argument("AffineMap: non-finite entries");
    if (m(0, 0) != 1.0 || m(0, 1) != 0.0 || m(0, 2) != 0.0 || m(0, 3) != 0.0) {
      throw invalid_argument("AffineMap: first row must be (1, 0, 0, 0)");
    }
    m_ = std::move(m);
  }

  static AffineMap identity() { return AffineMap(RMatrix::identity(4)); }

  static AffineMap from_parts(const RMatrix& e, const BlochVector& t) {
    RMatrix m = RMatrix::identity(4);
    const double tv[3] = {t.x, t.y, t.z};
    for (std::size_t i = 0; i < 3; ++i) {
      m(i + 1, 0) = tv[i];
      for (std::size_t j = 0; j < 3; ++j) m(i + 1, j + 1) = e(i, j);
    }
    return AffineMap(std::move(m));
  }

  const RMatrix& matrix() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  RMatrix linear_part() const { return m_.block(1, 1, 3, 3); }
  BlochVector translation() const { return {m_(1, 0), m_(2, 0), m_(3, 0)}; }

  BlochVector apply(const BlochVector& r) const {
    const double in[4] = {1.0, r.x, r.y, r.z};
    double out[4] = {0, 0, 0, 0};
    for (std::size_t i = 1; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) out[i] += m_(i, j) * in[j];
    return {out[1], out[2], out[3]};
  }

 private:
  RMatrix m_;
};

// Index k of the matrix-unit expansion basis is |k/2><k%2|.
inline CMatrix expansion_unit(std::size_t k) { return matrix_unit(2, k / 2, k % 2); }

inline BetaTensor build_beta(const OperatorBasis& basis,
                             const InputStateSet& states = InputStateSet::canonical()) {
  CMatrix beta(16, 16);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n) {
      const CMatrix right = basis[n].adjoint();
      for (std::size_t j = 0; j < 4; ++j) {
        const CMatrix img = basis[m] * states.states[j].matrix() * right;
        for (std::size_t k = 0; k < 4; ++k) beta(4 * j + k, 4 * m + n) = img.data()[k];
      }
    }
  return {std::move(beta), basis};
}

/// Images of |0><0|, |0><1|, |1><0|, |1><1| reconstructed by linearity from
/// the outputs of the four canonical inputs.
inline std::array<CMatrix, 4> matrix_unit_images(std::span<const CMatrix, 4> outputs) {
  const cplx i(0, 1);
  const CMatrix pop_sum = outputs[0] + outputs[1];
  const CMatrix e01 = outputs[2] + i * outputs[3] - cplx(0.5, 0.5) * pop_sum;
  const CMatrix e10 = outputs[2] - i * outputs[3] - cplx(0.5, -0.5) * pop_sum;
  return {outputs[0], e01, e10, outputs[1]};
}

inline LambdaMatrix lambda_from_outputs(std::span<const CMatrix, 4> outputs) {
  CMatrix lambda(4, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    if (outputs[j].rows() != 2 || outputs[j].cols() != 2) {
      throw invalid_argument("lambda_from_outputs: outputs must be 2x2");
    }
    for (std::size_t k = 0; k < 4; ++k) lambda(j, k) = outputs[j].data()[k];
  }
  return {std::move(lambda)};
}

inline LambdaMatrix lambda_from_outputs(std::span<const DensityMatrix, 4> outputs) {
  const std::array<CMatrix, 4> m = {outputs[0].matrix(), outputs[1].matrix(), outputs[2].matrix(),
                                    outputs[3].matrix()};
  return lambda_from_outputs(std::span<const CMatrix, 4>(m));
}

/// chi = reshape(beta^+ vec(lambda)).
inline ChiMatrix chi_from_lambda(const LambdaMatrix& lambda, const BetaTensor& beta) {
  if (lambda.matrix.rows() != 4 || lambda.matrix.cols() != 4 || beta.matrix.rows() != 16 ||
      beta.matrix.cols() != 16) {
    throw invalid_argument("chi_from_lambda: shape mismatch");
  }
  CMatrix vec(16, 1);
  for (std::size_t i = 0; i < 16; ++i) vec(i, 0) = lambda.matrix.data()[i];
  const CMatrix chi_vec = pseudoinverse(beta.matrix) * vec;
  CMatrix chi(4, 4);
  for (std::size_t i = 0; i < 16; ++i) chi.data()[i] = chi_vec(i, 0);
  return ChiMatrix(std::move(chi), beta.basis);
}

/// E(rho) = sum_mn chi_mn A_m rho A_n^dagger, evaluated literally.
inline CMatrix apply_chi(const ChiMatrix& chi, const CMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw invalid_argument("apply_chi: operand must be 2x2");
  const auto& a = chi.basis();
  CMatrix out(2, 2);
  for (std::size_t m = 0; m < 4; ++m) {
    const CMatrix left = a[m] * rho;
    for (std::size_t n = 0; n < 4; ++n) {
      if (chi(m, n) == cplx{}) continue;
      out += chi(m, n) * (left * a[n].adjoint());
    }
  }
  return out;
}

inline CMatrix apply_chi(const ChiMatrix& chi, const DensityMatrix& rho) {
  return apply_chi(chi, rho.matrix());
}

inline CMatrix apply_kraus(const KrausSet& k, const CMatrix& rho) {
  CMatrix out(rho.rows(), rho.cols());
  for (const auto& e : k.ops) out += e * rho * e.adjoint();
  return out;
}

/// Kraus operators E_i = sqrt(d_i) sum_j U_ji A_j from the spectrum of chi.
inline KrausSet kraus_from_chi(const ChiMatrix& chi, double neg_tol = kDefaultTolerances.kraus_negative_eig) {
  const EigResult e = eig_hermitian(chi.matrix());
  if (e.eigenvalues.front() < -neg_tol) {
    throw numerical_error("kraus_from_chi: chi is not completely positive (negative eigenvalue); "
                          "project it to the nearest CP map first");
  }
  const double dmax = std::max(e.eigenvalues.back(), 0.0);
  KrausSet out;
  for (std::size_t i = e.eigenvalues.size(); i-- > 0;) {
    const double d = e.eigenvalues[i];
    if (d <= 1e-14 * std::max(1.0, dmax)) continue;
    CMatrix op(2, 2);
    for (std::size_t j = 0; j < 4; ++j) op += e.eigenvectors(j, i) * chi.basis()[j];
    out.ops.push_back(std::sqrt(d) * op);
  }
  return out;
}

/// Normal-basis chi of a linear map given by its action on 2x2 operators:
/// chi = C = sum_ij E(|i><j|) (x) |i><j|.
inline ChiMatrix chi_from_channel(const std::function<CMatrix(const CMatrix&)>& channel) {
  CMatrix c(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) c += kron(channel(matrix_unit(2, i, j)), matrix_unit(2, i, j));
  return ChiMatrix(std::move(c));
}

/// Re-expresses chi in another operator basis: with A_m = sum_k C_mk B_k,
/// chi'_kl = sum_mn C_mk chi_mn conj(C_nl).
inline ChiMatrix convert_basis(const ChiMatrix& chi, const OperatorBasis& target) {
  CMatrix b(4, 4);
  CMatrix a(4, 4);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 4; ++i) {
      b(i, k) = target[k].data()[i];
      a(i, k) = chi.basis()[k].data()[i];
    }
  const CMatrix coef = solve(b, a);  // column m holds the coordinates of A_m, i.e. C^T
  const CMatrix c = coef.transpose();
  return ChiMatrix(c.transpose() * chi.matrix() * c.conj(), target);
}

inline ChiMatrix to_normal_basis(const ChiMatrix& chi) {
  return chi.basis().is_normal() ? chi : convert_basis(chi, OperatorBasis::normal());
}

/// Affine (Bloch) form; the first row is fixed to (1,0,0,0), so for a map
/// that is not trace preserving this describes its action on the Bloch
/// components only (see tp_defect).
inline AffineMap chi_to_affine(const ChiMatrix& chi) {
  const std::array<CMatrix, 4> sigma = {pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
  RMatrix m = RMatrix::identity(4);
  for (std::size_t j = 0; j < 4; ++j) {
    const CMatrix img = apply_chi(chi, sigma[j]);
    for (std::size_t i = 1; i < 4; ++i) m(i, j) = 0.5 * (sigma[i] * img).trace().real();
  }
  m(0, 0) = 1.0;
  m(0, 1) = m(0, 2) = m(0, 3) = 0.0;
  return AffineMap(std::move(m));
}

/// The linear map on 2x2 operators represented by an affine matrix.
inline CMatrix apply_affine(const AffineMap& e, const CMatrix& op) {
  const std::array<CMatrix, 4> sigma = {pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
  CMatrix out(2, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    // op = 1/2 sum_k tr(sigma_k op) sigma_k; E(sigma_k) = sum_i m(i,k) sigma_i.
    const cplx coord = 0.5 * (sigma[k] * op).trace();
    if (coord == cplx{}) continue;
    for (std::size_t i = 0; i < 4; ++i) out += coord * e(i, k) * sigma[i];
  }
  return out;
}

inline ChiMatrix affine_to_chi(const AffineMap& e) {
  return chi_from_channel([&](const CMatrix& op) { return apply_affine(e, op); });
}

/// Choi matrix sum_ij E(|i><j|) (x) |i><j|; identical to chi in the normal basis.
inline CMatrix chi_to_choi(const ChiMatrix& chi) {
  if (!chi.basis().is_normal()) {
    throw invalid_argument("chi_to_choi: chi must be in the normal basis (convert first)");
  }
  return chi.matrix();
}

/// Jamiolkowski state rho_E = chi / d with d = 2.
inline CMatrix jamiolkowski_state(const ChiMatrix& chi) { return chi_to_choi(chi) * cplx(0.5); }

/// |sum_mn chi_mn A_n^dagger A_m - I|_Fro.
inline double tp_defect(const ChiMatrix& chi) {
  CMatrix s(2, 2);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n) s += chi(m, n) * (chi.basis()[n].adjoint() * chi.basis()[m]);
  return (s - CMatrix::identity(2)).frobenius_norm();
}

struct UnphysicalityNorms {
  double p1 = 0.0;     // max absolute column sum
  double p2 = 0.0;     // largest singular value
  double fro = 0.0;    // Frobenius
  double d_pro = 0.0;  // half the trace norm
};

inline UnphysicalityNorms unphysicality_norms(const ChiMatrix& chi, const ChiMatrix& chi_tilde) {
  if (chi.basis().name() != chi_tilde.basis().name()) {
    throw invalid_argument("unphysicality_norms: chi matrices are in different bases");
  }
  const CMatrix x = chi.matrix() - chi_tilde.matrix();
  const auto sv = singular_values(x);
  double trace_norm = 0.0;
  for (double s : sv) trace_norm += s;
  return {x.norm1(), sv.front(), x.frobenius_norm(), 0.5 * trace_norm};
}

struct EllipsoidPoint {
  BlochVector input;
  BlochVector output;
  bool violation = false;  // output outside the Bloch ball
};

/// Pushes n Fibonacci-spiral points of the unit sphere through the affine map.
inline std::vector<EllipsoidPoint> ellipsoid_samples(const AffineMap& e, std::size_t n,
                                                     double tol = kDefaultTolerances.ellipsoid_violation) {
  if (n == 0) throw invalid_argument("ellipsoid_samples: need at least one point");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<EllipsoidPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    const BlochVector in{rho * std::cos(phi), rho * std::sin(phi), z};
    const BlochVector o = e.apply(in);
    out.push_back({in, o, o.norm() > 1.0 + tol});
  }
  return out;
}

/// Full standard-tomography chain for measured output states.
inline ChiMatrix reconstruct_chi(std::span<const CMatrix, 4> outputs,
                                 const OperatorBasis& basis = OperatorBasis::normal()) {
  return chi_from_lambda(lambda_from_outputs(outputs), build_beta(basis));
}

}  // namespace qptkit
