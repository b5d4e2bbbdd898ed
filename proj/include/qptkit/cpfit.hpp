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
#include <string>
#include <vector>

#include "qptkit/numkit.hpp"
#include "qptkit/qpt.hpp"
#include "qptkit/tolerances.hpp"

// Repair of an estimated chi to the nearest completely positive,
// trace-preserving process.

namespace qptkit {

/// 16 reals t(1)..t(16) (stored zero-based) filling the lower-triangular
/// T(t); the fitted process is chi = T^dagger T.
///
///     t1           0           0          0
///     t5 + i t6    t2          0          0
///     t11 + i t12  t7 + i t8   t3         0
///     t15 + i t16  t13 + i t14 t9 + i t10 t4
struct CholeskyParams {
  std::array<double, 16> t{};
};

namespace detail {

struct TriangleSlot {
  std::size_t row, col, re, im;  // im == re for real diagonal slots
};

inline constexpr std::array<TriangleSlot, 10> kChiLayout = {{
    {0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 2}, {3, 3, 3, 3},
    {1, 0, 4, 5}, {2, 1, 6, 7}, {3, 2, 8, 9},
    {2, 0, 10, 11}, {3, 1, 12, 13}, {3, 0, 14, 15},
}};

}  // namespace detail

inline CMatrix cholesky_params_matrix(const CholeskyParams& p) {
  CMatrix t(4, 4);
  for (const auto& s : detail::kChiLayout) {
    t(s.row, s.col) = s.row == s.col ? cplx(p.t[s.re]) : cplx(p.t[s.re], p.t[s.im]);
  }
  return t;
}

inline ChiMatrix chi_from_params(const CholeskyParams& p) {
  const CMatrix t = cholesky_params_matrix(p);
  return ChiMatrix(t.adjoint() * t);
}

/// U max(D, 0) U^dagger.
inline ChiMatrix clip_negative_eigs(const ChiMatrix& chi) {
  const EigResult e = eig_hermitian(chi.matrix());
  return ChiMatrix(hermitian_function(e, [](double d) { return cplx(std::max(d, 0.0)); }), chi.basis());
}

/// Parameters whose T^dagger T reproduces a positive semidefinite chi.
inline CholeskyParams initial_params(const ChiMatrix& chi_star) {
  const CMatrix t = cholesky_reversed_lower(chi_star.matrix());
  CholeskyParams p;
  for (const auto& s : detail::kChiLayout) {
    p.t[s.re] = t(s.row, s.col).real();
    if (s.row != s.col) p.t[s.im] = t(s.row, s.col).imag();
  }
  return p;
}

/// sum |chi~(t) - chi|^2 + lagrange * |sum chi~_mn A_n^dagger A_m - I|^2
/// in the normal basis, both terms as squared Frobenius norms.
inline double deviation(const CholeskyParams& p, const ChiMatrix& chi, double lagrange) {
  if (!chi.basis().is_normal()) throw invalid_argument("deviation: chi must be in the normal basis");
  const CMatrix t = cholesky_params_matrix(p);
  const CMatrix fitted = t.adjoint() * t;
  double fit = 0.0;
  for (std::size_t i = 0; i < 16; ++i) fit += std::norm(fitted.data()[i] - chi.matrix().data()[i]);
  // Normal basis: (sum_mn chi_mn A_n^dagger A_m)_{ab} = sum_i chi_{2i+b, 2i+a}.
  double penalty = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      cplx s = fitted(b, a) + fitted(2 + b, 2 + a);
      if (a == b) s -= 1.0;
      penalty += std::norm(s);
    }
  return fit + lagrange * penalty;
}

struct ProjectionOptions {
  double lagrange = kDefaultTolerances.projection_lagrange;
  SimplexOptions simplex{1e-12, 1e-9, 40000, 2};
  double min_eig_threshold = kDefaultTolerances.projection_min_eig;
  double tp_threshold = kDefaultTolerances.projection_tp_defect;
};

struct ProjectionDiagnostics {
  double min_eigenvalue = 0.0;
  double tp_defect = 0.0;
  double frobenius_distance = 0.0;  // |chi - chi~|_Fro
  double input_min_eigenvalue = 0.0;
  bool success = false;
  std::string message;
};

struct ProjectionResult {
  ChiMatrix chi;
  ChiMatrix start;
  CholeskyParams params;
  double deviation = 0.0;
  double start_deviation = 0.0;
  std::size_t evaluations = 0;
  ProjectionDiagnostics diagnostics;
};

/// Nearest CPTP chi: eigenvalue clipping, Cholesky start point, then a
/// Nelder-Mead search over T(t). Unmet thresholds are reported in the
/// diagnostics (success == false), never hidden.
inline ProjectionResult project_to_cp(const ChiMatrix& input, const ProjectionOptions& opts = {}) {
  if (!(opts.lagrange > 0)) throw invalid_argument("project_to_cp: Lagrange multiplier must be positive");
  const ChiMatrix chi = to_normal_basis(input);
  const ChiMatrix start = clip_negative_eigs(chi);
  const CholeskyParams p0 = initial_params(start);
  const std::vector<double> x0(p0.t.begin(), p0.t.end());

  auto unpack = [](const std::vector<double>& x) {
    CholeskyParams p;
    std::copy(x.begin(), x.end(), p.t.begin());
    return p;
  };
  const Objective objective = [&](const std::vector<double>& x) {
    return deviation(unpack(x), chi, opts.lagrange);
  };
  const SimplexResult best = nelder_mead(objective, x0, opts.simplex);
  const CholeskyParams p = unpack(best.x);
  ChiMatrix fitted = chi_from_params(p);

  ProjectionDiagnostics diag;
  diag.min_eigenvalue = min_eigenvalue(fitted.matrix());
  diag.tp_defect = tp_defect(fitted);
  diag.frobenius_distance = distance(fitted.matrix(), chi.matrix());
  diag.input_min_eigenvalue = min_eigenvalue(chi.matrix());
  const bool psd_ok = diag.min_eigenvalue >= opts.min_eig_threshold;
  const bool tp_ok = diag.tp_defect <= opts.tp_threshold;
  diag.success = psd_ok && tp_ok;
  if (!psd_ok) diag.message = "projected chi is not positive semidefinite within threshold";
  else if (!tp_ok) diag.message = "trace-preservation defect above threshold; increase the Lagrange multiplier";
  else diag.message = "ok";

  return {std::move(fitted), start, p, best.value, objective(x0), best.evaluations, std::move(diag)};
}

}  // namespace qptkit
