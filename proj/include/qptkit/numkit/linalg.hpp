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
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "qptkit/errors.hpp"
#include "qptkit/numkit/matrix.hpp"
#include "qptkit/tolerances.hpp"

namespace qptkit {

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // columns, unitary
};

namespace detail {

inline void require_square(const CMatrix& m, const char* who) {
  if (!m.is_square() || m.rows() == 0) {
    throw invalid_argument(std::string(who) + ": matrix must be square and non-empty");
  }
}

inline void require_finite(const CMatrix& m, const char* who) {
  if (!m.all_finite()) throw invalid_argument(std::string(who) + ": non-finite entries");
}

inline double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
/// The input is symmetrized first; eigenvalues come back ascending.
inline EigResult eig_hermitian(const CMatrix& m,
                               double hermitian_tol = kDefaultTolerances.hermitian) {
  detail::require_square(m, "eig_hermitian");
  detail::require_finite(m, "eig_hermitian");
  const double scale = std::max(1.0, m.frobenius_norm());
  if (!is_hermitian(m, hermitian_tol * scale)) {
    throw invalid_argument("eig_hermitian: matrix is not Hermitian");
  }
  const std::size_t n = m.rows();
  CMatrix a = hermitian_part(m);
  CMatrix v = CMatrix::identity(n);

  const double target = kDefaultTolerances.jacobi_off_diagonal * scale;
  for (int sweep = 0; sweep < 100 && detail::off_diagonal_norm(a) > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r < 1e-300) continue;
        const cplx phase = a(p, q) / r;  // a_pq = r e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Real symmetric rotation on diag(1, e^{-i phi})^dagger A diag(1, e^{-i phi}).
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = D * P with D = diag(1, conj(phase)), P = [[c, s], [-s, c]].
        const cplx g_pp = c;
        const cplx g_pq = s;
        const cplx g_qp = -s * std::conj(phase);
        const cplx g_qq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // A <- A G
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * g_pp + akq * g_qp;
          a(k, q) = akp * g_pq + akq * g_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- G^dagger A
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
          a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {  // V <- V G
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * g_pp + vkq * g_qp;
          v(k, q) = vkp * g_pq + vkq * g_qq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// V diag(f(lambda)) V^dagger for a Hermitian matrix.
template <typename F>
CMatrix hermitian_function(const EigResult& e, F&& f) {
  const std::size_t n = e.eigenvalues.size();
  CMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx fk = f(e.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += e.eigenvectors(i, k) * fk * std::conj(e.eigenvectors(j, k));
  }
  return out;
}

inline double min_eigenvalue(const CMatrix& m) { return eig_hermitian(m).eigenvalues.front(); }

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues clamp to 0.
inline CMatrix sqrt_psd(const CMatrix& m) {
  return hermitian_function(eig_hermitian(m),
                            [](double x) { return cplx(std::sqrt(std::max(x, 0.0))); });
}

/// Lower-triangular L with L L^dagger = M for positive semidefinite M.
inline CMatrix cholesky_lower(const CMatrix& m, double pivot_tol = kDefaultTolerances.psd_pivot) {
  detail::require_square(m, "cholesky_lower");
  detail::require_finite(m, "cholesky_lower");
  const std::size_t n = m.rows();
  const double scale = std::max(1.0, m.max_abs());
  if (!is_hermitian(m, kDefaultTolerances.hermitian * scale)) {
    throw invalid_argument("cholesky_lower: matrix is not Hermitian");
  }
  // Pivots this small relative to the matrix are rank deficiency, not data.
  const double rank_floor = 1e-13 * scale;
  CMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (d < -pivot_tol * scale) {
      throw numerical_error("cholesky_lower: matrix is not positive semidefinite");
    }
    if (d <= rank_floor) {
      l(j, j) = 0.0;
      continue;  // column below stays zero
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

/// Lower-triangular T with T^dagger T = M, the factor orientation used by
/// the chi and GKS parameterizations. Obtained from the ordinary Cholesky
/// factor of the index-reversed matrix.
inline CMatrix cholesky_reversed_lower(const CMatrix& m,
                                       double pivot_tol = kDefaultTolerances.psd_pivot) {
  const std::size_t n = m.rows();
  CMatrix rev(n, m.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rev(i, j) = m(n - 1 - i, m.cols() - 1 - j);
  const CMatrix l = cholesky_lower(rev, pivot_tol);
  // U = J L J is upper triangular with U U^dagger = M; T = U^dagger.
  CMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = std::conj(l(n - 1 - j, n - 1 - i));
  return t;
}

/// Solves A X = B by LU with partial pivoting.
inline CMatrix solve(const CMatrix& a, const CMatrix& b) {
  detail::require_square(a, "solve");
  if (b.rows() != a.rows()) throw invalid_argument("solve: shape mismatch");
  const std::size_t n = a.rows();
  CMatrix lu = a;
  CMatrix x = b;
  const double scale = std::max(1e-300, a.max_abs());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (std::abs(lu(piv, k)) <= 1e-14 * scale) throw numerical_error("solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      cplx s = x(kk, j);
      for (std::size_t i = kk + 1; i < n; ++i) s -= lu(kk, i) * x(i, j);
      x(kk, j) = s / lu(kk, kk);
    }
  }
  return x;
}

inline CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.rows())); }

struct SvdResult {
  std::vector<double> singular_values;  // descending
  CMatrix u;                            // rows x k, orthonormal columns (zero for sigma == 0)
  CMatrix v;                            // cols x k, unitary
};

/// Thin SVD by one-sided (Hestenes) Jacobi rotations on the columns of M.
inline SvdResult svd(const CMatrix& m) {
  detail::require_finite(m, "svd");
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  CMatrix u = m;
  CMatrix v = CMatrix::identity(cols);
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      for (std::size_t j = i + 1; j < cols; ++j) {
        double alpha = 0.0;
        double beta = 0.0;
        cplx gamma{};
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += std::norm(u(k, i));
          beta += std::norm(u(k, j));
          gamma += std::conj(u(k, i)) * u(k, j);
        }
        const double g = std::abs(gamma);
        if (g <= 1e-15 * std::sqrt(alpha * beta) || g < 1e-300) continue;
        rotated = true;
        const cplx w = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        // Column j is rephased by conj(w) so that u_i^dagger u_j is real.
        for (std::size_t k = 0; k < rows; ++k) {
          const cplx ui = u(k, i);
          const cplx uj = std::conj(w) * u(k, j);
          u(k, i) = c * ui - s * uj;
          u(k, j) = s * ui + c * uj;
        }
        for (std::size_t k = 0; k < cols; ++k) {
          const cplx vi = v(k, i);
          const cplx vj = std::conj(w) * v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += std::norm(u(k, j));
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
  SvdResult out;
  out.singular_values.resize(cols);
  out.u = CMatrix(rows, cols);
  out.v = CMatrix(cols, cols);
  for (std::size_t k = 0; k < cols; ++k) {
    const std::size_t src = order[k];
    out.singular_values[k] = sigma[src];
    for (std::size_t r = 0; r < rows; ++r)
      out.u(r, k) = sigma[src] > 0 ? u(r, src) / sigma[src] : cplx{};
    for (std::size_t r = 0; r < cols; ++r) out.v(r, k) = v(r, src);
  }
  return out;
}

inline std::vector<double> singular_values(const CMatrix& m) { return svd(m).singular_values; }

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are zeroed.
inline CMatrix pseudoinverse(const CMatrix& m, double rel_tol = kDefaultTolerances.pinv_relative) {
  detail::require_finite(m, "pseudoinverse");
  const SvdResult s = svd(m);
  CMatrix out(m.cols(), m.rows());
  const double cutoff = s.singular_values.empty() ? 0.0 : rel_tol * s.singular_values.front();
  for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
    const double sk = s.singular_values[k];
    if (sk <= cutoff || sk == 0.0) continue;
    for (std::size_t i = 0; i < m.cols(); ++i)
      for (std::size_t j = 0; j < m.rows(); ++j)
        out(i, j) += s.v(i, k) * std::conj(s.u(j, k)) / sk;
  }
  return out;
}

struct SchurResult {
  CMatrix q;  // unitary
  CMatrix t;  // upper triangular, M = Q T Q^dagger
};

/// Complex Schur form by Householder Hessenberg reduction and shifted QR.
inline SchurResult schur(const CMatrix& m) {
  detail::require_square(m, "schur");
  detail::require_finite(m, "schur");
  const std::size_t n = m.rows();
  CMatrix t = m;
  CMatrix q = CMatrix::identity(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(t(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    std::vector<cplx> v(n, 0.0);
    const cplx x0 = t(k + 1, k);
    const cplx phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : cplx(1.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = t(i, k);
    v[k + 1] += phase * xnorm;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // H = I - 2 v v^dagger / |v|^2; T <- H T H, Q <- Q H.
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * t(i, j);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) t(i, j) -= v[i] * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = k + 1; j < n; ++j) s += t(i, j) * v[j];
      s *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) t(i, j) -= s * std::conj(v[j]);
      cplx sq{};
      for (std::size_t j = k + 1; j < n; ++j) sq += q(i, j) * v[j];
      sq *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= sq * std::conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) t(i, k) = 0.0;
  }

  const double eps = 1e-16;
  std::size_t hi = n - 1;
  int iter = 0;
  int total = 0;
  while (hi > 0) {
    if (++total > 1000 * static_cast<int>(n)) throw numerical_error("schur: QR iteration did not converge");
    std::size_t lo = hi;
    while (lo > 0) {
      const double s = std::abs(t(lo - 1, lo - 1)) + std::abs(t(lo, lo));
      if (std::abs(t(lo, lo - 1)) <= eps * (s == 0.0 ? 1.0 : s)) {
        t(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    ++iter;
    // Wilkinson shift from the trailing 2x2 block.
    const cplx a = t(hi - 1, hi - 1), b = t(hi - 1, hi), c = t(hi, hi - 1), d = t(hi, hi);
    const cplx tr_half = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    const cplx mu1 = tr_half + disc;
    const cplx mu2 = tr_half - disc;
    cplx mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    if (iter % 11 == 10) mu = d + cplx(std::abs(t(hi, hi - 1)), 0.5 * std::abs(t(hi, hi - 1)));

    // Explicit shifted QR step on rows/cols lo..hi, applied as a similarity to all of T.
    std::vector<cplx> gc, gs;
    CMatrix h = t;
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx x = h(k, k);
      const cplx y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      cplx cs = 1.0, sn = 0.0;
      if (r > 0) {
        cs = x / r;
        sn = y / r;
      }
      gc.push_back(cs);
      gs.push_back(sn);
      // rows k, k+1 <- G^dagger rows, G = [[cs, -conj(sn)], [sn, conj(cs)]]
      for (std::size_t j = 0; j < n; ++j) {
        const cplx u0 = h(k, j), u1 = h(k + 1, j);
        h(k, j) = std::conj(cs) * u0 + std::conj(sn) * u1;
        h(k + 1, j) = -sn * u0 + cs * u1;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx cs = gc[k - lo], sn = gs[k - lo];
      for (std::size_t j = 0; j < n; ++j) {
        const cplx u0 = t(k, j), u1 = t(k + 1, j);
        t(k, j) = std::conj(cs) * u0 + std::conj(sn) * u1;
        t(k + 1, j) = -sn * u0 + cs * u1;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx cs = gc[k - lo], sn = gs[k - lo];
      for (std::size_t i = 0; i < n; ++i) {
        const cplx u0 = t(i, k), u1 = t(i, k + 1);
        t(i, k) = u0 * cs + u1 * sn;
        t(i, k + 1) = -u0 * std::conj(sn) + u1 * std::conj(cs);
        const cplx q0 = q(i, k), q1 = q(i, k + 1);
        q(i, k) = q0 * cs + q1 * sn;
        q(i, k + 1) = -q0 * std::conj(sn) + q1 * std::conj(cs);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) t(i, j) = 0.0;
  return {q, t};
}

/// Eigenvalues of a general square matrix (diagonal of its Schur form).
inline std::vector<cplx> eigenvalues(const CMatrix& m) {
  const SchurResult s = schur(m);
  std::vector<cplx> ev(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) ev[i] = s.t(i, i);
  return ev;
}

/// exp(M) by scaling and squaring with a diagonal (6,6) Pade approximant.
inline CMatrix matrix_exp(const CMatrix& m) {
  detail::require_square(m, "matrix_exp");
  detail::require_finite(m, "matrix_exp");
  const std::size_t n = m.rows();
  const double norm = m.norm1();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const CMatrix a = m * cplx(std::ldexp(1.0, -squarings));

  constexpr int kDegree = 6;
  double coef[kDegree + 1];
  coef[0] = 1.0;
  for (int k = 1; k <= kDegree; ++k) {
    coef[k] = coef[k - 1] * (kDegree - k + 1) / (static_cast<double>(k) * (2 * kDegree - k + 1));
  }
  CMatrix num = CMatrix::identity(n);
  CMatrix den = CMatrix::identity(n);
  CMatrix power = CMatrix::identity(n);
  for (int k = 1; k <= kDegree; ++k) {
    power = power * a;
    num += power * cplx(coef[k]);
    den += power * cplx((k % 2 ? -1.0 : 1.0) * coef[k]);
  }
  CMatrix e = solve(den, num);
  for (int k = 0; k < squarings; ++k) e = e * e;
  return e;
}

namespace detail {

// Principal square root of an upper-triangular matrix (Bjorck-Hammarling).
inline CMatrix sqrt_upper_triangular(const CMatrix& t) {
  const std::size_t n = t.rows();
  CMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) r(i, i) = std::sqrt(t(i, i));
  for (std::size_t d = 1; d < n; ++d) {
    for (std::size_t i = 0; i + d < n; ++i) {
      const std::size_t j = i + d;
      cplx s = t(i, j);
      for (std::size_t k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      r(i, j) = s / (r(i, i) + r(j, j));
    }
  }
  return r;
}

}  // namespace detail

/// Principal logarithm via Schur form and inverse scaling and squaring.
///
/// Throws numerical_error when an eigenvalue is zero or lies on (or within
/// `branch_tol` of) the closed negative real axis, where the principal
/// branch is undefined.
inline CMatrix matrix_log_principal(const CMatrix& m,
                                    double branch_tol = kDefaultTolerances.log_branch) {
  detail::require_square(m, "matrix_log_principal");
  detail::require_finite(m, "matrix_log_principal");
  const std::size_t n = m.rows();
  const SchurResult s = schur(m);
  const double scale = std::max(1e-300, m.max_abs());
  for (std::size_t i = 0; i < n; ++i) {
    const cplx ev = s.t(i, i);
    if (std::abs(ev) <= 1e-14 * scale) {
      throw numerical_error("matrix_log_principal: matrix is singular");
    }
    if (ev.real() < 0 && std::abs(ev.imag()) <= branch_tol * std::abs(ev)) {
      throw numerical_error(
          "principal log undefined: eigenvalue on the negative real axis "
          "(decoherence time too long for an unambiguous branch)");
    }
  }
  CMatrix t = s.t;
  const CMatrix id = CMatrix::identity(n);
  int roots = 0;
  while ((t - id).frobenius_norm() > 0.25) {
    if (++roots > 64) throw numerical_error("matrix_log_principal: square roots did not converge");
    t = detail::sqrt_upper_triangular(t);
  }
  // log(I + X) by its Mercator series; |X| <= 1/4 gives ~1e-17 after 28 terms.
  const CMatrix x = t - id;
  CMatrix term = x;
  CMatrix log_t = x;
  for (int k = 2; k <= 60; ++k) {
    term = term * x;
    const CMatrix add = term * cplx((k % 2 ? 1.0 : -1.0) / k);
    log_t += add;
    if (add.frobenius_norm() < 1e-18) break;
  }
  log_t *= cplx(std::ldexp(1.0, roots));
  return s.q * log_t * s.q.adjoint();
}

}  // namespace qptkit
