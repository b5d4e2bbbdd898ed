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
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "qptkit/errors.hpp"

namespace qptkit {

struct SimplexOptions {
  double function_tolerance = 1e-9;
  double parameter_tolerance = 1e-9;
  std::size_t max_evaluations = 40000;
  std::size_t restarts = 1;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

inline void validate(const SimplexOptions& opts, std::size_t dim) {
  if (!(opts.function_tolerance > 0) || !(opts.parameter_tolerance > 0)) {
    throw invalid_argument("nelder_mead: tolerances must be positive");
  }
  if (opts.max_evaluations < dim + 1) {
    throw invalid_argument("nelder_mead: max_evaluations must be at least dimension + 1");
  }
}

// One Nelder-Mead descent from a fresh simplex around x0. `budget` is the
// number of evaluations still available.
inline SimplexResult nelder_mead_once(const Objective& f, const std::vector<double>& x0,
                                      const SimplexOptions& opts, std::size_t budget) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const std::size_t n = x0.size();
  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    if (!std::isfinite(v)) throw numerical_error("nelder_mead: objective diverged");
    return v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = eval(x0);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += std::max(0.05 * std::abs(x0[i]), 0.00025);
    values[i + 1] = eval(simplex[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(simplex[order[i]]);
      v2[i] = values[order[i]];
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };
  auto converged = [&]() {
    double df = 0.0, dx = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      df = std::max(df, std::abs(values[i] - values[0]));
      for (std::size_t j = 0; j < n; ++j) dx = std::max(dx, std::abs(simplex[i][j] - simplex[0][j]));
    }
    return df <= opts.function_tolerance && dx <= opts.parameter_tolerance;
  };
  auto along = [&](const std::vector<double>& centroid, double coef) {
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + coef * (centroid[j] - simplex[n][j]);
    return p;
  };

  sort_simplex();
  while (!converged() && evals + 2 <= budget) {
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const auto xr = along(centroid, kReflect);
    const double fr = eval(xr);
    if (fr < values[0]) {
      const auto xe = along(centroid, kReflect * kExpand);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        values[n] = fe;
      } else {
        simplex[n] = xr;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = xr;
      values[n] = fr;
    } else {
      bool shrink = false;
      if (fr < values[n]) {
        const auto xc = along(centroid, kReflect * kContract);
        const double fc = eval(xc);
        if (fc <= fr) {
          simplex[n] = xc;
          values[n] = fc;
        } else {
          shrink = true;
        }
      } else {
        const auto xcc = along(centroid, -kContract);
        const double fcc = eval(xcc);
        if (fcc < values[n]) {
          simplex[n] = xcc;
          values[n] = fcc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        if (evals + n > budget) break;
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + kShrink * (simplex[i][j] - simplex[0][j]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  return {simplex[0], values[0], evals};
}

}  // namespace detail

/// Unconstrained minimization by the Nelder-Mead simplex method.
///
/// Coefficients are the classical ones (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Convergence requires both the spread of
/// simplex values and the simplex extent to fall under their tolerances.
/// After convergence the search restarts `opts.restarts` times from the best
/// point with a fresh simplex, keeping the best result.
inline SimplexResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                                 const SimplexOptions& opts = {}) {
  if (x0.empty()) throw invalid_argument("nelder_mead: empty starting point");
  detail::validate(opts, x0.size());
  SimplexResult best = detail::nelder_mead_once(f, x0, opts, opts.max_evaluations);
  std::size_t used = best.evaluations;
  for (std::size_t r = 0; r < opts.restarts && used + x0.size() + 1 <= opts.max_evaluations; ++r) {
    SimplexResult next = detail::nelder_mead_once(f, best.x, opts, opts.max_evaluations - used);
    used += next.evaluations;
    if (next.value <= best.value) best = std::move(next);
  }
  best.evaluations = used;
  return best;
}

}  // namespace qptkit
