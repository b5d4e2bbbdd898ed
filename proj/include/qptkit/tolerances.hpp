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

namespace qptkit {

/// Every numerical threshold used by the library, in one place.
///
/// Functions take the relevant entry as a defaulted argument, so callers can
/// override a single value without touching the rest. The CLI can load an
/// alternative table from a JSON file (see io.hpp).
struct Tolerances {
  // numkit
  double hermitian = 1e-8;         // |M - M^dagger| allowed before decomposing
  double psd_pivot = 1e-10;        // Cholesky pivots in [-psd_pivot, 0] clamp to 0
  double pinv_relative = 1e-10;    // singular values below this * sigma_max are zero
  double log_branch = 1e-8;        // |Im(ev)| <= log_branch * |ev| on negative axis fails
  double jacobi_off_diagonal = 1e-15;

  // states
  double state_hermitian = 1e-9;
  double state_trace = 1e-9;
  double state_min_eig = 1e-9;
  double bloch_norm = 1e-9;

  // processes
  double kraus_negative_eig = 1e-8;
  double ellipsoid_violation = 1e-9;

  // projection
  double projection_lagrange = 100.0;
  double projection_min_eig = -1e-9;
  double projection_tp_defect = 1e-3;

  // generator
  double gks_negative_eig = 1e-9;
  double lindblad_drop_relative = 1e-12;
  double propagator_trace = 1e-6;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace qptkit
