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

#include <span>

#include "qptkit/errors.hpp"
#include "qptkit/numkit/matrix.hpp"

namespace qptkit {

/// dF/dt at t = 0 from F(0) and samples F(t1), F(2 t1), F(4 t1).
///
/// Forward differences at h = t1 and 2 t1 are combined twice so that the
/// O(h) and O(h^2) error terms cancel; the result is exact for F polynomial
/// of degree <= 3.
inline CMatrix richardson_derivative(std::span<const CMatrix> samples, const CMatrix& base,
                                     double t1) {
  if (samples.size() != 3) throw invalid_argument("richardson_derivative: need exactly 3 samples");
  if (!(t1 > 0)) throw invalid_argument("richardson_derivative: t1 must be positive");
  for (const auto& s : samples) {
    if (s.rows() != base.rows() || s.cols() != base.cols()) {
      throw invalid_argument("richardson_derivative: mismatched matrix shapes");
    }
  }
  const CMatrix d0_h = (samples[0] - base) / cplx(t1);
  const CMatrix d0_2h = (samples[1] - base) / cplx(2 * t1);
  const CMatrix d0_4h = (samples[2] - base) / cplx(4 * t1);
  const CMatrix d1_h = 2.0 * d0_h - d0_2h;
  const CMatrix d1_2h = 2.0 * d0_2h - d0_4h;
  return (4.0 * d1_h - d1_2h) / cplx(3.0);
}

}  // namespace qptkit
