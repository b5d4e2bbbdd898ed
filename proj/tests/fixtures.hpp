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

#include "qptkit/io.hpp"
#include "qptkit/qpt.hpp"

// Shared loaders for the NV-centre reference data in data/fixtures.

namespace qptkit::testing {

inline std::string fixture_path(const std::string& name) { return std::string(QPTKIT_FIXTURE_DIR) + "/" + name; }

struct NVProcess {
  double time_ns;
  AffineMap experimental;
  AffineMap reconstructed;
  UnphysicalityNorms printed;
};

inline std::vector<NVProcess> nv_processes() {
  const auto j = io::parse_file(fixture_path("nv_processes.json"));
  std::vector<NVProcess> out;
  for (const auto& p : j["processes"]) {
    const auto& d = p["discrepancy"];
    out.push_back({p["time_ns"].get<double>(),
                   AffineMap(io::matrix_from_json(p["experimental_affine"], 4, 4, "experimental")),
                   AffineMap(io::matrix_from_json(p["reconstructed_affine"], 4, 4, "reconstructed")),
                   {d["p1"].get<double>(), d["p2"].get<double>(), d["fro"].get<double>(), d["d_pro"].get<double>()}});
  }
  return out;
}

struct NVLindblad {
  CMatrix op;
  double contribution_percent;
};

inline std::vector<NVLindblad> nv_lindblads() {
  const auto j = io::parse_file(fixture_path("nv_lindblads.json"));
  std::vector<NVLindblad> out;
  for (const auto& l : j["operators"]) {
    const CMatrix m = io::complex_from_parts(io::matrix_from_json(l["re"], 2, 2, "re"),
                                             io::matrix_from_json(l["im"], 2, 2, "im"));
    out.push_back({m * cplx(l["scale"].get<double>()), l["contribution_percent"].get<double>()});
  }
  return out;
}

/// Output states E(rho_j) implied by an affine map for the canonical inputs.
inline std::array<CMatrix, 4> affine_outputs(const AffineMap& e) {
  const auto inputs = InputStateSet::bloch_vectors();
  std::array<CMatrix, 4> out;
  for (std::size_t j = 0; j < 4; ++j) out[j] = bloch_to_density(e.apply(inputs[j])).matrix();
  return out;
}

}  // namespace qptkit::testing
