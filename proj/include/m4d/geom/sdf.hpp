// Copyright 2026 The m4d Authors
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

#ifndef M4D_GEOM_SDF_HPP_
#define M4D_GEOM_SDF_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "m4d/geom/trimesh.hpp"
#include "m4d/math.hpp"

namespace m4d::geom {

// Dense signed distance grid. Lattice node (i, j, k) sits at
// origin + (i, j, k) * spacing; values are negative inside the surface and
// stored x-fastest.
struct SdfGrid {
  Vec3 origin;
  double spacing = 0.0;
  std::array<uint32_t, 3> dims = {0, 0, 0};
  std::vector<float> values;

  size_t linear_index(uint32_t i, uint32_t j, uint32_t k) const {
    return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  float at(uint32_t i, uint32_t j, uint32_t k) const {
    return values[linear_index(i, j, k)];
  }
  float& at(uint32_t i, uint32_t j, uint32_t k) {
    return values[linear_index(i, j, k)];
  }
  Vec3 node_position(uint32_t i, uint32_t j, uint32_t k) const {
    return origin + Vec3(i, j, k) * spacing;
  }
  Aabb bounds() const {
    return {origin, origin + Vec3(dims[0] - 1, dims[1] - 1, dims[2] - 1) *
                                 spacing};
  }
  float min_value() const;
  float max_value() const;

  // Trilinear interpolation. Queries outside the grid AABB clamp to the
  // boundary and add the Euclidean distance to the clamp point so values
  // keep growing away from the grid.
  double sample(const Vec3& p) const;
  // Central-difference gradient of sample().
  Vec3 gradient(const Vec3& p) const;
};

SdfGrid load_sdf(const std::string& path);
void save_sdf(const SdfGrid& grid, const std::string& path);

// Exact narrow-band distances plus breadth-first propagation; sign from
// x-ray crossing parity. padding < 0 selects the default 10% of the mesh
// AABB diagonal, applied on every side. resolution is the node count along
// the longest padded axis.
SdfGrid compute_sdf(const TriMesh& mesh, int resolution = 64,
                    double padding = -1.0);

}  // namespace m4d::geom

#endif  // M4D_GEOM_SDF_HPP_
