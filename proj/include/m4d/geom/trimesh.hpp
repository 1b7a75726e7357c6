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

#ifndef M4D_GEOM_TRIMESH_HPP_
#define M4D_GEOM_TRIMESH_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "m4d/math.hpp"

namespace m4d::geom {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> faces;

  Aabb aabb() const;
  double face_area(size_t f) const;
  double surface_area() const;
  // Signed volume by the divergence theorem; positive for outward winding.
  double signed_volume() const;
  Vec3 face_normal(size_t f) const;  // unnormalized, 2x area

  // Throws IoError if any face index is out of range.
  void check_indices() const;
};

// Directed edges missing their opposite. Empty for closed manifolds.
std::vector<std::array<uint32_t, 2>> boundary_edges(const TriMesh& mesh);
bool is_watertight(const TriMesh& mesh);

// V - E + F; equals 2 - 2g for a connected closed orientable surface.
int euler_characteristic(const TriMesh& mesh);

// Triangle corners flattened to structure-of-arrays for the distance
// kernels. Views returned by soa() stay valid while the storage lives.
struct MeshSoa {
  std::vector<double> ax, ay, az, bx, by, bz, cx, cy, cz;

  MeshSoa() = default;
  explicit MeshSoa(const TriMesh& mesh);
  size_t count() const { return ax.size(); }
};

TriMesh load_obj(const std::string& path);
void save_obj(const TriMesh& mesh, const std::string& path);

// Primitives are centered at the origin unless noted.
TriMesh make_box(const Vec3& extents);
TriMesh make_icosphere(double radius, int subdivisions);
TriMesh make_octasphere(double radius, int depth);
// Octasphere with a smooth radial displacement; stays watertight.
TriMesh make_blob(double radius, int depth, double amplitude, uint64_t seed);

}  // namespace m4d::geom

#endif  // M4D_GEOM_TRIMESH_HPP_
