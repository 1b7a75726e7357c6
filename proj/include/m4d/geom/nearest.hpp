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

#ifndef M4D_GEOM_NEAREST_HPP_
#define M4D_GEOM_NEAREST_HPP_

#include <cstdint>
#include <vector>

#include "m4d/geom/sdf.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/math.hpp"

namespace m4d::geom {

struct SurfaceHit {
  Vec3 point;
  double distance = 0.0;
  size_t face = 0;  // meaningful for mesh queries only
};

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

// Exhaustive nearest point on the mesh surface.
SurfaceHit nearest_surface_point(const TriMesh& mesh, const Vec3& query);
// Same, reusing a prebuilt SoA for repeated queries against one mesh.
SurfaceHit nearest_surface_point(const TriMesh& mesh, const MeshSoa& soa,
                                 const Vec3& query);

// Projects the query along the interpolated gradient onto the zero set.
SurfaceHit nearest_surface_point(const SdfGrid& grid, const Vec3& query);

// Area-weighted surface samples, reproducible per seed.
std::vector<Vec3> sample_surface_points(const TriMesh& mesh, size_t count,
                                        uint64_t seed);

// Symmetric Chamfer distance between sampled surfaces: mean nearest
// distance a->b plus mean nearest distance b->a.
double chamfer_distance(const TriMesh& a, const TriMesh& b, size_t samples,
                        uint64_t seed);

}  // namespace m4d::geom

#endif  // M4D_GEOM_NEAREST_HPP_
