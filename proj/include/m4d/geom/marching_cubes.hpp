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

#ifndef M4D_GEOM_MARCHING_CUBES_HPP_
#define M4D_GEOM_MARCHING_CUBES_HPP_

#include "m4d/geom/sdf.hpp"
#include "m4d/geom/trimesh.hpp"

namespace m4d::geom {

// Extracts the iso-surface with shared, edge-welded vertices. Edge
// interpolation is clamped away from the corners so no emitted triangle
// degenerates. Throws NumericalError("IsoOutOfRange") unless
// min < iso < max over the grid.
TriMesh marching_cubes(const SdfGrid& grid, double iso = 0.0);

namespace detail {
extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];
}  // namespace detail

}  // namespace m4d::geom

#endif  // M4D_GEOM_MARCHING_CUBES_HPP_
