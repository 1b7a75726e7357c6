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

#ifndef M4D_MORPH_MORPH_HPP_
#define M4D_MORPH_MORPH_HPP_

#include <cstdint>
#include <vector>

#include "m4d/geom/sdf.hpp"
#include "m4d/geom/trimesh.hpp"

namespace m4d::morph {

// Lattice shared by both endpoint fields: union AABB at the finer spacing.
struct LatticeSpec {
  Vec3 origin;
  double spacing = 0.0;
  std::uint32_t dims[3] = {0, 0, 0};
};

// Throws NumericalError("IncompatibleLattice") when the grid bounds are
// disjoint; blending distance fields of non-overlapping shapes is undefined.
LatticeSpec common_lattice(const geom::SdfGrid& a, const geom::SdfGrid& b);

// Trilinear resampling onto the requested lattice. Identical lattices copy
// values bit-exactly.
geom::SdfGrid resample_sdf(const geom::SdfGrid& grid, const LatticeSpec& lattice);

// Blend step i of n intermediates, weight w = (n+1-i)/(n+1) on the source:
// values = s + (1-w)(t-s) on the common lattice, so source == target yields
// the input field exactly. Requires 1 <= i <= n.
geom::SdfGrid interpolate_sdf(const geom::SdfGrid& source, const geom::SdfGrid& target,
                              int i, int n);

struct MorphStep {
  geom::TriMesh mesh;
  geom::SdfGrid grid;
};

// Chain [source', M_1 ... M_N, target']: every step, endpoints included, is a
// marching-cubes isosurface of a field on the shared lattice, so vertex
// indices on steps.front() are the coordinate system for contact candidates.
struct MorphSequence {
  std::vector<MorphStep> steps;
  int n_intermediates = 0;
  std::vector<double> weights;  // source-side blend weight per intermediate

  double spacing() const { return steps.empty() ? 0.0 : steps.front().grid.spacing; }
};

// Builds the morph chain with n intermediate shapes at the given SDF
// resolution. Both meshes must be watertight; errors propagate from
// compute_sdf and marching_cubes.
MorphSequence build_morph_sequence(const geom::TriMesh& source,
                                   const geom::TriMesh& target, int n,
                                   int resolution = 64);

}  // namespace m4d::morph

#endif  // M4D_MORPH_MORPH_HPP_
