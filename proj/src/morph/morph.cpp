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

#include "m4d/morph/morph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "m4d/error.hpp"
#include "m4d/geom/marching_cubes.hpp"

namespace m4d::morph {

namespace {

bool same_lattice(const geom::SdfGrid& grid, const LatticeSpec& lattice) {
  return grid.origin.x == lattice.origin.x && grid.origin.y == lattice.origin.y &&
         grid.origin.z == lattice.origin.z && grid.spacing == lattice.spacing &&
         grid.dims[0] == lattice.dims[0] && grid.dims[1] == lattice.dims[1] &&
         grid.dims[2] == lattice.dims[2];
}

}  // namespace

LatticeSpec common_lattice(const geom::SdfGrid& a, const geom::SdfGrid& b) {
  const Aabb ba = a.bounds();
  const Aabb bb = b.bounds();
  if (!ba.overlaps(bb)) {
    throw NumericalError("IncompatibleLattice",
                         "grid bounds are disjoint, no common lattice exists");
  }
  LatticeSpec lattice;
  lattice.origin = cwise_min(ba.lo, bb.lo);
  lattice.spacing = std::min(a.spacing, b.spacing);
  const Vec3 hi = cwise_max(ba.hi, bb.hi);
  const Vec3 ext = hi - lattice.origin;
  for (int axis = 0; axis < 3; ++axis) {
    const double cells = ext[axis] / lattice.spacing;
    lattice.dims[axis] =
        std::max<std::uint32_t>(2, static_cast<std::uint32_t>(std::ceil(cells - 1e-9)) + 1);
  }
  return lattice;
}

geom::SdfGrid resample_sdf(const geom::SdfGrid& grid, const LatticeSpec& lattice) {
  geom::SdfGrid out;
  out.origin = lattice.origin;
  out.spacing = lattice.spacing;
  out.dims[0] = lattice.dims[0];
  out.dims[1] = lattice.dims[1];
  out.dims[2] = lattice.dims[2];
  const std::size_t total = static_cast<std::size_t>(out.dims[0]) * out.dims[1] * out.dims[2];
  if (same_lattice(grid, lattice)) {
    out.values = grid.values;
    return out;
  }
  out.values.resize(total);
  std::size_t idx = 0;
  for (std::uint32_t k = 0; k < out.dims[2]; ++k) {
    for (std::uint32_t j = 0; j < out.dims[1]; ++j) {
      for (std::uint32_t i = 0; i < out.dims[0]; ++i, ++idx) {
        out.values[idx] = static_cast<float>(grid.sample(out.node_position(i, j, k)));
      }
    }
  }
  return out;
}

geom::SdfGrid interpolate_sdf(const geom::SdfGrid& source, const geom::SdfGrid& target,
                              int i, int n) {
  if (n < 1 || i < 1 || i > n) {
    throw ConfigError("interpolation step " + std::to_string(i) +
                      " outside [1, " + std::to_string(n) + "]");
  }
  const LatticeSpec lattice = common_lattice(source, target);
  const geom::SdfGrid s = resample_sdf(source, lattice);
  const geom::SdfGrid t = resample_sdf(target, lattice);

  geom::SdfGrid out = s;
  const double target_share =
      static_cast<double>(i) / static_cast<double>(n + 1);  // 1 - w
  for (std::size_t v = 0; v < out.values.size(); ++v) {
    out.values[v] = static_cast<float>(
        s.values[v] + target_share * (static_cast<double>(t.values[v]) - s.values[v]));
  }
  return out;
}

MorphSequence build_morph_sequence(const geom::TriMesh& source,
                                   const geom::TriMesh& target, int n,
                                   int resolution) {
  if (n < 0) {
    throw ConfigError("intermediate count must be non-negative, got " +
                      std::to_string(n));
  }
  const geom::SdfGrid source_grid = geom::compute_sdf(source, resolution);
  const geom::SdfGrid target_grid = geom::compute_sdf(target, resolution);
  const LatticeSpec lattice = common_lattice(source_grid, target_grid);
  const geom::SdfGrid s = resample_sdf(source_grid, lattice);
  const geom::SdfGrid t = resample_sdf(target_grid, lattice);

  MorphSequence morph;
  morph.n_intermediates = n;
  morph.steps.reserve(static_cast<std::size_t>(n) + 2);

  auto add_step = [&morph](geom::SdfGrid grid) {
    MorphStep step;
    step.mesh = geom::marching_cubes(grid, 0.0);
    step.grid = std::move(grid);
    morph.steps.push_back(std::move(step));
  };

  add_step(s);
  for (int i = 1; i <= n; ++i) {
    const double target_share = static_cast<double>(i) / static_cast<double>(n + 1);
    morph.weights.push_back(1.0 - target_share);
    geom::SdfGrid blend = s;
    for (std::size_t v = 0; v < blend.values.size(); ++v) {
      blend.values[v] = static_cast<float>(
          s.values[v] +
          target_share * (static_cast<double>(t.values[v]) - s.values[v]));
    }
    add_step(std::move(blend));
  }
  add_step(t);
  return morph;
}

}  // namespace m4d::morph
