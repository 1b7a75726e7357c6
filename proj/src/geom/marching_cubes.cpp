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

#include <algorithm>
#include <unordered_map>

#include "m4d/error.hpp"
#include "m4d/geom/marching_cubes.hpp"

namespace m4d::geom {

namespace {

// Cube corners in table order: bit 0 at (i, j, k), +x, +xy, +y on the lower
// z layer, then the same square at z + 1.
const int kCornerOffset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

// Cube edge -> (corner, corner) in the same numbering.
const int kEdgeCorner[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

// Interpolation parameter clamp keeps every weld vertex strictly inside its
// lattice edge so no emitted triangle collapses below the degeneracy floor.
constexpr double kTClamp = 0.01;

}  // namespace

TriMesh marching_cubes(const SdfGrid& grid, double iso) {
  if (grid.dims[0] < 2 || grid.dims[1] < 2 || grid.dims[2] < 2) {
    throw NumericalError("IsoOutOfRange", "grid too small for extraction");
  }
  float lo = grid.min_value();
  float hi = grid.max_value();
  if (!(iso > lo && iso < hi)) {
    throw NumericalError("IsoOutOfRange",
                         "iso value " + std::to_string(iso) +
                             " outside grid range [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
  }

  TriMesh mesh;
  // Welded vertex per lattice edge, keyed by base node index and axis.
  std::unordered_map<uint64_t, uint32_t> edge_vertex;
  edge_vertex.reserve(4096);

  uint32_t nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
  auto node_index = [&](uint32_t i, uint32_t j, uint32_t k) -> uint64_t {
    return (static_cast<uint64_t>(k) * ny + j) * nx + i;
  };

  auto edge_point = [&](uint32_t i, uint32_t j, uint32_t k,
                        int axis) -> uint32_t {
    uint64_t key = node_index(i, j, k) * 4 + static_cast<uint64_t>(axis);
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    uint32_t i1 = i + (axis == 0), j1 = j + (axis == 1), k1 = k + (axis == 2);
    double v0 = grid.at(i, j, k);
    double v1 = grid.at(i1, j1, k1);
    double t = (iso - v0) / (v1 - v0);
    t = std::clamp(t, kTClamp, 1.0 - kTClamp);
    Vec3 p0 = grid.node_position(i, j, k);
    Vec3 p1 = grid.node_position(i1, j1, k1);
    uint32_t idx = static_cast<uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(p0 + (p1 - p0) * t);
    edge_vertex.emplace(key, idx);
    return idx;
  };

  // Cube edge id -> lattice edge (base node offset, axis).
  auto cube_edge = [&](uint32_t i, uint32_t j, uint32_t k,
                       int edge) -> uint32_t {
    int c0 = kEdgeCorner[edge][0];
    int c1 = kEdgeCorner[edge][1];
    const int* o0 = kCornerOffset[c0];
    const int* o1 = kCornerOffset[c1];
    int axis = o0[0] != o1[0] ? 0 : (o0[1] != o1[1] ? 1 : 2);
    uint32_t bi = i + static_cast<uint32_t>(std::min(o0[0], o1[0]));
    uint32_t bj = j + static_cast<uint32_t>(std::min(o0[1], o1[1]));
    uint32_t bk = k + static_cast<uint32_t>(std::min(o0[2], o1[2]));
    return edge_point(bi, bj, bk, axis);
  };

  for (uint32_t k = 0; k + 1 < nz; ++k) {
    for (uint32_t j = 0; j + 1 < ny; ++j) {
      for (uint32_t i = 0; i + 1 < nx; ++i) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          double v = grid.at(i + kCornerOffset[c][0], j + kCornerOffset[c][1],
                             k + kCornerOffset[c][2]);
          if (v < iso) cube |= 1 << c;
        }
        if (detail::kMcEdgeTable[cube] == 0) continue;
        const int* tri = detail::kMcTriTable[cube];
        for (int e = 0; tri[e] != -1; e += 3) {
          uint32_t a = cube_edge(i, j, k, tri[e]);
          uint32_t b = cube_edge(i, j, k, tri[e + 1]);
          uint32_t c = cube_edge(i, j, k, tri[e + 2]);
          // The table winds clockwise when seen from outside under the
          // "corner below iso sets its bit" convention; flip for outward
          // normals with negative-inside fields.
          mesh.faces.push_back({a, c, b});
        }
      }
    }
  }
  return mesh;
}

}  // namespace m4d::geom
