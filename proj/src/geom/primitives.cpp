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

#include <cmath>
#include <map>

#include "m4d/geom/trimesh.hpp"
#include "m4d/rng.hpp"

namespace m4d::geom {

TriMesh make_box(const Vec3& extents) {
  Vec3 h = extents * 0.5;
  TriMesh m;
  m.vertices = {
      {-h.x, -h.y, -h.z}, {h.x, -h.y, -h.z}, {h.x, h.y, -h.z},
      {-h.x, h.y, -h.z},  {-h.x, -h.y, h.z}, {h.x, -h.y, h.z},
      {h.x, h.y, h.z},    {-h.x, h.y, h.z},
  };
  // Outward winding, two triangles per face.
  m.faces = {
      {0, 2, 1}, {0, 3, 2},  // -z
      {4, 5, 6}, {4, 6, 7},  // +z
      {0, 1, 5}, {0, 5, 4},  // -y
      {3, 7, 6}, {3, 6, 2},  // +y
      {0, 4, 7}, {0, 7, 3},  // -x
      {1, 2, 6}, {1, 6, 5},  // +x
  };
  return m;
}

namespace {

// Midpoint subdivision with edge-welded midpoints keeps the mesh closed.
TriMesh subdivide_on_sphere(const TriMesh& in, double radius) {
  TriMesh out;
  out.vertices = in.vertices;
  std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoint;
  auto mid = [&](uint32_t a, uint32_t b) -> uint32_t {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec3 p = normalized(out.vertices[a] + out.vertices[b]) * radius;
    uint32_t idx = static_cast<uint32_t>(out.vertices.size());
    out.vertices.push_back(p);
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    uint32_t ab = mid(f[0], f[1]);
    uint32_t bc = mid(f[1], f[2]);
    uint32_t ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

}  // namespace

TriMesh make_icosphere(double radius, int subdivisions) {
  double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {
      {-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
      {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
      {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1},
  };
  for (Vec3& v : m.vertices) v = normalized(v) * radius;
  m.faces = {
      {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int s = 0; s < subdivisions; ++s) m = subdivide_on_sphere(m, radius);
  return m;
}

TriMesh make_octasphere(double radius, int depth) {
  TriMesh m;
  m.vertices = {
      {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
  };
  for (Vec3& v : m.vertices) v *= radius;
  m.faces = {
      {0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
      {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5},
  };
  for (int s = 0; s < depth; ++s) m = subdivide_on_sphere(m, radius);
  return m;
}

TriMesh make_blob(double radius, int depth, double amplitude, uint64_t seed) {
  TriMesh m = make_octasphere(radius, depth);
  Rng rng(seed);
  // Low-order directional harmonics give a smooth star-shaped displacement,
  // so the subdivision connectivity stays watertight.
  double a1 = rng.uniform(0.5, 1.0) * amplitude;
  double a2 = rng.uniform(0.3, 0.8) * amplitude;
  double a3 = rng.uniform(0.2, 0.6) * amplitude;
  double p1 = rng.uniform(0.0, 2.0 * kPi);
  double p2 = rng.uniform(0.0, 2.0 * kPi);
  for (Vec3& v : m.vertices) {
    Vec3 d = normalized(v);
    double bump = a1 * std::sin(2.0 * d.x + p1) * std::cos(2.0 * d.y) +
                  a2 * std::sin(3.0 * d.z + p2) +
                  a3 * std::cos(2.0 * d.x * d.y + 1.3);
    v = d * (radius * (1.0 + bump));
  }
  return m;
}

}  // namespace m4d::geom
