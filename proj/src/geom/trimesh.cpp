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

#include "m4d/geom/trimesh.hpp"

#include <unordered_map>
#include <unordered_set>

#include "m4d/error.hpp"

namespace m4d::geom {

Aabb TriMesh::aabb() const {
  Aabb box;
  if (vertices.empty()) return box;
  box.lo = box.hi = vertices[0];
  for (const Vec3& v : vertices) box.expand(v);
  return box;
}

Vec3 TriMesh::face_normal(size_t f) const {
  const auto& fc = faces[f];
  return cross(vertices[fc[1]] - vertices[fc[0]],
               vertices[fc[2]] - vertices[fc[0]]);
}

double TriMesh::face_area(size_t f) const { return 0.5 * norm(face_normal(f)); }

double TriMesh::surface_area() const {
  double a = 0.0;
  for (size_t f = 0; f < faces.size(); ++f) a += face_area(f);
  return a;
}

double TriMesh::signed_volume() const {
  double v = 0.0;
  for (const auto& f : faces) {
    v += dot(vertices[f[0]], cross(vertices[f[1]], vertices[f[2]]));
  }
  return v / 6.0;
}

void TriMesh::check_indices() const {
  for (const auto& f : faces) {
    for (uint32_t idx : f) {
      if (idx >= vertices.size()) {
        throw IoError("face index " + std::to_string(idx) +
                      " out of range for " + std::to_string(vertices.size()) +
                      " vertices");
      }
    }
  }
}

namespace {
inline uint64_t edge_key(uint32_t a, uint32_t b) {
  return (static_cast<uint64_t>(a) << 32) | b;
}
}  // namespace

std::vector<std::array<uint32_t, 2>> boundary_edges(const TriMesh& mesh) {
  std::unordered_map<uint64_t, int> count;
  count.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      uint32_t a = f[e], b = f[(e + 1) % 3];
      ++count[edge_key(a, b)];
    }
  }
  std::vector<std::array<uint32_t, 2>> open;
  for (const auto& [key, c] : count) {
    uint32_t a = static_cast<uint32_t>(key >> 32);
    uint32_t b = static_cast<uint32_t>(key & 0xffffffffu);
    auto it = count.find(edge_key(b, a));
    int rev = it == count.end() ? 0 : it->second;
    // A closed orientable manifold pairs every directed edge with exactly
    // one reverse partner.
    if (c != 1 || rev != 1) open.push_back({a, b});
  }
  return open;
}

bool is_watertight(const TriMesh& mesh) {
  return !mesh.faces.empty() && boundary_edges(mesh).empty();
}

int euler_characteristic(const TriMesh& mesh) {
  std::unordered_set<uint64_t> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      uint32_t a = f[e], b = f[(e + 1) % 3];
      edges.insert(a < b ? edge_key(a, b) : edge_key(b, a));
    }
  }
  return static_cast<int>(mesh.vertices.size()) -
         static_cast<int>(edges.size()) + static_cast<int>(mesh.faces.size());
}

MeshSoa::MeshSoa(const TriMesh& mesh) {
  size_t n = mesh.faces.size();
  ax.resize(n);
  ay.resize(n);
  az.resize(n);
  bx.resize(n);
  by.resize(n);
  bz.resize(n);
  cx.resize(n);
  cy.resize(n);
  cz.resize(n);
  for (size_t f = 0; f < n; ++f) {
    const Vec3& a = mesh.vertices[mesh.faces[f][0]];
    const Vec3& b = mesh.vertices[mesh.faces[f][1]];
    const Vec3& c = mesh.vertices[mesh.faces[f][2]];
    ax[f] = a.x;
    ay[f] = a.y;
    az[f] = a.z;
    bx[f] = b.x;
    by[f] = b.y;
    bz[f] = b.z;
    cx[f] = c.x;
    cy[f] = c.y;
    cz[f] = c.z;
  }
}

}  // namespace m4d::geom
