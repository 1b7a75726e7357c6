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
#include <cmath>

#include "m4d/error.hpp"
#include "m4d/geom/nearest.hpp"
#include "m4d/kern/kernels.hpp"
#include "m4d/rng.hpp"

namespace m4d::geom {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  // Voronoi region walk (Ericson, Real-Time Collision Detection).
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double v = d1 / (d1 - d3);
    return a + ab * v;
  }
  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double w = d2 / (d2 - d6);
    return a + ac * w;
  }
  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }
  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom;
  double w = vc * denom;
  return a + ab * v + ac * w;
}

SurfaceHit nearest_surface_point(const TriMesh& mesh, const MeshSoa& soa,
                                 const Vec3& query) {
  if (soa.count() == 0) throw NumericalError("EmptyMesh", "mesh has no faces");
  kern::TriangleSoa tris{soa.ax.data(), soa.ay.data(), soa.az.data(),
                         soa.bx.data(), soa.by.data(), soa.bz.data(),
                         soa.cx.data(), soa.cy.data(), soa.cz.data(),
                         soa.count()};
  size_t best;
  double d2;
  kern::nearest_triangle(query.x, query.y, query.z, tris, &best, &d2);
  const auto& f = mesh.faces[best];
  Vec3 p = closest_point_on_triangle(query, mesh.vertices[f[0]],
                                     mesh.vertices[f[1]], mesh.vertices[f[2]]);
  return {p, norm(query - p), best};
}

SurfaceHit nearest_surface_point(const TriMesh& mesh, const Vec3& query) {
  MeshSoa soa(mesh);
  return nearest_surface_point(mesh, soa, query);
}

SurfaceHit nearest_surface_point(const SdfGrid& grid, const Vec3& query) {
  Vec3 p = query;
  // Gradient-descent projection onto the zero set. Repeated steps handle
  // the curvature of the interpolated field.
  for (int iter = 0; iter < 12; ++iter) {
    double d = grid.sample(p);
    if (std::abs(d) < 1e-9) break;
    Vec3 gdir = grid.gradient(p);
    double gn = norm(gdir);
    if (gn < 1e-12) break;
    p -= gdir * (d / (gn * gn));
  }
  return {p, norm(query - p), 0};
}

std::vector<Vec3> sample_surface_points(const TriMesh& mesh, size_t count,
                                        uint64_t seed) {
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (total <= 0.0) {
    throw NumericalError("EmptyMesh", "mesh has zero surface area");
  }
  Rng rng(seed);
  std::vector<Vec3> points;
  points.reserve(count);
  for (size_t s = 0; s < count; ++s) {
    double pick = rng.uniform() * total;
    size_t f = static_cast<size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
        cumulative.begin());
    f = std::min(f, mesh.faces.size() - 1);
    double r1 = std::sqrt(rng.uniform());
    double r2 = rng.uniform();
    const Vec3& a = mesh.vertices[mesh.faces[f][0]];
    const Vec3& b = mesh.vertices[mesh.faces[f][1]];
    const Vec3& c = mesh.vertices[mesh.faces[f][2]];
    points.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return points;
}

double chamfer_distance(const TriMesh& a, const TriMesh& b, size_t samples,
                        uint64_t seed) {
  auto pa = sample_surface_points(a, samples, seed);
  auto pb = sample_surface_points(b, samples, seed ^ 0x9e3779b97f4a7c15ull);
  MeshSoa sa(a), sb(b);
  double ab = 0.0, ba = 0.0;
  for (const Vec3& p : pa) ab += nearest_surface_point(b, sb, p).distance;
  for (const Vec3& p : pb) ba += nearest_surface_point(a, sa, p).distance;
  return ab / double(pa.size()) + ba / double(pb.size());
}

}  // namespace m4d::geom
