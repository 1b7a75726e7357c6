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
#include <deque>
#include <limits>
#include <vector>

#include "../kern/scalar_impl.hpp"
#include "m4d/error.hpp"
#include "m4d/geom/sdf.hpp"
#include "m4d/kern/kernels.hpp"

namespace m4d::geom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridShape {
  Vec3 origin;
  double h;
  uint32_t nx, ny, nz;
  size_t idx(uint32_t i, uint32_t j, uint32_t k) const {
    return (static_cast<size_t>(k) * ny + j) * nx + i;
  }
};

void validate_mesh(const TriMesh& mesh) {
  if (mesh.vertices.size() < 4 || mesh.faces.size() < 4) {
    throw DegenerateMeshError("mesh too small to bound a volume");
  }
  mesh.check_indices();
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    if (mesh.face_area(f) < 1e-12) {
      throw DegenerateMeshError("face " + std::to_string(f) +
                                " has area below 1e-12");
    }
  }
  auto open = boundary_edges(mesh);
  if (!open.empty()) {
    std::string msg = "mesh is not watertight; unmatched edges:";
    for (size_t i = 0; i < open.size() && i < 8; ++i) {
      msg += " (" + std::to_string(open[i][0]) + "," +
             std::to_string(open[i][1]) + ")";
    }
    if (open.size() > 8) msg += " ...";
    throw NonWatertightError(msg);
  }
}

// Unsigned distances: exact values within a 2-cell band of each triangle,
// then breadth-first propagation carrying closest-triangle indices outward
// and re-evaluating the exact point-triangle distance at every hop.
void compute_unsigned(const TriMesh& mesh, const GridShape& g,
                      std::vector<double>* dist2, std::vector<int32_t>* closest) {
  size_t cells = static_cast<size_t>(g.nx) * g.ny * g.nz;
  dist2->assign(cells, kInf);
  closest->assign(cells, -1);

  std::vector<double> xs(g.nx), row_y(g.nx), row_z(g.nx), row_out(g.nx);
  for (uint32_t i = 0; i < g.nx; ++i) xs[i] = g.origin.x + i * g.h;

  std::vector<kern::detail::TriPre> pres(mesh.faces.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3& a = mesh.vertices[mesh.faces[f][0]];
    const Vec3& b = mesh.vertices[mesh.faces[f][1]];
    const Vec3& c = mesh.vertices[mesh.faces[f][2]];
    double tri[9] = {a.x, a.y, a.z, b.x, b.y, b.z, c.x, c.y, c.z};
    pres[f] = kern::detail::precompute_triangle(tri);

    auto lo_cell = [&](double v, double o, uint32_t n) {
      long i = static_cast<long>(std::floor((v - o) / g.h)) - 2;
      return static_cast<uint32_t>(std::clamp(i, 0l, long(n) - 1));
    };
    auto hi_cell = [&](double v, double o, uint32_t n) {
      long i = static_cast<long>(std::ceil((v - o) / g.h)) + 2;
      return static_cast<uint32_t>(std::clamp(i, 0l, long(n) - 1));
    };
    Vec3 tlo = cwise_min(a, cwise_min(b, c));
    Vec3 thi = cwise_max(a, cwise_max(b, c));
    uint32_t i0 = lo_cell(tlo.x, g.origin.x, g.nx);
    uint32_t i1 = hi_cell(thi.x, g.origin.x, g.nx);
    uint32_t j0 = lo_cell(tlo.y, g.origin.y, g.ny);
    uint32_t j1 = hi_cell(thi.y, g.origin.y, g.ny);
    uint32_t k0 = lo_cell(tlo.z, g.origin.z, g.nz);
    uint32_t k1 = hi_cell(thi.z, g.origin.z, g.nz);
    size_t count = i1 - i0 + 1;
    for (uint32_t k = k0; k <= k1; ++k) {
      double zk = g.origin.z + k * g.h;
      std::fill(row_z.begin(), row_z.begin() + count, zk);
      for (uint32_t j = j0; j <= j1; ++j) {
        double yj = g.origin.y + j * g.h;
        std::fill(row_y.begin(), row_y.begin() + count, yj);
        kern::point_triangle_dist_sq(xs.data() + i0, row_y.data(),
                                     row_z.data(), count, tri,
                                     row_out.data());
        size_t base = g.idx(i0, j, k);
        for (size_t i = 0; i < count; ++i) {
          if (row_out[i] < (*dist2)[base + i]) {
            (*dist2)[base + i] = row_out[i];
            (*closest)[base + i] = static_cast<int32_t>(f);
          }
        }
      }
    }
  }

  auto relax = [&](size_t from, size_t to, uint32_t ti, uint32_t tj,
                   uint32_t tk) {
    int32_t f = (*closest)[from];
    Vec3 p{g.origin.x + ti * g.h, g.origin.y + tj * g.h,
           g.origin.z + tk * g.h};
    double d = kern::detail::point_tri_dist_sq_pre(p.x, p.y, p.z, pres[f]);
    if (d < (*dist2)[to]) {
      (*dist2)[to] = d;
      (*closest)[to] = f;
      return true;
    }
    return false;
  };

  std::deque<uint32_t> queue;
  for (uint32_t k = 0; k < g.nz; ++k) {
    for (uint32_t j = 0; j < g.ny; ++j) {
      for (uint32_t i = 0; i < g.nx; ++i) {
        if ((*closest)[g.idx(i, j, k)] >= 0) {
          queue.push_back(static_cast<uint32_t>(g.idx(i, j, k)));
        }
      }
    }
  }
  if (queue.empty()) {
    throw NumericalError("SdfBandEmpty",
                         "no grid cell within the exact band of any face");
  }
  auto decode = [&](uint32_t lin, uint32_t* i, uint32_t* j, uint32_t* k) {
    *i = lin % g.nx;
    *j = (lin / g.nx) % g.ny;
    *k = lin / (g.nx * g.ny);
  };
  while (!queue.empty()) {
    uint32_t lin = queue.front();
    queue.pop_front();
    uint32_t i, j, k;
    decode(lin, &i, &j, &k);
    const int32_t di[6] = {-1, 1, 0, 0, 0, 0};
    const int32_t dj[6] = {0, 0, -1, 1, 0, 0};
    const int32_t dk[6] = {0, 0, 0, 0, -1, 1};
    for (int d = 0; d < 6; ++d) {
      int64_t ni = int64_t(i) + di[d];
      int64_t nj = int64_t(j) + dj[d];
      int64_t nk = int64_t(k) + dk[d];
      if (ni < 0 || nj < 0 || nk < 0 || ni >= g.nx || nj >= g.ny ||
          nk >= g.nz) {
        continue;
      }
      size_t to = g.idx(uint32_t(ni), uint32_t(nj), uint32_t(nk));
      if (relax(lin, to, uint32_t(ni), uint32_t(nj), uint32_t(nk))) {
        queue.push_back(static_cast<uint32_t>(to));
      }
    }
  }
}

// Parity of x-ray crossings per (j, k) column, accumulated with a
// watertight rasterization of each triangle's (y, z) projection. Edge
// functions are evaluated on index-canonical vertex pairs so shared edges
// get bitwise-complementary values and no column counts a crossing twice.
void compute_sign(const TriMesh& mesh, const GridShape& g,
                  std::vector<uint8_t>* inside) {
  size_t columns = static_cast<size_t>(g.ny) * g.nz;
  std::vector<std::vector<double>> crossings(columns);

  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    uint32_t idx[3] = {mesh.faces[f][0], mesh.faces[f][1], mesh.faces[f][2]};
    const Vec3& a = mesh.vertices[idx[0]];
    const Vec3& b = mesh.vertices[idx[1]];
    const Vec3& c = mesh.vertices[idx[2]];
    double area2 = (b.y - a.y) * (c.z - a.z) - (b.z - a.z) * (c.y - a.y);
    if (area2 == 0.0) continue;  // projects to a segment; no x crossings
    Vec3 n = cross(b - a, c - a);
    // Counterclockwise ordering in the (y, z) projection.
    uint32_t v[3] = {idx[0], idx[1], idx[2]};
    if (area2 < 0.0) std::swap(v[1], v[2]);
    const Vec3* pv[3] = {&mesh.vertices[v[0]], &mesh.vertices[v[1]],
                         &mesh.vertices[v[2]]};

    double ylo = std::min({pv[0]->y, pv[1]->y, pv[2]->y});
    double yhi = std::max({pv[0]->y, pv[1]->y, pv[2]->y});
    double zlo = std::min({pv[0]->z, pv[1]->z, pv[2]->z});
    double zhi = std::max({pv[0]->z, pv[1]->z, pv[2]->z});
    long j0 = std::max(0l, static_cast<long>(
                               std::ceil((ylo - g.origin.y) / g.h)));
    long j1 = std::min(long(g.ny) - 1, static_cast<long>(std::floor(
                                           (yhi - g.origin.y) / g.h)));
    long k0 = std::max(0l, static_cast<long>(
                               std::ceil((zlo - g.origin.z) / g.h)));
    long k1 = std::min(long(g.nz) - 1, static_cast<long>(std::floor(
                                           (zhi - g.origin.z) / g.h)));
    if (j0 > j1 || k0 > k1) continue;

    for (long k = k0; k <= k1; ++k) {
      double pz = g.origin.z + k * g.h;
      for (long j = j0; j <= j1; ++j) {
        double py = g.origin.y + j * g.h;
        bool in = true;
        for (int e = 0; e < 3 && in; ++e) {
          uint32_t ui = v[e], vi = v[(e + 1) % 3];
          const Vec3& u = mesh.vertices[ui];
          const Vec3& w = mesh.vertices[vi];
          double ey = w.y - u.y, ez = w.z - u.z;
          if (ey == 0.0 && ez == 0.0) continue;  // vacuous in projection
          double val;
          if (ui < vi) {
            val = (w.y - u.y) * (pz - u.z) - (w.z - u.z) * (py - u.y);
          } else {
            val = -((u.y - w.y) * (pz - w.z) - (u.z - w.z) * (py - w.y));
          }
          if (val > 0.0) continue;
          if (val < 0.0) {
            in = false;
            continue;
          }
          // On the edge: the triangle owns it only if the directed edge
          // goes down in z, or is horizontal and goes down in y.
          bool owns = ez < 0.0 || (ez == 0.0 && ey < 0.0);
          if (!owns) in = false;
        }
        if (!in) continue;
        double xstar =
            a.x - (n.y * (py - a.y) + n.z * (pz - a.z)) / n.x;
        crossings[size_t(k) * g.ny + size_t(j)].push_back(xstar);
      }
    }
  }

  inside->assign(static_cast<size_t>(g.nx) * g.ny * g.nz, 0);
  for (uint32_t k = 0; k < g.nz; ++k) {
    for (uint32_t j = 0; j < g.ny; ++j) {
      auto& col = crossings[size_t(k) * g.ny + j];
      if (col.empty()) continue;
      std::sort(col.begin(), col.end());
      size_t ptr = 0;
      for (uint32_t i = 0; i < g.nx; ++i) {
        double x = g.origin.x + i * g.h;
        while (ptr < col.size() && col[ptr] < x) ++ptr;
        if (ptr & 1) (*inside)[g.idx(i, j, k)] = 1;
      }
    }
  }
}

}  // namespace

SdfGrid compute_sdf(const TriMesh& mesh, int resolution, double padding) {
  if (resolution < 8) {
    throw ConfigError("sdf resolution must be at least 8");
  }
  validate_mesh(mesh);

  Aabb box = mesh.aabb();
  double pad = padding < 0.0 ? 0.1 * box.diagonal() : padding;
  if (pad <= 0.0) throw ConfigError("sdf padding must be positive");
  Vec3 lo = box.lo - Vec3{pad, pad, pad};
  Vec3 hi = box.hi + Vec3{pad, pad, pad};
  Vec3 ext = hi - lo;
  double max_ext = std::max({ext.x, ext.y, ext.z});
  GridShape g;
  g.origin = lo;
  g.h = max_ext / (resolution - 1);
  auto axis_dims = [&](double e) {
    return std::max(2u, static_cast<uint32_t>(std::ceil(e / g.h)) + 1u);
  };
  g.nx = axis_dims(ext.x);
  g.ny = axis_dims(ext.y);
  g.nz = axis_dims(ext.z);

  std::vector<double> dist2;
  std::vector<int32_t> closest;
  compute_unsigned(mesh, g, &dist2, &closest);

  std::vector<uint8_t> inside;
  compute_sign(mesh, g, &inside);

  SdfGrid grid;
  grid.origin = g.origin;
  grid.spacing = g.h;
  grid.dims = {g.nx, g.ny, g.nz};
  grid.values.resize(dist2.size());
  for (size_t c = 0; c < dist2.size(); ++c) {
    double d = std::sqrt(dist2[c]);
    grid.values[c] = static_cast<float>(inside[c] ? -d : d);
  }
  return grid;
}

}  // namespace m4d::geom
