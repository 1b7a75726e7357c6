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

#ifndef M4D_SRC_KERN_SCALAR_IMPL_HPP_
#define M4D_SRC_KERN_SCALAR_IMPL_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

// Branchless closest-point formulation shared by the scalar reference and
// the vector variants: the squared distance to a triangle is the minimum of
// the in-face plane distance (masked to the interior) and the three edge
// segment distances. The same arithmetic vectorizes lane-per-point.

namespace m4d::kern::detail {

inline double segment_dist_sq(double px, double py, double pz, double ax,
                              double ay, double az, double dx, double dy,
                              double dz, double inv_dd) {
  double apx = px - ax, apy = py - ay, apz = pz - az;
  double t = (apx * dx + apy * dy + apz * dz) * inv_dd;
  t = std::clamp(t, 0.0, 1.0);
  double rx = apx - t * dx, ry = apy - t * dy, rz = apz - t * dz;
  return rx * rx + ry * ry + rz * rz;
}

struct TriPre {
  double ax, ay, az;
  double abx, aby, abz;
  double acx, acy, acz;
  double bcx, bcy, bcz;
  double bx, by, bz;
  double nx, ny, nz;
  double d00, d01, d11;
  double inv_ab, inv_ac, inv_bc;  // 1 / |edge|^2, 0 for zero-length edges
  double inv_denom;               // 1 / (d00 d11 - d01^2), 0 if degenerate
  bool degenerate;
};

inline TriPre precompute_triangle(const double tri[9]) {
  TriPre t;
  t.ax = tri[0];
  t.ay = tri[1];
  t.az = tri[2];
  t.bx = tri[3];
  t.by = tri[4];
  t.bz = tri[5];
  t.abx = tri[3] - tri[0];
  t.aby = tri[4] - tri[1];
  t.abz = tri[5] - tri[2];
  t.acx = tri[6] - tri[0];
  t.acy = tri[7] - tri[1];
  t.acz = tri[8] - tri[2];
  t.bcx = tri[6] - tri[3];
  t.bcy = tri[7] - tri[4];
  t.bcz = tri[8] - tri[5];
  t.nx = t.aby * t.acz - t.abz * t.acy;
  t.ny = t.abz * t.acx - t.abx * t.acz;
  t.nz = t.abx * t.acy - t.aby * t.acx;
  t.d00 = t.abx * t.abx + t.aby * t.aby + t.abz * t.abz;
  t.d01 = t.abx * t.acx + t.aby * t.acy + t.abz * t.acz;
  t.d11 = t.acx * t.acx + t.acy * t.acy + t.acz * t.acz;
  double dbc = t.bcx * t.bcx + t.bcy * t.bcy + t.bcz * t.bcz;
  double denom = t.d00 * t.d11 - t.d01 * t.d01;
  t.degenerate = !(denom > 0.0);
  t.inv_denom = t.degenerate ? 0.0 : 1.0 / denom;
  t.inv_ab = t.d00 > 0.0 ? 1.0 / t.d00 : 0.0;
  t.inv_ac = t.d11 > 0.0 ? 1.0 / t.d11 : 0.0;
  t.inv_bc = dbc > 0.0 ? 1.0 / dbc : 0.0;
  return t;
}

inline double point_tri_dist_sq_pre(double px, double py, double pz,
                                    const TriPre& t) {
  double apx = px - t.ax, apy = py - t.ay, apz = pz - t.az;
  double d20 = apx * t.abx + apy * t.aby + apz * t.abz;
  double d21 = apx * t.acx + apy * t.acy + apz * t.acz;
  double v = (t.d11 * d20 - t.d01 * d21) * t.inv_denom;
  double w = (t.d00 * d21 - t.d01 * d20) * t.inv_denom;
  double dn = apx * t.nx + apy * t.ny + apz * t.nz;
  double face = dn * dn * t.inv_denom;  // |n|^2 equals the barycentric denom
  bool inside =
      !t.degenerate && v >= 0.0 && w >= 0.0 && (v + w) <= 1.0;
  double best = inside ? face : std::numeric_limits<double>::infinity();
  best = std::min(best, segment_dist_sq(px, py, pz, t.ax, t.ay, t.az, t.abx,
                                        t.aby, t.abz, t.inv_ab));
  best = std::min(best, segment_dist_sq(px, py, pz, t.ax, t.ay, t.az, t.acx,
                                        t.acy, t.acz, t.inv_ac));
  best = std::min(best, segment_dist_sq(px, py, pz, t.bx, t.by, t.bz, t.bcx,
                                        t.bcy, t.bcz, t.inv_bc));
  return best;
}

}  // namespace m4d::kern::detail

#endif  // M4D_SRC_KERN_SCALAR_IMPL_HPP_
