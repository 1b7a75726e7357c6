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
#include <cstring>

#include "m4d/kern/kernels.hpp"
#include "scalar_impl.hpp"

namespace m4d::kern {

namespace {

void point_triangle_dist_sq_scalar(const double* px, const double* py,
                                   const double* pz, size_t n,
                                   const double tri[9], double* out) {
  detail::TriPre pre = detail::precompute_triangle(tri);
  for (size_t i = 0; i < n; ++i) {
    out[i] = detail::point_tri_dist_sq_pre(px[i], py[i], pz[i], pre);
  }
}

void nearest_triangle_scalar(double qx, double qy, double qz,
                             const TriangleSoa& tris, size_t* best_index,
                             double* best_dist_sq) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < tris.count; ++i) {
    double tri[9] = {tris.ax[i], tris.ay[i], tris.az[i],
                     tris.bx[i], tris.by[i], tris.bz[i],
                     tris.cx[i], tris.cy[i], tris.cz[i]};
    detail::TriPre pre = detail::precompute_triangle(tri);
    double d = detail::point_tri_dist_sq_pre(qx, qy, qz, pre);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  *best_index = best;
  *best_dist_sq = best_d;
}

void nearest_point_scalar(double qx, double qy, double qz, const double* px,
                          const double* py, const double* pz, size_t n,
                          size_t* best_index, double* best_dist_sq) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    double dx = px[i] - qx, dy = py[i] - qy, dz = pz[i] - qz;
    double d = dx * dx + dy * dy + dz * dz;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  *best_index = best;
  *best_dist_sq = best_d;
}

size_t count_in_capsule_scalar(const double* px, const double* py,
                               const double* pz, size_t n,
                               const double seg_a[3], const double seg_b[3],
                               double radius, uint8_t* hit_mask) {
  double dx = seg_b[0] - seg_a[0];
  double dy = seg_b[1] - seg_a[1];
  double dz = seg_b[2] - seg_a[2];
  double dd = dx * dx + dy * dy + dz * dz;
  double inv_dd = dd > 0.0 ? 1.0 / dd : 0.0;
  double r2 = radius * radius;
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    double d = detail::segment_dist_sq(px[i], py[i], pz[i], seg_a[0], seg_a[1],
                                       seg_a[2], dx, dy, dz, inv_dd);
    if (d < r2) {
      ++count;
      if (hit_mask) hit_mask[i] = 1;
    }
  }
  return count;
}

void adam_step_scalar(double* x, double* m, double* v, const double* g,
                      size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2) {
  double inv_bc1 = 1.0 / bc1;
  double inv_bc2 = 1.0 / bc2;
  for (size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    double mh = m[i] * inv_bc1;
    double vh = v[i] * inv_bc2;
    x[i] -= lr * mh / (std::sqrt(vh) + eps);
  }
}

void linear_forward_scalar(const float* x, size_t rows, size_t in_dim,
                           const float* w, const float* b, size_t out_dim,
                           float* y) {
  for (size_t r = 0; r < rows; ++r) {
    const float* xr = x + r * in_dim;
    float* yr = y + r * out_dim;
    for (size_t o = 0; o < out_dim; ++o) {
      const float* wo = w + o * in_dim;
      float acc = 0.0f;
      for (size_t k = 0; k < in_dim; ++k) acc += xr[k] * wo[k];
      yr[o] = acc + b[o];
    }
  }
}

void linear_backward_input_scalar(const float* dy, size_t rows,
                                  size_t out_dim, const float* w,
                                  size_t in_dim, float* dx) {
  for (size_t r = 0; r < rows; ++r) {
    const float* dyr = dy + r * out_dim;
    float* dxr = dx + r * in_dim;
    std::memset(dxr, 0, in_dim * sizeof(float));
    for (size_t o = 0; o < out_dim; ++o) {
      float s = dyr[o];
      if (s == 0.0f) continue;
      const float* wo = w + o * in_dim;
      for (size_t k = 0; k < in_dim; ++k) dxr[k] += s * wo[k];
    }
  }
}

void linear_backward_params_scalar(const float* dy, size_t rows,
                                   size_t out_dim, const float* x,
                                   size_t in_dim, float* dw, float* db) {
  for (size_t r = 0; r < rows; ++r) {
    const float* dyr = dy + r * out_dim;
    const float* xr = x + r * in_dim;
    for (size_t o = 0; o < out_dim; ++o) {
      float s = dyr[o];
      db[o] += s;
      if (s == 0.0f) continue;
      float* dwo = dw + o * in_dim;
      for (size_t k = 0; k < in_dim; ++k) dwo[k] += s * xr[k];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      point_triangle_dist_sq_scalar, nearest_triangle_scalar,
      nearest_point_scalar,          count_in_capsule_scalar,
      adam_step_scalar,              linear_forward_scalar,
      linear_backward_input_scalar,  linear_backward_params_scalar,
  };
  return table;
}

}  // namespace m4d::kern
