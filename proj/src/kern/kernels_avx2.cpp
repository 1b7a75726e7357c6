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

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "m4d/kern/kernels.hpp"
#include "scalar_impl.hpp"

namespace m4d::kern {

namespace {

// f64 lanes are 4 wide under AVX2; f32 lanes are 8 wide.

inline __m256d seg_dist_sq_4(__m256d px, __m256d py, __m256d pz, __m256d ax,
                             __m256d ay, __m256d az, __m256d dx, __m256d dy,
                             __m256d dz, __m256d inv_dd) {
  __m256d apx = _mm256_sub_pd(px, ax);
  __m256d apy = _mm256_sub_pd(py, ay);
  __m256d apz = _mm256_sub_pd(pz, az);
  __m256d t = _mm256_mul_pd(apx, dx);
  t = _mm256_fmadd_pd(apy, dy, t);
  t = _mm256_fmadd_pd(apz, dz, t);
  t = _mm256_mul_pd(t, inv_dd);
  t = _mm256_max_pd(t, _mm256_setzero_pd());
  t = _mm256_min_pd(t, _mm256_set1_pd(1.0));
  __m256d rx = _mm256_fnmadd_pd(t, dx, apx);
  __m256d ry = _mm256_fnmadd_pd(t, dy, apy);
  __m256d rz = _mm256_fnmadd_pd(t, dz, apz);
  __m256d d = _mm256_mul_pd(rx, rx);
  d = _mm256_fmadd_pd(ry, ry, d);
  d = _mm256_fmadd_pd(rz, rz, d);
  return d;
}

void point_triangle_dist_sq_avx2(const double* px, const double* py,
                                 const double* pz, size_t n,
                                 const double tri[9], double* out) {
  detail::TriPre p = detail::precompute_triangle(tri);
  __m256d ax = _mm256_set1_pd(p.ax), ay = _mm256_set1_pd(p.ay),
          az = _mm256_set1_pd(p.az);
  __m256d bx = _mm256_set1_pd(p.bx), by = _mm256_set1_pd(p.by),
          bz = _mm256_set1_pd(p.bz);
  __m256d abx = _mm256_set1_pd(p.abx), aby = _mm256_set1_pd(p.aby),
          abz = _mm256_set1_pd(p.abz);
  __m256d acx = _mm256_set1_pd(p.acx), acy = _mm256_set1_pd(p.acy),
          acz = _mm256_set1_pd(p.acz);
  __m256d bcx = _mm256_set1_pd(p.bcx), bcy = _mm256_set1_pd(p.bcy),
          bcz = _mm256_set1_pd(p.bcz);
  __m256d nx = _mm256_set1_pd(p.nx), ny = _mm256_set1_pd(p.ny),
          nz = _mm256_set1_pd(p.nz);
  __m256d d00 = _mm256_set1_pd(p.d00), d01 = _mm256_set1_pd(p.d01),
          d11 = _mm256_set1_pd(p.d11);
  __m256d inv_denom = _mm256_set1_pd(p.inv_denom);
  __m256d inv_ab = _mm256_set1_pd(p.inv_ab), inv_ac = _mm256_set1_pd(p.inv_ac),
          inv_bc = _mm256_set1_pd(p.inv_bc);
  __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d one = _mm256_set1_pd(1.0);
  __m256d zero = _mm256_setzero_pd();

  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(px + i);
    __m256d y = _mm256_loadu_pd(py + i);
    __m256d z = _mm256_loadu_pd(pz + i);
    __m256d apx = _mm256_sub_pd(x, ax);
    __m256d apy = _mm256_sub_pd(y, ay);
    __m256d apz = _mm256_sub_pd(z, az);
    __m256d d20 = _mm256_mul_pd(apx, abx);
    d20 = _mm256_fmadd_pd(apy, aby, d20);
    d20 = _mm256_fmadd_pd(apz, abz, d20);
    __m256d d21 = _mm256_mul_pd(apx, acx);
    d21 = _mm256_fmadd_pd(apy, acy, d21);
    d21 = _mm256_fmadd_pd(apz, acz, d21);
    __m256d v = _mm256_mul_pd(
        _mm256_fnmadd_pd(d01, d21, _mm256_mul_pd(d11, d20)), inv_denom);
    __m256d w = _mm256_mul_pd(
        _mm256_fnmadd_pd(d01, d20, _mm256_mul_pd(d00, d21)), inv_denom);
    __m256d dn = _mm256_mul_pd(apx, nx);
    dn = _mm256_fmadd_pd(apy, ny, dn);
    dn = _mm256_fmadd_pd(apz, nz, dn);
    __m256d face = _mm256_mul_pd(_mm256_mul_pd(dn, dn), inv_denom);
    __m256d inside = _mm256_and_pd(
        _mm256_cmp_pd(v, zero, _CMP_GE_OQ),
        _mm256_and_pd(_mm256_cmp_pd(w, zero, _CMP_GE_OQ),
                      _mm256_cmp_pd(_mm256_add_pd(v, w), one, _CMP_LE_OQ)));
    if (p.degenerate) inside = zero;  // all-false mask
    __m256d best = _mm256_blendv_pd(inf, face, inside);
    best = _mm256_min_pd(best, seg_dist_sq_4(x, y, z, ax, ay, az, abx, aby,
                                             abz, inv_ab));
    best = _mm256_min_pd(best, seg_dist_sq_4(x, y, z, ax, ay, az, acx, acy,
                                             acz, inv_ac));
    best = _mm256_min_pd(best, seg_dist_sq_4(x, y, z, bx, by, bz, bcx, bcy,
                                             bcz, inv_bc));
    _mm256_storeu_pd(out + i, best);
  }
  for (; i < n; ++i) {
    out[i] = detail::point_tri_dist_sq_pre(px[i], py[i], pz[i], p);
  }
}

void nearest_triangle_avx2(double qx, double qy, double qz,
                           const TriangleSoa& tris, size_t* best_index,
                           double* best_dist_sq) {
  __m256d x = _mm256_set1_pd(qx);
  __m256d y = _mm256_set1_pd(qy);
  __m256d z = _mm256_set1_pd(qz);
  __m256d best_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256i best_i = _mm256_setzero_si256();
  __m256i cur_i = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i step = _mm256_set1_epi64x(4);
  __m256d one = _mm256_set1_pd(1.0);
  __m256d zero = _mm256_setzero_pd();
  __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

  size_t i = 0;
  for (; i + 4 <= tris.count; i += 4) {
    __m256d ax = _mm256_loadu_pd(tris.ax + i);
    __m256d ay = _mm256_loadu_pd(tris.ay + i);
    __m256d az = _mm256_loadu_pd(tris.az + i);
    __m256d bx = _mm256_loadu_pd(tris.bx + i);
    __m256d by = _mm256_loadu_pd(tris.by + i);
    __m256d bz = _mm256_loadu_pd(tris.bz + i);
    __m256d cx = _mm256_loadu_pd(tris.cx + i);
    __m256d cy = _mm256_loadu_pd(tris.cy + i);
    __m256d cz = _mm256_loadu_pd(tris.cz + i);
    __m256d abx = _mm256_sub_pd(bx, ax);
    __m256d aby = _mm256_sub_pd(by, ay);
    __m256d abz = _mm256_sub_pd(bz, az);
    __m256d acx = _mm256_sub_pd(cx, ax);
    __m256d acy = _mm256_sub_pd(cy, ay);
    __m256d acz = _mm256_sub_pd(cz, az);
    __m256d bcx = _mm256_sub_pd(cx, bx);
    __m256d bcy = _mm256_sub_pd(cy, by);
    __m256d bcz = _mm256_sub_pd(cz, bz);
    __m256d nx = _mm256_fnmadd_pd(abz, acy, _mm256_mul_pd(aby, acz));
    __m256d ny = _mm256_fnmadd_pd(abx, acz, _mm256_mul_pd(abz, acx));
    __m256d nz = _mm256_fnmadd_pd(aby, acx, _mm256_mul_pd(abx, acy));
    __m256d d00 = _mm256_mul_pd(abx, abx);
    d00 = _mm256_fmadd_pd(aby, aby, d00);
    d00 = _mm256_fmadd_pd(abz, abz, d00);
    __m256d d01 = _mm256_mul_pd(abx, acx);
    d01 = _mm256_fmadd_pd(aby, acy, d01);
    d01 = _mm256_fmadd_pd(abz, acz, d01);
    __m256d d11 = _mm256_mul_pd(acx, acx);
    d11 = _mm256_fmadd_pd(acy, acy, d11);
    d11 = _mm256_fmadd_pd(acz, acz, d11);
    __m256d dbc = _mm256_mul_pd(bcx, bcx);
    dbc = _mm256_fmadd_pd(bcy, bcy, dbc);
    dbc = _mm256_fmadd_pd(bcz, bcz, dbc);
    __m256d denom = _mm256_fnmadd_pd(d01, d01, _mm256_mul_pd(d00, d11));
    __m256d denom_ok = _mm256_cmp_pd(denom, zero, _CMP_GT_OQ);
    __m256d inv_denom = _mm256_and_pd(
        _mm256_div_pd(one, _mm256_blendv_pd(one, denom, denom_ok)), denom_ok);
    __m256d ab_ok = _mm256_cmp_pd(d00, zero, _CMP_GT_OQ);
    __m256d inv_ab = _mm256_and_pd(
        _mm256_div_pd(one, _mm256_blendv_pd(one, d00, ab_ok)), ab_ok);
    __m256d ac_ok = _mm256_cmp_pd(d11, zero, _CMP_GT_OQ);
    __m256d inv_ac = _mm256_and_pd(
        _mm256_div_pd(one, _mm256_blendv_pd(one, d11, ac_ok)), ac_ok);
    __m256d bc_ok = _mm256_cmp_pd(dbc, zero, _CMP_GT_OQ);
    __m256d inv_bc = _mm256_and_pd(
        _mm256_div_pd(one, _mm256_blendv_pd(one, dbc, bc_ok)), bc_ok);

    __m256d apx = _mm256_sub_pd(x, ax);
    __m256d apy = _mm256_sub_pd(y, ay);
    __m256d apz = _mm256_sub_pd(z, az);
    __m256d d20 = _mm256_mul_pd(apx, abx);
    d20 = _mm256_fmadd_pd(apy, aby, d20);
    d20 = _mm256_fmadd_pd(apz, abz, d20);
    __m256d d21 = _mm256_mul_pd(apx, acx);
    d21 = _mm256_fmadd_pd(apy, acy, d21);
    d21 = _mm256_fmadd_pd(apz, acz, d21);
    __m256d v = _mm256_mul_pd(
        _mm256_fnmadd_pd(d01, d21, _mm256_mul_pd(d11, d20)), inv_denom);
    __m256d w = _mm256_mul_pd(
        _mm256_fnmadd_pd(d01, d20, _mm256_mul_pd(d00, d21)), inv_denom);
    __m256d dn = _mm256_mul_pd(apx, nx);
    dn = _mm256_fmadd_pd(apy, ny, dn);
    dn = _mm256_fmadd_pd(apz, nz, dn);
    __m256d face = _mm256_mul_pd(_mm256_mul_pd(dn, dn), inv_denom);
    __m256d inside = _mm256_and_pd(
        denom_ok,
        _mm256_and_pd(
            _mm256_cmp_pd(v, zero, _CMP_GE_OQ),
            _mm256_and_pd(
                _mm256_cmp_pd(w, zero, _CMP_GE_OQ),
                _mm256_cmp_pd(_mm256_add_pd(v, w), one, _CMP_LE_OQ))));
    __m256d d = _mm256_blendv_pd(inf, face, inside);
    d = _mm256_min_pd(d, seg_dist_sq_4(x, y, z, ax, ay, az, abx, aby, abz,
                                       inv_ab));
    d = _mm256_min_pd(d, seg_dist_sq_4(x, y, z, ax, ay, az, acx, acy, acz,
                                       inv_ac));
    d = _mm256_min_pd(d, seg_dist_sq_4(x, y, z, bx, by, bz, bcx, bcy, bcz,
                                       inv_bc));
    __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
    best_d = _mm256_blendv_pd(best_d, d, lt);
    best_i = _mm256_blendv_epi8(best_i, cur_i, _mm256_castpd_si256(lt));
    cur_i = _mm256_add_epi64(cur_i, step);
  }

  alignas(32) double lane_d[4];
  alignas(32) long long lane_i[4];
  _mm256_store_pd(lane_d, best_d);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_i);
  size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int l = 0; l < 4; ++l) {
    size_t idx = static_cast<size_t>(lane_i[l]);
    if (lane_d[l] < bd || (lane_d[l] == bd && idx < best)) {
      bd = lane_d[l];
      best = idx;
    }
  }
  for (; i < tris.count; ++i) {
    double tri[9] = {tris.ax[i], tris.ay[i], tris.az[i],
                     tris.bx[i], tris.by[i], tris.bz[i],
                     tris.cx[i], tris.cy[i], tris.cz[i]};
    detail::TriPre pre = detail::precompute_triangle(tri);
    double d = detail::point_tri_dist_sq_pre(qx, qy, qz, pre);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  *best_index = best;
  *best_dist_sq = bd;
}

void nearest_point_avx2(double qx, double qy, double qz, const double* px,
                        const double* py, const double* pz, size_t n,
                        size_t* best_index, double* best_dist_sq) {
  __m256d x = _mm256_set1_pd(qx);
  __m256d y = _mm256_set1_pd(qy);
  __m256d z = _mm256_set1_pd(qz);
  __m256d best_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256i best_i = _mm256_setzero_si256();
  __m256i cur_i = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i step = _mm256_set1_epi64x(4);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(px + i), x);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(py + i), y);
    __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(pz + i), z);
    __m256d d = _mm256_mul_pd(dx, dx);
    d = _mm256_fmadd_pd(dy, dy, d);
    d = _mm256_fmadd_pd(dz, dz, d);
    __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
    best_d = _mm256_blendv_pd(best_d, d, lt);
    best_i = _mm256_blendv_epi8(best_i, cur_i, _mm256_castpd_si256(lt));
    cur_i = _mm256_add_epi64(cur_i, step);
  }
  alignas(32) double lane_d[4];
  alignas(32) long long lane_i[4];
  _mm256_store_pd(lane_d, best_d);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_i);
  size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int l = 0; l < 4; ++l) {
    size_t idx = static_cast<size_t>(lane_i[l]);
    if (lane_d[l] < bd || (lane_d[l] == bd && idx < best)) {
      bd = lane_d[l];
      best = idx;
    }
  }
  for (; i < n; ++i) {
    double dx = px[i] - qx, dy = py[i] - qy, dz = pz[i] - qz;
    double d = dx * dx + dy * dy + dz * dz;
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  *best_index = best;
  *best_dist_sq = bd;
}

size_t count_in_capsule_avx2(const double* px, const double* py,
                             const double* pz, size_t n, const double seg_a[3],
                             const double seg_b[3], double radius,
                             uint8_t* hit_mask) {
  double ddx = seg_b[0] - seg_a[0];
  double ddy = seg_b[1] - seg_a[1];
  double ddz = seg_b[2] - seg_a[2];
  double dd = ddx * ddx + ddy * ddy + ddz * ddz;
  double sinv = dd > 0.0 ? 1.0 / dd : 0.0;
  __m256d ax = _mm256_set1_pd(seg_a[0]);
  __m256d ay = _mm256_set1_pd(seg_a[1]);
  __m256d az = _mm256_set1_pd(seg_a[2]);
  __m256d dx = _mm256_set1_pd(ddx);
  __m256d dy = _mm256_set1_pd(ddy);
  __m256d dz = _mm256_set1_pd(ddz);
  __m256d inv_dd = _mm256_set1_pd(sinv);
  __m256d r2 = _mm256_set1_pd(radius * radius);
  size_t count = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(px + i);
    __m256d y = _mm256_loadu_pd(py + i);
    __m256d z = _mm256_loadu_pd(pz + i);
    __m256d d = seg_dist_sq_4(x, y, z, ax, ay, az, dx, dy, dz, inv_dd);
    int bits = _mm256_movemask_pd(_mm256_cmp_pd(d, r2, _CMP_LT_OQ));
    count += static_cast<size_t>(__builtin_popcount(bits));
    if (hit_mask && bits) {
      for (int l = 0; l < 4; ++l) {
        if (bits & (1 << l)) hit_mask[i + l] = 1;
      }
    }
  }
  double a3[3] = {seg_a[0], seg_a[1], seg_a[2]};
  for (; i < n; ++i) {
    double d = detail::segment_dist_sq(px[i], py[i], pz[i], a3[0], a3[1],
                                       a3[2], ddx, ddy, ddz, sinv);
    if (d < radius * radius) {
      ++count;
      if (hit_mask) hit_mask[i] = 1;
    }
  }
  return count;
}

void adam_step_avx2(double* x, double* m, double* v, const double* g,
                    size_t n, double lr, double beta1, double beta2,
                    double eps, double bc1, double bc2) {
  __m256d b1 = _mm256_set1_pd(beta1);
  __m256d b2 = _mm256_set1_pd(beta2);
  __m256d ob1 = _mm256_set1_pd(1.0 - beta1);
  __m256d ob2 = _mm256_set1_pd(1.0 - beta2);
  __m256d vlr = _mm256_set1_pd(lr);
  __m256d veps = _mm256_set1_pd(eps);
  __m256d inv_bc1 = _mm256_set1_pd(1.0 / bc1);
  __m256d inv_bc2 = _mm256_set1_pd(1.0 / bc2);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_fmadd_pd(b1, mi, _mm256_mul_pd(ob1, gi));
    vi = _mm256_fmadd_pd(b2, vi, _mm256_mul_pd(ob2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    __m256d mh = _mm256_mul_pd(mi, inv_bc1);
    __m256d vh = _mm256_mul_pd(vi, inv_bc2);
    __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vh), veps);
    __m256d xi = _mm256_loadu_pd(x + i);
    xi = _mm256_sub_pd(xi, _mm256_div_pd(_mm256_mul_pd(vlr, mh), denom));
    _mm256_storeu_pd(x + i, xi);
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    double mh = m[i] / bc1;
    double vh = v[i] / bc2;
    x[i] -= lr * mh / (std::sqrt(vh) + eps);
  }
}

inline float hsum8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  return _mm_cvtss_f32(lo);
}

void linear_forward_avx2(const float* x, size_t rows, size_t in_dim,
                         const float* w, const float* b, size_t out_dim,
                         float* y) {
  size_t k8 = in_dim & ~size_t{7};
  for (size_t r = 0; r < rows; ++r) {
    const float* xr = x + r * in_dim;
    float* yr = y + r * out_dim;
    size_t o = 0;
    for (; o + 4 <= out_dim; o += 4) {
      const float* w0 = w + (o + 0) * in_dim;
      const float* w1 = w + (o + 1) * in_dim;
      const float* w2 = w + (o + 2) * in_dim;
      const float* w3 = w + (o + 3) * in_dim;
      __m256 a0 = _mm256_setzero_ps();
      __m256 a1 = _mm256_setzero_ps();
      __m256 a2 = _mm256_setzero_ps();
      __m256 a3 = _mm256_setzero_ps();
      for (size_t k = 0; k < k8; k += 8) {
        __m256 xv = _mm256_loadu_ps(xr + k);
        a0 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(w0 + k), a0);
        a1 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(w1 + k), a1);
        a2 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(w2 + k), a2);
        a3 = _mm256_fmadd_ps(xv, _mm256_loadu_ps(w3 + k), a3);
      }
      float s0 = hsum8(a0), s1 = hsum8(a1), s2 = hsum8(a2), s3 = hsum8(a3);
      for (size_t k = k8; k < in_dim; ++k) {
        float xv = xr[k];
        s0 += xv * w0[k];
        s1 += xv * w1[k];
        s2 += xv * w2[k];
        s3 += xv * w3[k];
      }
      yr[o + 0] = s0 + b[o + 0];
      yr[o + 1] = s1 + b[o + 1];
      yr[o + 2] = s2 + b[o + 2];
      yr[o + 3] = s3 + b[o + 3];
    }
    for (; o < out_dim; ++o) {
      const float* wo = w + o * in_dim;
      __m256 acc = _mm256_setzero_ps();
      for (size_t k = 0; k < k8; k += 8) {
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(xr + k),
                              _mm256_loadu_ps(wo + k), acc);
      }
      float s = hsum8(acc);
      for (size_t k = k8; k < in_dim; ++k) s += xr[k] * wo[k];
      yr[o] = s + b[o];
    }
  }
}

void linear_backward_input_avx2(const float* dy, size_t rows, size_t out_dim,
                                const float* w, size_t in_dim, float* dx) {
  size_t k8 = in_dim & ~size_t{7};
  for (size_t r = 0; r < rows; ++r) {
    const float* dyr = dy + r * out_dim;
    float* dxr = dx + r * in_dim;
    std::memset(dxr, 0, in_dim * sizeof(float));
    for (size_t o = 0; o < out_dim; ++o) {
      float s = dyr[o];
      if (s == 0.0f) continue;
      const float* wo = w + o * in_dim;
      __m256 sv = _mm256_set1_ps(s);
      for (size_t k = 0; k < k8; k += 8) {
        __m256 acc = _mm256_loadu_ps(dxr + k);
        acc = _mm256_fmadd_ps(sv, _mm256_loadu_ps(wo + k), acc);
        _mm256_storeu_ps(dxr + k, acc);
      }
      for (size_t k = k8; k < in_dim; ++k) dxr[k] += s * wo[k];
    }
  }
}

void linear_backward_params_avx2(const float* dy, size_t rows, size_t out_dim,
                                 const float* x, size_t in_dim, float* dw,
                                 float* db) {
  size_t k8 = in_dim & ~size_t{7};
  for (size_t r = 0; r < rows; ++r) {
    const float* dyr = dy + r * out_dim;
    const float* xr = x + r * in_dim;
    for (size_t o = 0; o < out_dim; ++o) {
      float s = dyr[o];
      db[o] += s;
      if (s == 0.0f) continue;
      float* dwo = dw + o * in_dim;
      __m256 sv = _mm256_set1_ps(s);
      for (size_t k = 0; k < k8; k += 8) {
        __m256 acc = _mm256_loadu_ps(dwo + k);
        acc = _mm256_fmadd_ps(sv, _mm256_loadu_ps(xr + k), acc);
        _mm256_storeu_ps(dwo + k, acc);
      }
      for (size_t k = k8; k < in_dim; ++k) dwo[k] += s * xr[k];
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table = {
      point_triangle_dist_sq_avx2, nearest_triangle_avx2,
      nearest_point_avx2,          count_in_capsule_avx2,
      adam_step_avx2,              linear_forward_avx2,
      linear_backward_input_avx2,  linear_backward_params_avx2,
  };
  return table;
}

}  // namespace m4d::kern
