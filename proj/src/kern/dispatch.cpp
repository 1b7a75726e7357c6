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

#include <stdexcept>

#include "m4d/kern/kernels.hpp"

namespace m4d::kern {

namespace {

bool detect_avx2() {
#if defined(M4D_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;

  Dispatch() {
#if defined(M4D_HAVE_AVX2_TU)
    if (detect_avx2()) {
      backend = Backend::kAvx2;
      table = &avx2_table();
      return;
    }
#endif
    backend = Backend::kScalar;
    table = &scalar_table();
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
  if (b == Backend::kScalar) return true;
  return detect_avx2();
}

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument("requested kernel backend not supported");
  }
  Dispatch& d = dispatch();
  d.backend = b;
#if defined(M4D_HAVE_AVX2_TU)
  d.table = (b == Backend::kAvx2) ? &avx2_table() : &scalar_table();
#else
  d.table = &scalar_table();
#endif
}

void point_triangle_dist_sq(const double* px, const double* py,
                            const double* pz, size_t n, const double tri[9],
                            double* out) {
  dispatch().table->point_triangle_dist_sq(px, py, pz, n, tri, out);
}

void nearest_triangle(double qx, double qy, double qz, const TriangleSoa& tris,
                      size_t* best_index, double* best_dist_sq) {
  dispatch().table->nearest_triangle(qx, qy, qz, tris, best_index,
                                     best_dist_sq);
}

void nearest_point(double qx, double qy, double qz, const double* px,
                   const double* py, const double* pz, size_t n,
                   size_t* best_index, double* best_dist_sq) {
  dispatch().table->nearest_point(qx, qy, qz, px, py, pz, n, best_index,
                                  best_dist_sq);
}

size_t count_in_capsule(const double* px, const double* py, const double* pz,
                        size_t n, const double seg_a[3], const double seg_b[3],
                        double radius, uint8_t* hit_mask) {
  return dispatch().table->count_in_capsule(px, py, pz, n, seg_a, seg_b,
                                            radius, hit_mask);
}

void adam_step(double* x, double* m, double* v, const double* g, size_t n,
               double lr, double beta1, double beta2, double eps, double bc1,
               double bc2) {
  dispatch().table->adam_step(x, m, v, g, n, lr, beta1, beta2, eps, bc1, bc2);
}

void linear_forward(const float* x, size_t rows, size_t in_dim,
                    const float* w, const float* b, size_t out_dim,
                    float* y) {
  dispatch().table->linear_forward(x, rows, in_dim, w, b, out_dim, y);
}

void linear_backward_input(const float* dy, size_t rows, size_t out_dim,
                           const float* w, size_t in_dim, float* dx) {
  dispatch().table->linear_backward_input(dy, rows, out_dim, w, in_dim, dx);
}

void linear_backward_params(const float* dy, size_t rows, size_t out_dim,
                            const float* x, size_t in_dim, float* dw,
                            float* db) {
  dispatch().table->linear_backward_params(dy, rows, out_dim, x, in_dim, dw,
                                           db);
}

}  // namespace m4d::kern
