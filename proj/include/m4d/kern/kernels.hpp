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

#ifndef M4D_KERN_KERNELS_HPP_
#define M4D_KERN_KERNELS_HPP_

#include <cstddef>
#include <cstdint>

namespace m4d::kern {

// Hot inner loops ship in two variants: a scalar reference and an AVX2+FMA
// build of the same arithmetic. The active variant is chosen once at load
// time from CPU feature flags; set_backend overrides it for equivalence
// tests. All variants agree to floating-point tolerance, not bit-for-bit,
// because vectorized reductions reassociate.
enum class Backend { kScalar = 0, kAvx2 = 1 };

Backend active_backend();
bool backend_supported(Backend b);
// Throws std::invalid_argument if the requested backend is unsupported.
void set_backend(Backend b);

// Triangle corners packed structure-of-arrays: ax[i], ay[i], az[i], bx[i]...
struct TriangleSoa {
  const double* ax;
  const double* ay;
  const double* az;
  const double* bx;
  const double* by;
  const double* bz;
  const double* cx;
  const double* cy;
  const double* cz;
  size_t count;
};

// Squared distance from each point to one triangle.
void point_triangle_dist_sq(const double* px, const double* py,
                            const double* pz, size_t n, const double tri[9],
                            double* out);

// Nearest triangle of a set to one query point; ties resolve to the lowest
// index. Returns squared distance.
void nearest_triangle(double qx, double qy, double qz, const TriangleSoa& tris,
                      size_t* best_index, double* best_dist_sq);

// Nearest point of a SoA point set to one query; ties resolve to the lowest
// index.
void nearest_point(double qx, double qy, double qz, const double* px,
                   const double* py, const double* pz, size_t n,
                   size_t* best_index, double* best_dist_sq);

// Counts points with squared distance to the segment [a, b] below r^2.
// Used for capsule containment over voxel centers.
size_t count_in_capsule(const double* px, const double* py, const double* pz,
                        size_t n, const double seg_a[3], const double seg_b[3],
                        double radius, uint8_t* hit_mask);

// One Adam update. bc1/bc2 are the bias-correction denominators
// (1 - beta^t) for the current step.
void adam_step(double* x, double* m, double* v, const double* g, size_t n,
               double lr, double beta1, double beta2, double eps, double bc1,
               double bc2);

// Dense layers operate on row-major f32 buffers. W is [out_dim, in_dim].
// y = x * W^T + b, for `rows` rows.
void linear_forward(const float* x, size_t rows, size_t in_dim,
                    const float* w, const float* b, size_t out_dim, float* y);

// dx = dy * W
void linear_backward_input(const float* dy, size_t rows, size_t out_dim,
                           const float* w, size_t in_dim, float* dx);

// dW += dy^T * x, db += column sums of dy. Buffers must be zeroed by the
// caller when accumulation across batches is not wanted.
void linear_backward_params(const float* dy, size_t rows, size_t out_dim,
                            const float* x, size_t in_dim, float* dw,
                            float* db);

// Kernel table; each entry has scalar and AVX2 implementations.
struct KernelTable {
  void (*point_triangle_dist_sq)(const double*, const double*, const double*,
                                 size_t, const double[9], double*);
  void (*nearest_triangle)(double, double, double, const TriangleSoa&,
                           size_t*, double*);
  void (*nearest_point)(double, double, double, const double*, const double*,
                        const double*, size_t, size_t*, double*);
  size_t (*count_in_capsule)(const double*, const double*, const double*,
                             size_t, const double[3], const double[3], double,
                             uint8_t*);
  void (*adam_step)(double*, double*, double*, const double*, size_t, double,
                    double, double, double, double, double);
  void (*linear_forward)(const float*, size_t, size_t, const float*,
                         const float*, size_t, float*);
  void (*linear_backward_input)(const float*, size_t, size_t, const float*,
                                size_t, float*);
  void (*linear_backward_params)(const float*, size_t, size_t, const float*,
                                 size_t, float*, float*);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif

}  // namespace m4d::kern

#endif  // M4D_KERN_KERNELS_HPP_
