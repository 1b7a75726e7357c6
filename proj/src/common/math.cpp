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

#include "m4d/math.hpp"

namespace m4d {

namespace {

// sin(t)/t and (1-cos(t))/t^2 with series fallbacks below this threshold.
constexpr double kTinyAngle = 1e-7;

void sin_cos_coeffs(double theta, double* a, double* b) {
  if (theta < 1e-4) {
    double t2 = theta * theta;
    *a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    *b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    *a = std::sin(theta) / theta;
    *b = (1.0 - std::cos(theta)) / (theta * theta);
  }
}

}  // namespace

Mat3 axis_angle_to_matrix(const Vec3& aa) {
  double theta = norm(aa);
  double a, b;
  sin_cos_coeffs(theta, &a, &b);
  Mat3 k = skew(aa);
  Mat3 k2 = k * k;
  Mat3 r = Mat3::identity();
  for (int i = 0; i < 9; ++i) r.m[i] += a * k.m[i] + b * k2.m[i];
  return r;
}

Vec3 matrix_to_axis_angle(const Mat3& r) {
  double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  double theta = std::acos(c);
  Vec3 w{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
  if (theta < 1e-8) {
    return w * 0.5;
  }
  if (theta < kPi - 1e-4) {
    return w * (theta / (2.0 * std::sin(theta)));
  }
  // Near pi the skew part vanishes; recover the axis from (R + I) / 2,
  // which approaches the outer product of the axis with itself.
  int k = 0;
  if (r(1, 1) > r(k, k)) k = 1;
  if (r(2, 2) > r(k, k)) k = 2;
  Vec3 u;
  u[k] = std::sqrt(std::max(0.0, (r(k, k) + 1.0) * 0.5));
  double denom = 2.0 * u[k];
  for (int i = 0; i < 3; ++i) {
    if (i == k) continue;
    u[i] = (r(i, k) + r(k, i)) * 0.5 / denom;
  }
  u = normalized(u);
  // Keep the representative whose skew part agrees in sign.
  if (dot(u, w) < 0.0) u = -u;
  return u * theta;
}

Vec3 axis_angle_backward(const Vec3& aa, const Mat3& dl_dr) {
  double theta2 = norm_sq(aa);
  if (theta2 < kTinyAngle * kTinyAngle) {
    // At the origin dR/dv_i approaches the elementary skew generator.
    return {dl_dr(2, 1) - dl_dr(1, 2), dl_dr(0, 2) - dl_dr(2, 0),
            dl_dr(1, 0) - dl_dr(0, 1)};
  }
  Mat3 r = axis_angle_to_matrix(aa);
  Mat3 k = skew(aa);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 ei;
    ei[i] = 1.0;
    Vec3 w = ei - r * ei;  // (I - R) e_i
    Mat3 mi = (k * aa[i] + skew(cross(aa, w))) * (1.0 / theta2) * r;
    g[i] = frobenius_dot(dl_dr, mi);
  }
  return g;
}

Mat3 axis_rotation(const Vec3& axis, double angle) {
  Mat3 k = skew(axis);
  Mat3 k2 = k * k;
  double s = std::sin(angle);
  double c = 1.0 - std::cos(angle);
  Mat3 r = Mat3::identity();
  for (int i = 0; i < 9; ++i) r.m[i] += s * k.m[i] + c * k2.m[i];
  return r;
}

double axis_rotation_backward(const Vec3& axis, double angle,
                              const Mat3& dl_dr) {
  Mat3 k = skew(axis);
  Mat3 k2 = k * k;
  double c = std::cos(angle);
  double s = std::sin(angle);
  Mat3 dr;
  for (int i = 0; i < 9; ++i) dr.m[i] = c * k.m[i] + s * k2.m[i];
  return frobenius_dot(dl_dr, dr);
}

}  // namespace m4d
