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

#include "m4d/body/body.hpp"

namespace m4d::body {

FkResult forward_kinematics(const ArticulatedBody& body, const Pose& pose) {
  FkResult fk;
  fk.local[0] = axis_angle_to_matrix(pose.root_orient);
  fk.orient[0] = fk.local[0];
  fk.position[0] = pose.root_transl;
  for (int j = 1; j < kJointCount; ++j) {
    int p = body.parent[j];
    fk.local[j] = axis_angle_to_matrix(pose.theta[j - 1]);
    fk.position[j] = fk.position[p] + fk.orient[p] * body.offset[j];
    fk.orient[j] = fk.orient[p] * fk.local[j];
  }
  return fk;
}

std::array<Vec3, 2 * kFingertipsPerHand> fingertip_positions(
    const ArticulatedBody& body, const FkResult& fk) {
  std::array<Vec3, 2 * kFingertipsPerHand> tips;
  for (int t = 0; t < kFingertipsPerHand; ++t) {
    tips[t] = fk.position[kLeftWrist] +
              fk.orient[kLeftWrist] * body.left_fingertips[t];
    tips[kFingertipsPerHand + t] =
        fk.position[kRightWrist] +
        fk.orient[kRightWrist] * body.right_fingertips[t];
  }
  return tips;
}

std::vector<Capsule> body_capsules(const ArticulatedBody& body,
                                   const FkResult& fk) {
  std::vector<Capsule> caps;
  caps.reserve(kJointCount - 1);
  for (int j = 1; j < kJointCount; ++j) {
    caps.push_back(
        {fk.position[body.parent[j]], fk.position[j], body.capsule_radius[j]});
  }
  return caps;
}

Pose fk_backward(const ArticulatedBody& body, const Pose& pose,
                 const FkResult& fk,
                 const std::array<Vec3, kJointCount>& dl_dpos,
                 const std::array<Mat3, kJointCount>& dl_dorient) {
  std::array<Vec3, kJointCount> gp = dl_dpos;
  std::array<Mat3, kJointCount> gf = dl_dorient;
  Pose grad;
  // Children accumulate into parents, so walk the tree leaf-to-root.
  for (int j = kJointCount - 1; j >= 1; --j) {
    int p = body.parent[j];
    // position[j] = position[p] + orient[p] * offset[j]
    gp[p] += gp[j];
    gf[p] += outer(gp[j], body.offset[j]);
    // orient[j] = orient[p] * local[j]
    gf[p] += gf[j] * fk.local[j].transposed();
    Mat3 dlocal = fk.orient[p].transposed() * gf[j];
    grad.theta[j - 1] = axis_angle_backward(pose.theta[j - 1], dlocal);
  }
  grad.root_orient = axis_angle_backward(pose.root_orient, gf[0]);
  grad.root_transl = gp[0];
  return grad;
}

void fingertip_backward(const ArticulatedBody& body, const FkResult& fk,
                        const std::array<Vec3, 2 * kFingertipsPerHand>& dl_dtip,
                        std::array<Vec3, kJointCount>* dl_dpos,
                        std::array<Mat3, kJointCount>* dl_dorient) {
  (void)fk;
  for (int t = 0; t < kFingertipsPerHand; ++t) {
    // tip = position[wrist] + orient[wrist] * local_offset
    (*dl_dpos)[kLeftWrist] += dl_dtip[t];
    (*dl_dorient)[kLeftWrist] += outer(dl_dtip[t], body.left_fingertips[t]);
    const Vec3& gr = dl_dtip[kFingertipsPerHand + t];
    (*dl_dpos)[kRightWrist] += gr;
    (*dl_dorient)[kRightWrist] += outer(gr, body.right_fingertips[t]);
  }
}

}  // namespace m4d::body
