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

#ifndef M4D_BODY_BODY_HPP_
#define M4D_BODY_BODY_HPP_

#include <array>
#include <string>
#include <vector>

#include "m4d/math.hpp"

namespace m4d::body {

// 22-joint articulated body. Conventions: +z up, +y forward, +x to the
// body's left; the ground plane is z = 0.
constexpr int kJointCount = 22;
constexpr int kFingertipsPerHand = 5;

enum Joint : int {
  kPelvis = 0,
  kLeftHip,
  kRightHip,
  kSpine1,
  kLeftKnee,
  kRightKnee,
  kSpine2,
  kLeftAnkle,
  kRightAnkle,
  kSpine3,
  kLeftFoot,
  kRightFoot,
  kNeck,
  kLeftCollar,
  kRightCollar,
  kHead,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
};

// Arm chain joints tracked by the strong (source-relative) fidelity term.
constexpr std::array<int, 8> kArmJoints = {
    kLeftCollar, kRightCollar, kLeftShoulder, kRightShoulder,
    kLeftElbow,  kRightElbow,  kLeftWrist,    kRightWrist,
};

// Joints whose local orientation the pose fit supervises directly.
constexpr std::array<int, 10> kOrientationJoints = {
    kLeftHip,    kRightHip,      kSpine1,        kSpine2, kNeck,
    kLeftCollar, kRightCollar,   kLeftShoulder,  kRightShoulder, kHead,
};

struct ArticulatedBody {
  std::array<int, kJointCount> parent;
  std::array<Vec3, kJointCount> offset;  // parent-frame bone vector
  // Radius of the capsule wrapped around the bone ending at each joint.
  std::array<double, kJointCount> capsule_radius;
  std::array<Vec3, kFingertipsPerHand> left_fingertips;   // wrist-local
  std::array<Vec3, kFingertipsPerHand> right_fingertips;  // wrist-local
  std::array<std::string, kJointCount> joint_name;

  // Throws ConfigError when the tree is malformed (bad parent order,
  // nonpositive radii, zero bones).
  void validate() const;
};

ArticulatedBody default_body();
ArticulatedBody load_body(const std::string& path);
void save_body(const ArticulatedBody& body, const std::string& path);

struct Pose {
  // theta[i] is the local axis-angle of joint i + 1; magnitudes < pi.
  std::array<Vec3, kJointCount - 1> theta{};
  Vec3 root_orient;
  Vec3 root_transl;
};

struct FkResult {
  std::array<Vec3, kJointCount> position;
  std::array<Mat3, kJointCount> orient;  // global frames
  std::array<Mat3, kJointCount> local;   // cached local rotations
};

FkResult forward_kinematics(const ArticulatedBody& body, const Pose& pose);

// Left tips at indices 0..4, right tips at 5..9.
std::array<Vec3, 2 * kFingertipsPerHand> fingertip_positions(
    const ArticulatedBody& body, const FkResult& fk);

struct Capsule {
  Vec3 a, b;
  double radius;
};

// One capsule per bone, 21 total.
std::vector<Capsule> body_capsules(const ArticulatedBody& body,
                                   const FkResult& fk);

// Reverse-mode accumulation through the kinematic tree. dl_dpos and
// dl_dorient hold the loss gradients of each joint's global position and
// frame; the returned Pose carries dL/d(theta), dL/d(root orient),
// dL/d(root translation) in the pose layout.
Pose fk_backward(const ArticulatedBody& body, const Pose& pose,
                 const FkResult& fk,
                 const std::array<Vec3, kJointCount>& dl_dpos,
                 const std::array<Mat3, kJointCount>& dl_dorient);

// Accumulates fingertip position gradients into joint gradients, for use
// before fk_backward.
void fingertip_backward(const ArticulatedBody& body, const FkResult& fk,
                        const std::array<Vec3, 2 * kFingertipsPerHand>& dl_dtip,
                        std::array<Vec3, kJointCount>* dl_dpos,
                        std::array<Mat3, kJointCount>* dl_dorient);

}  // namespace m4d::body

#endif  // M4D_BODY_BODY_HPP_
