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

#include "m4d/motion/toy_scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "m4d/error.hpp"
#include "m4d/math.hpp"
#include "m4d/rng.hpp"

namespace m4d::motion {

namespace {

// C2-smooth ease with zero velocity and acceleration at both ends.
double smoothstep5(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (u * (u * 6.0 - 15.0) + 10.0);
}

// Shortest-arc rotation between unit vectors; smooth away from antipodal.
Mat3 minimal_rotation(const Vec3& from, const Vec3& to) {
  const Vec3 axis = cross(from, to);
  const double s = norm(axis);
  const double c = dot(from, to);
  if (s < 1e-12) {
    if (c > 0.0) return Mat3::identity();
    Vec3 ortho = std::abs(from.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    ortho = normalized(ortho - from * dot(ortho, from));
    return axis_rotation(ortho, kPi);
  }
  return axis_rotation(axis * (1.0 / s), std::atan2(s, c));
}

struct ArmAngles {
  Vec3 shoulder;
  Vec3 elbow;
};

// Two-bone solve that lands the mean fingertip on `target`. bone1 is the
// rest-pose upper-arm vector and bone2 the rest-pose elbow-to-mean-fingertip
// vector, both parent-local. Local rotations are shortest-arc maps computed
// in their own parent frames, which keeps the axis-angle tracks smooth and
// their magnitudes clear of pi.
ArmAngles solve_arm(const Vec3& shoulder_world, const Vec3& target,
                    const Mat3& parent_orient, const Vec3& bone1,
                    const Vec3& bone2) {
  const double upper_len = norm(bone1);
  const double distal_len = norm(bone2);
  const Vec3 to_target = target - shoulder_world;
  double d = norm(to_target);
  const double d_max = (upper_len + distal_len) * 0.995;
  const double d_min = std::abs(upper_len - distal_len) * 1.05 + 1e-6;
  d = std::clamp(d, d_min, d_max);
  const Vec3 dir = normalized(to_target);

  // Shoulder opening from the law of cosines, elbow dropped toward the pole.
  const double cos_a =
      std::clamp((upper_len * upper_len + d * d - distal_len * distal_len) /
                     (2.0 * upper_len * d),
                 -1.0, 1.0);
  const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));

  Vec3 pole = Vec3{0.0, 0.0, -1.0} - dir * dot(Vec3{0.0, 0.0, -1.0}, dir);
  const double pole_len = norm(pole);
  pole = pole_len < 1e-8 ? Vec3{0.0, -1.0, 0.0} : pole * (1.0 / pole_len);

  const Vec3 a1 = dir * cos_a + pole * sin_a;
  const Vec3 reach_end = shoulder_world + dir * d;
  const Vec3 elbow_world = shoulder_world + a1 * upper_len;
  const Vec3 a2 = normalized(reach_end - elbow_world);

  const Mat3 local_shoulder =
      minimal_rotation(normalized(bone1), transposed_mul(parent_orient, a1));
  const Mat3 shoulder_global = parent_orient * local_shoulder;
  const Mat3 local_elbow =
      minimal_rotation(normalized(bone2), transposed_mul(shoulder_global, a2));

  ArmAngles out;
  out.shoulder = matrix_to_axis_angle(local_shoulder);
  out.elbow = matrix_to_axis_angle(local_elbow);
  return out;
}

// Mean fingertip offset in the wrist frame, one entry per hand. The toy IK
// keeps the wrist straight, so these extend the forearm bone directly.
std::array<Vec3, kHandsPerAgent> mean_tip_offsets(
    const body::ArticulatedBody& body) {
  std::array<Vec3, kHandsPerAgent> out{};
  for (const Vec3& t : body.left_fingertips) out[0] = out[0] + t;
  for (const Vec3& t : body.right_fingertips) out[1] = out[1] + t;
  out[0] = out[0] * (1.0 / body::kFingertipsPerHand);
  out[1] = out[1] * (1.0 / body::kFingertipsPerHand);
  return out;
}

struct AgentScript {
  double side_sign;     // -1: stands at -y of the object, +1: at +y
  double yaw;           // root yaw about z
  ContactInterval window;
};

}  // namespace

ToyKind toy_kind_from_string(const std::string& name) {
  if (name == "carry") return ToyKind::kCarry;
  if (name == "handover") return ToyKind::kHandover;
  throw ConfigError("unknown toy scene kind \"" + name +
                    "\" (expected carry or handover)");
}

ToyScene generate_toy_scene(ToyKind kind, std::size_t frames,
                            const geom::TriMesh& object,
                            const body::ArticulatedBody& body, std::uint64_t seed) {
  if (frames < 10) {
    throw ConfigError("toy scene needs at least 10 frames, got " +
                      std::to_string(frames));
  }
  body.validate();
  object.check_indices();

  const std::size_t n = frames;
  Rng rng(derive_seed(seed, "toy-scene", 0));

  const Aabb box = object.aabb();
  const Vec3 half = box.extents() * 0.5;
  const Vec3 center_off = box.center();

  // Grasp layout on the two y faces, hands spread along object x.
  const double spread = std::min(0.08, std::max(0.02, half.x * 0.5)) +
                        rng.uniform(-0.005, 0.005);
  const double grasp_z = rng.uniform(-0.01, 0.01);
  const double surface_gap = 0.01;

  const double carry_height = 1.0;
  const double standoff = half.y + 0.37;

  // Object spline endpoints.
  Vec3 start{0.0, 0.0, carry_height};
  Vec3 end{0.0, 0.0, carry_height};
  double yaw_total = 0.0;
  double lift = 0.0;
  if (kind == ToyKind::kCarry) {
    end = Vec3{0.9 + rng.uniform(0.0, 0.2), rng.uniform(-0.05, 0.05), carry_height};
    yaw_total = 0.25 + rng.uniform(0.0, 0.1);
    lift = 0.08 + rng.uniform(0.0, 0.04);
  } else {
    const double a = 0.14 + rng.uniform(0.0, 0.02);
    start = Vec3{0.0, -a, carry_height};
    end = Vec3{0.0, a, carry_height};
  }

  std::array<AgentScript, kAgentCount> script;
  script[0] = {-1.0, 0.0, {0, static_cast<std::ptrdiff_t>(n) - 1}};
  script[1] = {+1.0, kPi, {0, static_cast<std::ptrdiff_t>(n) - 1}};
  if (kind == ToyKind::kHandover) {
    const auto nn = static_cast<double>(n);
    script[0].window = {0, static_cast<std::ptrdiff_t>(std::ceil(0.62 * nn)) - 1};
    script[1].window = {static_cast<std::ptrdiff_t>(std::floor(0.5 * nn)),
                        static_cast<std::ptrdiff_t>(n) - 1};
  }

  ToyScene scene;
  scene.spline_start = start;
  scene.spline_end = end;
  MotionSequence& seq = scene.sequence;
  seq.fps = 15.0;
  seq.object_id = "toy-object";
  seq.label = kind == ToyKind::kCarry ? "move2" : "pass";
  scene.scripted_contact.resize(n);

  const std::array<Vec3, kHandsPerAgent> tip_mean = mean_tip_offsets(body);
  const std::array<Vec3, kHandsPerAgent> bone1 = {
      body.offset[body::kLeftElbow], body.offset[body::kRightElbow]};
  const std::array<Vec3, kHandsPerAgent> bone2 = {
      body.offset[body::kLeftWrist] + tip_mean[0],
      body.offset[body::kRightWrist] + tip_mean[1]};
  const double root_z = 0.92;

  // Shoulder offsets from the root in the unrotated body frame.
  std::array<Vec3, kHandsPerAgent> shoulder_local;
  for (int h = 0; h < kHandsPerAgent; ++h) {
    const int collar = h == 0 ? body::kLeftCollar : body::kRightCollar;
    const int shoulder = h == 0 ? body::kLeftShoulder : body::kRightShoulder;
    Vec3 p = body.offset[shoulder] + body.offset[collar];
    for (int j = body::kSpine3; j >= 0; j = body.parent[j]) p = p + body.offset[j];
    shoulder_local[h] = p;
  }

  std::vector<double> ease(n);
  for (std::size_t f = 0; f < n; ++f) {
    ease[f] = smoothstep5(static_cast<double>(f) / static_cast<double>(n - 1));
  }

  // Object track: lerp between endpoints plus a lift bump that is exactly
  // zero at both ends, yaw ramped with the same ease.
  for (std::size_t f = 0; f < n; ++f) {
    const double s = ease[f];
    Vec3 t = start * (1.0 - s) + end * s;
    t.z += lift * 4.0 * s * (1.0 - s);
    seq.object.translations.push_back(t);
    seq.object.rotations.push_back(Vec3{0.0, 0.0, yaw_total * s});
  }

  const auto grasp_point = [&](const AgentScript& sc, int h) {
    const double hand_sign = h == 0 ? 1.0 : -1.0;
    // Left hand lands on the agent's left of the face it grips.
    const double grasp_x = -sc.side_sign * hand_sign * spread;
    return Vec3{grasp_x + center_off.x,
                sc.side_sign * (half.y + surface_gap) + center_off.y,
                grasp_z + center_off.z};
  };

  for (int a = 0; a < kAgentCount; ++a) {
    const AgentScript& sc = script[a];
    const Mat3 root_rot = axis_angle_to_matrix(Vec3{0.0, 0.0, sc.yaw});

    // Root sticks with the object while the agent is responsible for it and
    // freezes outside its window (handover only).
    std::vector<Vec3> roots(n);
    for (std::size_t f = 0; f < n; ++f) {
      const std::size_t fc =
          std::clamp(static_cast<std::ptrdiff_t>(f), sc.window.first, sc.window.last);
      const Vec3& obj = seq.object.translations[fc];
      roots[f] = Vec3{obj.x, obj.y + sc.side_sign * standoff, root_z};
    }

    // Grip orientation per hand, frozen at the window midpoint: inside the
    // window the whole fingertip fan rides rigidly with the object, the way a
    // real grasp does. The reference solve uses the virtual distal bone.
    const auto f_ref =
        static_cast<std::size_t>((sc.window.first + sc.window.last) / 2);
    std::array<Mat3, kHandsPerAgent> grip;
    {
      body::Pose ref_pose;
      ref_pose.root_orient = Vec3{0.0, 0.0, sc.yaw};
      ref_pose.root_transl = roots[f_ref];
      const Mat3 obj_rot = axis_angle_to_matrix(seq.object.rotations[f_ref]);
      for (int h = 0; h < kHandsPerAgent; ++h) {
        const Vec3 target =
            obj_rot * grasp_point(sc, h) + seq.object.translations[f_ref];
        const Vec3 shoulder_world =
            ref_pose.root_transl + root_rot * shoulder_local[h];
        const ArmAngles arm =
            solve_arm(shoulder_world, target, root_rot, bone1[h], bone2[h]);
        ref_pose.theta[(h == 0 ? body::kLeftShoulder : body::kRightShoulder) - 1] =
            arm.shoulder;
        ref_pose.theta[(h == 0 ? body::kLeftElbow : body::kRightElbow) - 1] =
            arm.elbow;
      }
      const body::FkResult fk_ref = body::forward_kinematics(body, ref_pose);
      for (int h = 0; h < kHandsPerAgent; ++h) {
        const int wrist = h == 0 ? body::kLeftWrist : body::kRightWrist;
        grip[h] = obj_rot.transposed() * fk_ref.orient[wrist];
      }
    }

    for (std::size_t f = 0; f < n; ++f) {
      body::Pose pose;
      pose.root_orient = Vec3{0.0, 0.0, sc.yaw};
      pose.root_transl = roots[f];

      const Mat3 obj_rot = axis_angle_to_matrix(seq.object.rotations[f]);
      const Vec3& obj_t = seq.object.translations[f];

      const bool in_window = static_cast<std::ptrdiff_t>(f) >= sc.window.first &&
                             static_cast<std::ptrdiff_t>(f) <= sc.window.last;
      const auto gap = static_cast<double>(
          in_window ? 0
                    : std::min(std::abs(static_cast<std::ptrdiff_t>(f) - sc.window.first),
                               std::abs(static_cast<std::ptrdiff_t>(f) - sc.window.last)));
      // Blend toward the rest pose right outside the window; one frame out is
      // already a third of the way back, clearing the contact threshold.
      const double rest_blend = std::min(1.0, gap / 3.0);

      for (int h = 0; h < kHandsPerAgent; ++h) {
        const Vec3 target = obj_rot * grasp_point(sc, h) + obj_t;
        const Vec3 shoulder_world = pose.root_transl + root_rot * shoulder_local[h];

        const int sh_idx = (h == 0 ? body::kLeftShoulder : body::kRightShoulder) - 1;
        const int el_idx = (h == 0 ? body::kLeftElbow : body::kRightElbow) - 1;
        const int wrist = h == 0 ? body::kLeftWrist : body::kRightWrist;

        if (in_window) {
          // Place the wrist so the mean fingertip stays on the grasp point
          // under the frozen grip orientation, then roll the wrist joint to
          // realize that orientation exactly.
          const Mat3 wrist_rot = obj_rot * grip[h];
          const Vec3 wrist_target = target - wrist_rot * tip_mean[h];
          const ArmAngles arm = solve_arm(shoulder_world, wrist_target, root_rot,
                                          bone1[h], body.offset[wrist]);
          pose.theta[sh_idx] = arm.shoulder;
          pose.theta[el_idx] = arm.elbow;
          const Mat3 elbow_global = root_rot * axis_angle_to_matrix(arm.shoulder) *
                                    axis_angle_to_matrix(arm.elbow);
          pose.theta[wrist - 1] =
              matrix_to_axis_angle(elbow_global.transposed() * wrist_rot);
          scene.scripted_contact.contact[a][h][f] = 1;
        } else {
          const ArmAngles arm =
              solve_arm(shoulder_world, target, root_rot, bone1[h], bone2[h]);
          pose.theta[sh_idx] = arm.shoulder * (1.0 - rest_blend);
          pose.theta[el_idx] = arm.elbow * (1.0 - rest_blend);
        }
      }
      seq.agents[a].push_back(pose);
    }
  }

  seq.validate();
  return scene;
}

}  // namespace m4d::motion
