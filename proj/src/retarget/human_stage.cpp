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
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "m4d/error.hpp"
#include "m4d/retarget/objectives.hpp"
#include "m4d/retarget/retarget.hpp"

namespace m4d::retarget {

namespace {

bool in_arm_set(int joint) {
  for (int a : body::kArmJoints) {
    if (a == joint) return true;
  }
  return false;
}

}  // namespace

HumanStageObjective::HumanStageObjective(
    const motion::MotionSequence& source, const motion::ObjectTrack& target_track,
    const morph::ContactConstraint& constraint,
    const motion::ContactMasks& contact_frames, const body::ArticulatedBody& body_a,
    const body::ArticulatedBody& body_b, const LossWeights& w)
    : bodies_{&body_a, &body_b}, w_(w), frames_(source.frames()) {
  if (target_track.frames() != frames_ || contact_frames.frames() != frames_) {
    throw ConfigError("human retargeting inputs disagree on frame count");
  }
  std::size_t k = 0;
  for (int j = 0; j < body::kJointCount; ++j) {
    if (!in_arm_set(j)) world_joints_[k++] = j;
  }
  arm_ref_.resize(motion::kAgentCount * frames_);
  world_ref_.resize(motion::kAgentCount * frames_);
  for (std::size_t a = 0; a < motion::kAgentCount; ++a) {
    for (std::size_t f = 0; f < frames_; ++f) {
      body::FkResult fk = body::forward_kinematics(*bodies_[a], source.agents[a][f]);
      auto& arm = arm_ref_[a * frames_ + f];
      for (std::size_t i = 0; i < body::kArmJoints.size(); ++i) {
        int j = body::kArmJoints[i];
        arm[i] = fk.position[bodies_[a]->parent[j]] - fk.position[j];
      }
      auto& world = world_ref_[a * frames_ + f];
      for (std::size_t i = 0; i < world_joints_.size(); ++i) {
        world[i] = fk.position[world_joints_[i]];
      }
    }
  }
  obj_rot_.resize(frames_);
  obj_transl_ = target_track.translations;
  for (std::size_t f = 0; f < frames_; ++f) {
    obj_rot_[f] = axis_angle_to_matrix(target_track.rotations[f]);
  }
  for (std::size_t slot = 0; slot < morph::kHandSlots; ++slot) {
    points_[slot] = constraint.hands[slot];
    gate_[slot].assign(frames_, 0);
    if (points_[slot].empty()) continue;
    const auto& mask = contact_frames.contact[slot / 2][slot % 2];
    for (std::size_t f = 0; f < frames_; ++f) gate_[slot][f] = mask[f];
  }
  for (std::size_t slot = 0; slot < morph::kHandSlots; ++slot) {
    assign_[slot].resize(frames_);
    for (auto& a : assign_[slot]) {
      a.tip_to_point.fill(0);
      a.point_to_tip.assign(points_[slot].size(), 0);
    }
  }
  low_joint_.assign(motion::kAgentCount * frames_, 0);
  low_active_.assign(motion::kAgentCount * frames_, 0);
}

bool HumanStageObjective::any_gated() const {
  for (std::size_t slot = 0; slot < morph::kHandSlots; ++slot) {
    for (std::uint8_t g : gate_[slot]) {
      if (g) return true;
    }
  }
  return false;
}

std::vector<double> HumanStageObjective::pack(
    const std::array<std::vector<body::Pose>, motion::kAgentCount>& agents) {
  std::size_t n = agents[0].size();
  std::vector<double> x(motion::kAgentCount * n * kPoseDof);
  for (std::size_t a = 0; a < motion::kAgentCount; ++a) {
    for (std::size_t f = 0; f < n; ++f) {
      pack_pose(agents[a][f], &x[(a * n + f) * kPoseDof]);
    }
  }
  return x;
}

std::array<std::vector<body::Pose>, motion::kAgentCount>
HumanStageObjective::unpack(const std::vector<double>& x) {
  std::size_t n = x.size() / (motion::kAgentCount * kPoseDof);
  std::array<std::vector<body::Pose>, motion::kAgentCount> agents;
  for (std::size_t a = 0; a < motion::kAgentCount; ++a) {
    agents[a].resize(n);
    for (std::size_t f = 0; f < n; ++f) {
      agents[a][f] = unpack_pose(&x[(a * n + f) * kPoseDof]);
    }
  }
  return agents;
}

void HumanStageObjective::refresh(const std::vector<double>& x) {
  for (std::size_t a = 0; a < motion::kAgentCount; ++a) {
    for (std::size_t f = 0; f < frames_; ++f) {
      body::Pose pose = unpack_pose(&x[block(a, f)]);
      body::FkResult fk = body::forward_kinematics(*bodies_[a], pose);
      double best = std::numeric_limits<double>::infinity();
      int best_j = 0;
      for (int j = 0; j < body::kJointCount; ++j) {
        if (fk.position[j].z < best) {
          best = fk.position[j].z;
          best_j = j;
        }
      }
      low_joint_[a * frames_ + f] = best_j;
      low_active_[a * frames_ + f] = best < 0.0 ? 1 : 0;

      bool hand_gated = false;
      for (int h = 0; h < 2; ++h) {
        if (gate_[a * 2 + static_cast<std::size_t>(h)][f]) hand_gated = true;
      }
      if (!hand_gated) continue;
      auto tips = body::fingertip_positions(*bodies_[a], fk);
      for (int h = 0; h < 2; ++h) {
        std::size_t slot = a * 2 + static_cast<std::size_t>(h);
        if (!gate_[slot][f]) continue;
        const auto& pts = points_[slot];
        auto& asg = assign_[slot][f];
        std::array<Vec3, body::kFingertipsPerHand> local;
        for (int t = 0; t < body::kFingertipsPerHand; ++t) {
          Vec3 tip = tips[static_cast<std::size_t>(h * body::kFingertipsPerHand + t)];
          local[t] = transposed_mul(obj_rot_[f], tip - obj_transl_[f]);
          double best_d = std::numeric_limits<double>::infinity();
          int best_c = 0;
          for (std::size_t c = 0; c < pts.size(); ++c) {
            double d = norm_sq(local[t] - pts[c]);
            if (d < best_d) {
              best_d = d;
              best_c = static_cast<int>(c);
            }
          }
          asg.tip_to_point[t] = best_c;
        }
        for (std::size_t c = 0; c < pts.size(); ++c) {
          double best_d = std::numeric_limits<double>::infinity();
          int best_t = 0;
          for (int t = 0; t < body::kFingertipsPerHand; ++t) {
            double d = norm_sq(local[t] - pts[c]);
            if (d < best_d) {
              best_d = d;
              best_t = t;
            }
          }
          asg.point_to_tip[c] = best_t;
        }
      }
    }
  }
}

double HumanStageObjective::eval(const std::vector<double>& x,
                                 std::vector<double>* grad) {
  if (grad) grad->assign(x.size(), 0.0);
  terms_ = {};
  for (std::size_t a = 0; a < motion::kAgentCount; ++a) {
    const body::ArticulatedBody& body = *bodies_[a];
    for (std::size_t f = 0; f < frames_; ++f) {
      body::Pose pose = unpack_pose(&x[block(a, f)]);
      body::FkResult fk = body::forward_kinematics(body, pose);
      std::array<Vec3, body::kJointCount> dl_dpos{};
      std::array<Mat3, body::kJointCount> dl_dorient{};
      std::array<Vec3, 2 * body::kFingertipsPerHand> dl_dtip{};
      bool tips_used = false;

      const auto& arm = arm_ref_[a * frames_ + f];
      for (std::size_t i = 0; i < body::kArmJoints.size(); ++i) {
        int j = body::kArmJoints[i];
        int p = body.parent[j];
        Vec3 e = (fk.position[p] - fk.position[j]) - arm[i];
        terms_[0] += w_.shape_relative * norm_sq(e);
        if (grad) {
          Vec3 g = 2.0 * w_.shape_relative * e;
          dl_dpos[p] += g;
          dl_dpos[j] -= g;
        }
      }
      const auto& world = world_ref_[a * frames_ + f];
      for (std::size_t i = 0; i < world_joints_.size(); ++i) {
        int j = world_joints_[i];
        Vec3 e = fk.position[j] - world[i];
        terms_[1] += w_.world_relative * norm_sq(e);
        if (grad) dl_dpos[j] += 2.0 * w_.world_relative * e;
      }
      if (low_active_[a * frames_ + f]) {
        int j = low_joint_[a * frames_ + f];
        terms_[3] += w_.spatial * (-fk.position[j].z);
        if (grad) dl_dpos[j].z -= w_.spatial;
      }

      bool hand_gated = gate_[a * 2][f] || gate_[a * 2 + 1][f];
      if (hand_gated) {
        auto tips = body::fingertip_positions(body, fk);
        for (int h = 0; h < 2; ++h) {
          std::size_t slot = a * 2 + static_cast<std::size_t>(h);
          if (!gate_[slot][f]) continue;
          const auto& pts = points_[slot];
          const auto& asg = assign_[slot][f];
          std::array<Vec3, body::kFingertipsPerHand> local;
          std::array<Vec3, body::kFingertipsPerHand> dlocal{};
          double inv_t = 1.0 / static_cast<double>(body::kFingertipsPerHand);
          double inv_c = 1.0 / static_cast<double>(pts.size());
          for (int t = 0; t < body::kFingertipsPerHand; ++t) {
            std::size_t ti = static_cast<std::size_t>(h * body::kFingertipsPerHand + t);
            local[t] = transposed_mul(obj_rot_[f], tips[ti] - obj_transl_[f]);
            Vec3 d = local[t] - pts[static_cast<std::size_t>(asg.tip_to_point[t])];
            terms_[2] += w_.contact * inv_t * norm_sq(d);
            dlocal[t] += (2.0 * w_.contact * inv_t) * d;
          }
          for (std::size_t c = 0; c < pts.size(); ++c) {
            int t = asg.point_to_tip[c];
            Vec3 d = local[t] - pts[c];
            terms_[2] += w_.contact * inv_c * norm_sq(d);
            dlocal[t] += (2.0 * w_.contact * inv_c) * d;
          }
          if (grad) {
            for (int t = 0; t < body::kFingertipsPerHand; ++t) {
              std::size_t ti =
                  static_cast<std::size_t>(h * body::kFingertipsPerHand + t);
              dl_dtip[ti] += obj_rot_[f] * dlocal[t];
              tips_used = true;
            }
          }
        }
      }

      if (grad) {
        if (tips_used) {
          body::fingertip_backward(body, fk, dl_dtip, &dl_dpos, &dl_dorient);
        }
        body::Pose pose_grad =
            body::fk_backward(body, pose, fk, dl_dpos, dl_dorient);
        add_pose_grad(pose_grad, &(*grad)[block(a, f)]);
      }
    }
    // Acceleration smoothness across every pose parameter of this agent.
    for (std::size_t c = 0; c < kPoseDof; ++c) {
      terms_[4] += [&] {
        double loss = 0.0;
        for (std::size_t f = 1; f + 1 < frames_; ++f) {
          std::size_t k = block(a, f) + c;
          double acc = 2.0 * x[k] - x[k - kPoseDof] - x[k + kPoseDof];
          loss += w_.smooth * acc * acc;
          if (grad) {
            double g = 2.0 * w_.smooth * acc;
            (*grad)[k] += 2.0 * g;
            (*grad)[k - kPoseDof] -= g;
            (*grad)[k + kPoseDof] -= g;
          }
        }
        return loss;
      }();
    }
  }
  return terms_[0] + terms_[1] + terms_[2] + terms_[3] + terms_[4];
}

morph::ContactConstraint source_contact_constraint(
    const motion::MotionSequence& seq, const motion::ContactMasks& masks,
    const body::ArticulatedBody& body_a, const body::ArticulatedBody& body_b) {
  if (masks.frames() != seq.frames()) {
    throw ConfigError("contact masks disagree with the sequence frame count");
  }
  const body::ArticulatedBody* bodies[2] = {&body_a, &body_b};
  morph::ContactConstraint out;
  for (int a = 0; a < motion::kAgentCount; ++a) {
    for (int h = 0; h < motion::kHandsPerAgent; ++h) {
      std::vector<std::size_t> frames;
      const auto& mask = masks.contact[a][h];
      for (std::size_t f = 0; f < mask.size(); ++f) {
        if (mask[f]) frames.push_back(f);
      }
      if (frames.empty()) continue;
      // The median in-contact frame is always itself in contact, which a
      // midpoint of the first/last interval would not guarantee.
      std::size_t f = frames[frames.size() / 2];
      body::FkResult fk = body::forward_kinematics(*bodies[a], seq.agents[a][f]);
      auto tips = body::fingertip_positions(*bodies[a], fk);
      Mat3 rot = axis_angle_to_matrix(seq.object.rotations[f]);
      const Vec3& transl = seq.object.translations[f];
      auto& points = out.hands[a * motion::kHandsPerAgent + h];
      for (int t = 0; t < body::kFingertipsPerHand; ++t) {
        points.push_back(
            transposed_mul(rot, tips[h * body::kFingertipsPerHand + t] - transl));
      }
    }
  }
  return out;
}

HumanRetargetResult retarget_human_motion(
    const motion::MotionSequence& source, const motion::ObjectTrack& target_track,
    const morph::ContactConstraint& constraint,
    const motion::ContactMasks& contact_frames, const body::ArticulatedBody& body_a,
    const body::ArticulatedBody& body_b, const LossWeights& w,
    const opt::OptimConfig& cfg) {
  w.validate();
  cfg.validate();
  source.validate();
  target_track.validate();
  if (constraint.all_empty()) {
    throw Error(ErrorCategory::kConfig, "EmptyConstraint",
                "contact constraint has no points for any hand");
  }
  HumanStageObjective objective(source, target_track, constraint, contact_frames,
                                body_a, body_b, w);
  opt::MinimizeResult result =
      minimize_annealed(objective, HumanStageObjective::pack(source.agents), cfg);
  HumanRetargetResult out;
  out.agents = HumanStageObjective::unpack(result.x);
  out.trace = std::move(result);
  return out;
}

}  // namespace m4d::retarget
