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
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "m4d/error.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/retarget/objectives.hpp"
#include "m4d/retarget/retarget.hpp"

namespace m4d::retarget {

namespace {

void check_fit_weight(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ConfigError(std::string("fit weight must be finite and >= 0: ") + name);
  }
}

bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

}  // namespace

void FitWeights::validate() const {
  check_fit_weight(body, "body");
  check_fit_weight(hand, "hand");
  check_fit_weight(j3d, "j3d");
  check_fit_weight(h3d, "h3d");
  check_fit_weight(orientation, "orientation");
  check_fit_weight(smooth, "smooth");
  check_fit_weight(contact, "contact");
}

void FitTargets::validate() const {
  std::size_t n = joint_positions.size();
  if (n == 0) throw ConfigError("fit targets are empty");
  if (joint_orientations.size() != n || fingertips.size() != n) {
    throw ConfigError("fit target streams disagree on frame count");
  }
  for (std::size_t f = 0; f < n; ++f) {
    for (const Vec3& p : joint_positions[f]) {
      if (!finite(p)) throw ConfigError("non-finite joint position target");
    }
    for (const Mat3& r : joint_orientations[f]) {
      for (double m : r.m) {
        if (!std::isfinite(m)) {
          throw ConfigError("non-finite joint orientation target");
        }
      }
    }
    for (const Vec3& p : fingertips[f]) {
      if (!finite(p)) throw ConfigError("non-finite fingertip target");
    }
  }
}

FitObjective::FitObjective(const FitTargets& targets,
                           const body::ArticulatedBody& body, const FitWeights& w)
    : targets_(targets), body_(&body), w_(w), frames_(targets.frames()) {
  targets_.validate();
  gate_.assign(frames_, {});
}

std::vector<double> FitObjective::pack(const std::vector<body::Pose>& poses) {
  std::vector<double> x(poses.size() * kPoseDof);
  for (std::size_t f = 0; f < poses.size(); ++f) {
    pack_pose(poses[f], &x[f * kPoseDof]);
  }
  return x;
}

std::vector<body::Pose> FitObjective::unpack(const std::vector<double>& x) {
  std::size_t n = x.size() / kPoseDof;
  std::vector<body::Pose> poses(n);
  for (std::size_t f = 0; f < n; ++f) {
    poses[f] = unpack_pose(&x[f * kPoseDof]);
  }
  return poses;
}

void FitObjective::refresh(const std::vector<double>& x) {
  for (std::size_t f = 0; f < frames_; ++f) {
    body::Pose pose = unpack_pose(&x[f * kPoseDof]);
    body::FkResult fk = body::forward_kinematics(*body_, pose);
    auto tips = body::fingertip_positions(*body_, fk);
    for (std::size_t t = 0; t < tips.size(); ++t) {
      double d = norm(tips[t] - targets_.fingertips[f][t]);
      gate_[f][t] = d < motion::kContactThreshold ? 1 : 0;
    }
  }
}

double FitObjective::eval(const std::vector<double>& x,
                          std::vector<double>* grad) {
  if (grad) grad->assign(x.size(), 0.0);
  terms_ = {};
  for (std::size_t f = 0; f < frames_; ++f) {
    body::Pose pose = unpack_pose(&x[f * kPoseDof]);
    body::FkResult fk = body::forward_kinematics(*body_, pose);
    std::array<Vec3, body::kJointCount> dl_dpos{};
    std::array<Mat3, body::kJointCount> dl_dorient{};
    std::array<Vec3, 2 * body::kFingertipsPerHand> dl_dtip{};
    bool tips_used = false;

    // Pose-angle regularizer; the hand slot is reserved and stays zero
    // because this body model has no articulated hand joints.
    for (int j = 0; j + 1 < body::kJointCount; ++j) {
      terms_[0] += w_.body * norm_sq(pose.theta[j]);
      if (grad) {
        Vec3 g = 2.0 * w_.body * pose.theta[j];
        (*grad)[f * kPoseDof + 3 * static_cast<std::size_t>(j) + 0] += g.x;
        (*grad)[f * kPoseDof + 3 * static_cast<std::size_t>(j) + 1] += g.y;
        (*grad)[f * kPoseDof + 3 * static_cast<std::size_t>(j) + 2] += g.z;
      }
    }

    for (int j = 0; j < body::kJointCount; ++j) {
      Vec3 e = fk.position[j] - targets_.joint_positions[f][j];
      terms_[2] += w_.j3d * norm_sq(e);
      if (grad) dl_dpos[j] += 2.0 * w_.j3d * e;
    }

    auto tips = body::fingertip_positions(*body_, fk);
    for (std::size_t t = 0; t < tips.size(); ++t) {
      Vec3 e = tips[t] - targets_.fingertips[f][t];
      terms_[3] += w_.h3d * norm_sq(e);
      Vec3 g = 2.0 * w_.h3d * e;
      if (gate_[f][t]) {
        terms_[6] += w_.contact * norm_sq(e);
        g += 2.0 * w_.contact * e;
      }
      if (grad) {
        dl_dtip[t] += g;
        tips_used = true;
      }
    }

    // Local-orientation supervision acts directly on the joint's own
    // axis-angle, bypassing the kinematic chain.
    for (std::size_t i = 0; i < body::kOrientationJoints.size(); ++i) {
      int j = body::kOrientationJoints[i];
      Mat3 diff = fk.local[j] - targets_.joint_orientations[f][i];
      terms_[4] += w_.orientation * frobenius_dot(diff, diff);
      if (grad) {
        Vec3 dtheta =
            axis_angle_backward(pose.theta[j - 1], diff * (2.0 * w_.orientation));
        std::size_t o = f * kPoseDof + 3 * static_cast<std::size_t>(j - 1);
        (*grad)[o + 0] += dtheta.x;
        (*grad)[o + 1] += dtheta.y;
        (*grad)[o + 2] += dtheta.z;
      }
    }

    if (grad) {
      if (tips_used) {
        body::fingertip_backward(*body_, fk, dl_dtip, &dl_dpos, &dl_dorient);
      }
      body::Pose pose_grad = body::fk_backward(*body_, pose, fk, dl_dpos, dl_dorient);
      add_pose_grad(pose_grad, &(*grad)[f * kPoseDof]);
    }
  }

  // First-difference smoothness on the joint angles only.
  std::size_t theta_dims = 3 * (body::kJointCount - 1);
  for (std::size_t f = 1; f < frames_; ++f) {
    for (std::size_t c = 0; c < theta_dims; ++c) {
      double d = x[f * kPoseDof + c] - x[(f - 1) * kPoseDof + c];
      terms_[5] += w_.smooth * d * d;
      if (grad) {
        double g = 2.0 * w_.smooth * d;
        (*grad)[f * kPoseDof + c] += g;
        (*grad)[(f - 1) * kPoseDof + c] -= g;
      }
    }
  }
  double total = 0.0;
  for (double t : terms_) total += t;
  return total;
}

FitResult fit_pose_sequence(const FitTargets& targets,
                            const body::ArticulatedBody& body, const FitWeights& w,
                            const opt::OptimConfig& cfg) {
  w.validate();
  cfg.validate();
  targets.validate();
  FitObjective objective(targets, body, w);
  // Warm start: zero pose with the root placed at the pelvis target.
  std::vector<body::Pose> init(targets.frames());
  for (std::size_t f = 0; f < targets.frames(); ++f) {
    init[f].root_transl = targets.joint_positions[f][body::kPelvis];
  }
  opt::MinimizeResult result =
      minimize_annealed(objective, FitObjective::pack(init), cfg);
  FitResult out;
  out.poses = FitObjective::unpack(result.x);
  out.trace = std::move(result);
  return out;
}

}  // namespace m4d::retarget
