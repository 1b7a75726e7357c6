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

#ifndef M4D_RETARGET_RETARGET_HPP_
#define M4D_RETARGET_RETARGET_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/geom/sdf.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/morph/contact_transfer.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/motion/sequence.hpp"
#include "m4d/opt/optimize.hpp"

namespace m4d::retarget {

// Stage loss weights. Object stage uses the fidelity/spatial/smooth triple;
// the human stage swaps fidelity for the shape-relative and world-relative
// skeleton terms plus the contact attraction.
struct LossWeights {
  double fidelity_rot = 500.0;
  double fidelity_trans = 0.005;
  double spatial = 0.01;
  double smooth = 1.0;
  double shape_relative = 0.1;   // arm joints, parent-relative vectors
  double world_relative = 0.003; // non-arm joints, global positions
  double contact = 1000.0;       // object-frame Chamfer attraction

  void validate() const;  // throws ConfigError on negatives
};

// Skeleton-fitting loss weights (seven-term family).
struct FitWeights {
  double body = 1e-3;
  double hand = 1e-4;  // reserved: this body model has no articulated hands
  double j3d = 1.0;
  double h3d = 2.0;
  double orientation = 0.2;
  double smooth = 20.0;
  double contact = 2.0;

  void validate() const;
};

// Default iteration budgets for the two retargeting stages.
inline constexpr int kObjectStageIterations = 1000;
inline constexpr int kHumanStageIterations = 1500;

// Estimates the target object's track by minimizing fidelity to the source
// track plus ground clearance and acceleration smoothness, warm-started from
// the source track. Track length must be >= 3 (TrackTooShort otherwise).
// target_sdf rides along for interface symmetry with the human stage; the
// heights come from a fixed 500-point surface subsample of target_mesh.
motion::ObjectTrack retarget_object_motion(const motion::ObjectTrack& source,
                                           const geom::SdfGrid& target_sdf,
                                           const geom::TriMesh& target_mesh,
                                           const LossWeights& w,
                                           const opt::OptimConfig& cfg,
                                           opt::MinimizeResult* trace = nullptr);

struct HumanRetargetResult {
  std::array<std::vector<body::Pose>, motion::kAgentCount> agents;
  opt::MinimizeResult trace;
};

// Transfers both agents' motion onto the target track: skeleton fidelity to
// the source poses, object-frame Chamfer attraction of in-contact fingertips
// toward the transferred constraints, ground clearance, and smoothness.
// Throws Error type "EmptyConstraint" when no hand has both a non-empty
// constraint set and a non-empty contact mask.
HumanRetargetResult retarget_human_motion(
    const motion::MotionSequence& source, const motion::ObjectTrack& target_track,
    const morph::ContactConstraint& constraint,
    const motion::ContactMasks& contact_frames, const body::ArticulatedBody& body_a,
    const body::ArticulatedBody& body_b, const LossWeights& w,
    const opt::OptimConfig& cfg);

// The constraint that reproduces a sequence's own contacts: per hand slot,
// the five object-frame fingertip positions at the median in-contact frame.
// Slots whose mask never fires stay empty. Retargeting back onto the source
// object with this constraint and the same masks is the identity transfer.
morph::ContactConstraint source_contact_constraint(
    const motion::MotionSequence& seq, const motion::ContactMasks& masks,
    const body::ArticulatedBody& body_a, const body::ArticulatedBody& body_b);

// Per-frame fitting targets: global joint positions, local orientations of
// the ten orientation joints, and the ten fingertip positions.
struct FitTargets {
  std::vector<std::array<Vec3, body::kJointCount>> joint_positions;
  std::vector<std::array<Mat3, body::kOrientationJoints.size()>> joint_orientations;
  std::vector<std::array<Vec3, 2 * body::kFingertipsPerHand>> fingertips;

  std::size_t frames() const { return joint_positions.size(); }
  void validate() const;  // equal lengths, finite values
};

struct FitResult {
  std::vector<body::Pose> poses;
  opt::MinimizeResult trace;
};

// Fits a pose track to the targets with the seven-term loss. The contact
// term attracts each fingertip to its target only while it is already within
// the shared 5 cm threshold (indicator refreshed per iteration).
FitResult fit_pose_sequence(const FitTargets& targets,
                            const body::ArticulatedBody& body, const FitWeights& w,
                            const opt::OptimConfig& cfg);

}  // namespace m4d::retarget

#endif  // M4D_RETARGET_RETARGET_HPP_
