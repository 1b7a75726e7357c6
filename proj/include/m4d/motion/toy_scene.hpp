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

#ifndef M4D_MOTION_TOY_SCENE_HPP_
#define M4D_MOTION_TOY_SCENE_HPP_

#include <cstdint>
#include <string>

#include "m4d/body/body.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/motion/sequence.hpp"

namespace m4d::motion {

enum class ToyKind { kCarry, kHandover };

ToyKind toy_kind_from_string(const std::string& name);  // "carry" | "handover"

// Scripted two-agent scene plus the contact schedule it was built from.
struct ToyScene {
  MotionSequence sequence;
  ContactMasks scripted_contact;
  // Object translation spline endpoints; the object track starts and ends at
  // exactly these points.
  Vec3 spline_start;
  Vec3 spline_end;
};

// Deterministic scripted interaction: the object glides along a smooth spline
// at carrying height while agents standing on the ground (z = 0) grip it
// through two-bone arm IK. Fingertips stay within the contact threshold of
// the object surface on every scripted contact frame and retract well beyond
// it otherwise.
//   carry:    both agents hold the object for the whole clip (label move2).
//   handover: agent 0 hands the object to agent 1 mid-clip with at least one
//             frame of joint contact (label pass).
// Requires frames >= 10. The same inputs always produce the same scene.
ToyScene generate_toy_scene(ToyKind kind, std::size_t frames,
                            const geom::TriMesh& object,
                            const body::ArticulatedBody& body, std::uint64_t seed);

}  // namespace m4d::motion

#endif  // M4D_MOTION_TOY_SCENE_HPP_
