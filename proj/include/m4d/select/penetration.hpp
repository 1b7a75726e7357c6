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

#ifndef M4D_SELECT_PENETRATION_HPP_
#define M4D_SELECT_PENETRATION_HPP_

#include <cstddef>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/geom/sdf.hpp"
#include "m4d/math.hpp"
#include "m4d/motion/sequence.hpp"

namespace m4d::select {

// A frame is a penetration case when its volume exceeds this many cubic
// meters; a candidate is discarded when more than this share of frames is
// flagged.
inline constexpr double kPenetrationVolumeMax = 1e-4;
inline constexpr double kFlaggedRatioMax = 0.025;

// Object-interior voxel centers (grid nodes with negative signed distance)
// in the object frame, laid out for the capsule containment kernel. One cell
// of spacing^3 is attributed to each node.
struct InteriorVoxels {
  std::vector<double> x, y, z;
  double spacing = 0.0;

  std::size_t size() const { return x.size(); }
};

InteriorVoxels interior_voxels(const geom::SdfGrid& sdf);

// Penetration volume at one frame: interior voxels of the pose-transformed
// object whose centers lie inside any capsule, times the voxel volume.
// Capsules are world-frame; the object pose maps object frame to world.
double penetration_volume(const InteriorVoxels& voxels,
                          const std::vector<body::Capsule>& capsules_a,
                          const std::vector<body::Capsule>& capsules_b,
                          const Vec3& object_rot, const Vec3& object_transl);

// Convenience wrapper that extracts the interior voxels per call.
double penetration_volume(const std::vector<body::Capsule>& capsules_a,
                          const std::vector<body::Capsule>& capsules_b,
                          const geom::SdfGrid& object_sdf,
                          const Vec3& object_rot, const Vec3& object_transl);

struct FilterStats {
  bool keep = true;
  double flagged_ratio = 0.0;
  std::size_t flagged_frames = 0;
  std::size_t frames = 0;
  double max_volume = 0.0;
};

// Runs the per-frame volume over a full sequence against the given object
// grid and applies both thresholds.
FilterStats filter_candidate(const motion::MotionSequence& seq,
                             const geom::SdfGrid& object_sdf,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b);

// Same, reusing extracted voxels across candidates that share one object.
FilterStats filter_candidate(const motion::MotionSequence& seq,
                             const InteriorVoxels& voxels,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b);

}  // namespace m4d::select

#endif  // M4D_SELECT_PENETRATION_HPP_
