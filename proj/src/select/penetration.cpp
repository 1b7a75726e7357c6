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

#include "m4d/select/penetration.hpp"

#include <algorithm>
#include <vector>

#include "m4d/kern/kernels.hpp"

namespace m4d::select {

InteriorVoxels interior_voxels(const geom::SdfGrid& sdf) {
  InteriorVoxels voxels;
  voxels.spacing = sdf.spacing;
  for (std::uint32_t k = 0; k < sdf.dims[2]; ++k) {
    for (std::uint32_t j = 0; j < sdf.dims[1]; ++j) {
      for (std::uint32_t i = 0; i < sdf.dims[0]; ++i) {
        if (sdf.at(i, j, k) < 0.0f) {
          Vec3 p = sdf.node_position(i, j, k);
          voxels.x.push_back(p.x);
          voxels.y.push_back(p.y);
          voxels.z.push_back(p.z);
        }
      }
    }
  }
  return voxels;
}

double penetration_volume(const InteriorVoxels& voxels,
                          const std::vector<body::Capsule>& capsules_a,
                          const std::vector<body::Capsule>& capsules_b,
                          const Vec3& object_rot, const Vec3& object_transl) {
  if (voxels.size() == 0) return 0.0;
  const Mat3 rot = axis_angle_to_matrix(object_rot);
  // Voxel centers stay in the object frame; capsules move there instead,
  // which keeps the point set reusable across frames and candidates.
  std::vector<std::uint8_t> hit(voxels.size(), 0);
  auto run = [&](const std::vector<body::Capsule>& capsules) {
    for (const body::Capsule& c : capsules) {
      Vec3 a = transposed_mul(rot, c.a - object_transl);
      Vec3 b = transposed_mul(rot, c.b - object_transl);
      double seg_a[3] = {a.x, a.y, a.z};
      double seg_b[3] = {b.x, b.y, b.z};
      kern::count_in_capsule(voxels.x.data(), voxels.y.data(), voxels.z.data(),
                             voxels.size(), seg_a, seg_b, c.radius, hit.data());
    }
  };
  run(capsules_a);
  run(capsules_b);
  std::size_t inside = static_cast<std::size_t>(
      std::count(hit.begin(), hit.end(), std::uint8_t{1}));
  return static_cast<double>(inside) * voxels.spacing * voxels.spacing *
         voxels.spacing;
}

double penetration_volume(const std::vector<body::Capsule>& capsules_a,
                          const std::vector<body::Capsule>& capsules_b,
                          const geom::SdfGrid& object_sdf,
                          const Vec3& object_rot, const Vec3& object_transl) {
  return penetration_volume(interior_voxels(object_sdf), capsules_a, capsules_b,
                            object_rot, object_transl);
}

FilterStats filter_candidate(const motion::MotionSequence& seq,
                             const InteriorVoxels& voxels,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b) {
  seq.validate();
  FilterStats stats;
  stats.frames = seq.frames();
  for (std::size_t f = 0; f < seq.frames(); ++f) {
    auto fka = body::forward_kinematics(body_a, seq.agents[0][f]);
    auto fkb = body::forward_kinematics(body_b, seq.agents[1][f]);
    double volume = penetration_volume(
        voxels, body::body_capsules(body_a, fka), body::body_capsules(body_b, fkb),
        seq.object.rotations[f], seq.object.translations[f]);
    stats.max_volume = std::max(stats.max_volume, volume);
    if (volume > kPenetrationVolumeMax) ++stats.flagged_frames;
  }
  stats.flagged_ratio =
      static_cast<double>(stats.flagged_frames) / static_cast<double>(stats.frames);
  stats.keep = stats.flagged_ratio <= kFlaggedRatioMax;
  return stats;
}

FilterStats filter_candidate(const motion::MotionSequence& seq,
                             const geom::SdfGrid& object_sdf,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b) {
  return filter_candidate(seq, interior_voxels(object_sdf), body_a, body_b);
}

}  // namespace m4d::select
