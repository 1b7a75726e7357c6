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

#include "m4d/motion/contact.hpp"

#include <algorithm>
#include <limits>

#include "m4d/geom/nearest.hpp"
#include "m4d/math.hpp"

namespace m4d::motion {

void ContactMasks::resize(std::size_t n) {
  for (auto& agent : contact) {
    for (auto& hand : agent) {
      hand.assign(n, 0);
    }
  }
}

HandDistances hand_surface_distances(const MotionSequence& seq,
                                     const geom::TriMesh& object,
                                     const body::ArticulatedBody& body_a,
                                     const body::ArticulatedBody& body_b) {
  seq.validate();
  const std::size_t n = seq.frames();
  const geom::MeshSoa soa(object);
  const std::array<const body::ArticulatedBody*, kAgentCount> bodies = {&body_a,
                                                                        &body_b};
  HandDistances out;
  for (auto& agent : out.dist) {
    for (auto& hand : agent) hand.assign(n, std::numeric_limits<double>::infinity());
  }

  for (std::size_t f = 0; f < n; ++f) {
    const Mat3 rot = axis_angle_to_matrix(seq.object.rotations[f]);
    const Vec3& transl = seq.object.translations[f];
    for (int a = 0; a < kAgentCount; ++a) {
      const body::FkResult fk = body::forward_kinematics(*bodies[a], seq.agents[a][f]);
      const auto tips = body::fingertip_positions(*bodies[a], fk);
      for (int h = 0; h < kHandsPerAgent; ++h) {
        double best = std::numeric_limits<double>::infinity();
        for (int t = 0; t < body::kFingertipsPerHand; ++t) {
          const Vec3 world = tips[h * body::kFingertipsPerHand + t];
          const Vec3 local = transposed_mul(rot, world - transl);
          best = std::min(best, geom::nearest_surface_point(object, soa, local).distance);
        }
        out.dist[a][h][f] = best;
      }
    }
  }
  return out;
}

ContactMasks masks_from_distances(const HandDistances& distances, double threshold) {
  ContactMasks masks;
  const std::size_t n = distances.frames();
  masks.resize(n);
  for (int a = 0; a < kAgentCount; ++a) {
    for (int h = 0; h < kHandsPerAgent; ++h) {
      for (std::size_t f = 0; f < n; ++f) {
        masks.contact[a][h][f] = distances.dist[a][h][f] < threshold ? 1 : 0;
      }
    }
  }
  return masks;
}

ContactMasks detect_contacts(const MotionSequence& seq, const geom::TriMesh& object,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b, double threshold) {
  return masks_from_distances(hand_surface_distances(seq, object, body_a, body_b),
                              threshold);
}

ContactInterval contact_interval(const std::vector<std::uint8_t>& mask) {
  ContactInterval interval;
  for (std::size_t f = 0; f < mask.size(); ++f) {
    if (mask[f]) {
      if (interval.first < 0) interval.first = static_cast<std::ptrdiff_t>(f);
      interval.last = static_cast<std::ptrdiff_t>(f);
    }
  }
  return interval;
}

}  // namespace m4d::motion
