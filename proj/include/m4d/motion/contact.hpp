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

#ifndef M4D_MOTION_CONTACT_HPP_
#define M4D_MOTION_CONTACT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/motion/sequence.hpp"

namespace m4d::motion {

// Shared hand-to-surface contact threshold in meters. Comparisons are strict:
// a hand at exactly the threshold is not in contact.
inline constexpr double kContactThreshold = 0.05;

inline constexpr int kHandsPerAgent = 2;  // 0 = left, 1 = right

// Per-frame boolean contact state for every agent hand.
struct ContactMasks {
  std::array<std::array<std::vector<std::uint8_t>, kHandsPerAgent>, kAgentCount>
      contact;

  std::size_t frames() const { return contact[0][0].size(); }
  void resize(std::size_t n);
  bool operator==(const ContactMasks& other) const { return contact == other.contact; }
};

// Min fingertip-to-surface distance per agent hand per frame, measured in the
// object frame of the sequence's object track.
struct HandDistances {
  std::array<std::array<std::vector<double>, kHandsPerAgent>, kAgentCount> dist;

  std::size_t frames() const { return dist[0][0].size(); }
};

HandDistances hand_surface_distances(const MotionSequence& seq,
                                     const geom::TriMesh& object,
                                     const body::ArticulatedBody& body_a,
                                     const body::ArticulatedBody& body_b);

// Thresholded contact detection: contact iff the hand's nearest fingertip is
// strictly closer than threshold to the object surface.
ContactMasks detect_contacts(const MotionSequence& seq,
                             const geom::TriMesh& object,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b,
                             double threshold = kContactThreshold);

ContactMasks masks_from_distances(const HandDistances& distances, double threshold);

// First and last frame with mask true, or {-1, -1} when the mask is empty.
struct ContactInterval {
  std::ptrdiff_t first = -1;
  std::ptrdiff_t last = -1;

  bool any() const { return first >= 0; }
};

ContactInterval contact_interval(const std::vector<std::uint8_t>& mask);

}  // namespace m4d::motion

#endif  // M4D_MOTION_CONTACT_HPP_
