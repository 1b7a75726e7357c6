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

#ifndef M4D_MORPH_CONTACT_TRANSFER_HPP_
#define M4D_MORPH_CONTACT_TRANSFER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "m4d/math.hpp"
#include "m4d/morph/morph.hpp"

namespace m4d::morph {

inline constexpr int kHandSlots = 4;  // agent0-left, agent0-right, agent1-left, agent1-right

// Contact regions as vertex-index sets on the morph chain's source mesh
// (steps.front()). A hand's set may be empty when that hand never touches.
struct ContactCandidate {
  std::array<std::vector<std::uint32_t>, kHandSlots> hands;
  std::string source_id;                       // provenance: source sequence
  std::array<std::int64_t, 2> frame_range{0, -1};  // provenance: inclusive frames

  bool all_empty() const;
  // Throws ConfigError when an index is out of range for the given mesh.
  void check_indices(const geom::TriMesh& source_mesh) const;
};

// Transferred per-point contact targets on the target surface, object frame,
// same hand ordering as the candidate they came from.
struct ContactConstraint {
  std::array<std::vector<Vec3>, kHandSlots> hands;

  bool all_empty() const;
};

// Walks every candidate point through the chain: position on steps[0], then
// nearest surface point on each subsequent mesh in order. Per-point identity
// is preserved (no merging). Throws Error type "EmptyCandidate" when all four
// sets are empty.
ContactConstraint transfer_contacts(const ContactCandidate& cand,
                                    const MorphSequence& morph);

// JSON serialization: candidates as {"hands":[[idx...]x4]}, constraints as
// {"hands":[[[x,y,z]...]x4]}; candidate provenance rides alongside.
void save_contact_candidate(const ContactCandidate& cand, const std::string& path);
ContactCandidate load_contact_candidate(const std::string& path);
void save_contact_constraint(const ContactConstraint& constraint,
                             const std::string& path);
ContactConstraint load_contact_constraint(const std::string& path);

}  // namespace m4d::morph

#endif  // M4D_MORPH_CONTACT_TRANSFER_HPP_
