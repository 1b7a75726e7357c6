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

#ifndef M4D_SELECT_POOL_HPP_
#define M4D_SELECT_POOL_HPP_

#include <string>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/morph/contact_transfer.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/motion/sequence.hpp"

namespace m4d::select {

struct PoolConfig {
  // A hand contributes a region only on frames where it is in contact.
  double contact_threshold = motion::kContactThreshold;
  // Vertex patch radius around each fingertip. The vertices of the triangle
  // nearest each fingertip are always included, so regions stay non-empty on
  // meshes coarser than the radius.
  double region_radius = 0.02;
  // Two candidates are duplicates when their slot-tagged vertex sets overlap
  // at or above this intersection-over-union.
  double dedup_iou = 0.8;

  void validate() const;  // throws ConfigError on non-positive values
};

// Candidates extracted from source sequences on one source mesh, in
// (sequence, frame) order with duplicates removed.
struct CandidatePool {
  std::vector<morph::ContactCandidate> candidates;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
};

// Intersection-over-union of two candidates' regions, with vertices counted
// per hand slot so identical regions on different hands do not overlap.
// Two all-empty candidates have IoU 1.
double candidate_iou(const morph::ContactCandidate& a,
                     const morph::ContactCandidate& b);

// One candidate per frame with any hand in contact: per in-contact hand, the
// union over its fingertips of the nearest triangle's vertices plus all
// vertices within region_radius, in the object frame. A later frame whose
// regions duplicate a kept candidate extends that candidate's frame_range
// instead (same sequence) or is dropped (different sequence).
// ids, when non-empty, must match sequences in length and become source_id.
CandidatePool build_candidate_pool(
    const std::vector<motion::MotionSequence>& sequences,
    const geom::TriMesh& source_mesh, const body::ArticulatedBody& body_a,
    const body::ArticulatedBody& body_b, const PoolConfig& cfg = {},
    const std::vector<std::string>& ids = {});

}  // namespace m4d::select

#endif  // M4D_SELECT_POOL_HPP_
