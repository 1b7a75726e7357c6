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

#include "m4d/select/pool.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "m4d/error.hpp"
#include "m4d/geom/nearest.hpp"

namespace m4d::select {

void PoolConfig::validate() const {
  if (contact_threshold <= 0.0 || region_radius <= 0.0) {
    throw ConfigError("pool thresholds must be positive");
  }
  if (dedup_iou <= 0.0 || dedup_iou > 1.0) {
    throw ConfigError("dedup_iou must be in (0, 1]");
  }
}

double candidate_iou(const morph::ContactCandidate& a,
                     const morph::ContactCandidate& b) {
  std::size_t inter = 0, uni = 0;
  std::vector<std::uint32_t> merged;
  for (int slot = 0; slot < morph::kHandSlots; ++slot) {
    const auto& sa = a.hands[slot];
    const auto& sb = b.hands[slot];
    merged.clear();
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                          std::back_inserter(merged));
    inter += merged.size();
    uni += sa.size() + sb.size() - merged.size();
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// Region of one hand at one frame: per fingertip, the nearest triangle's
// vertices plus every vertex within the radius, all in the object frame.
std::vector<std::uint32_t> hand_region(const geom::TriMesh& mesh,
                                       const geom::MeshSoa& soa,
                                       const Vec3* tips, const Mat3& rot,
                                       const Vec3& transl, double radius) {
  std::vector<std::uint32_t> region;
  const double r2 = radius * radius;
  for (int t = 0; t < body::kFingertipsPerHand; ++t) {
    Vec3 p = transposed_mul(rot, tips[t] - transl);
    geom::SurfaceHit hit = geom::nearest_surface_point(mesh, soa, p);
    for (std::uint32_t v : mesh.faces[hit.face]) region.push_back(v);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (norm_sq(mesh.vertices[v] - p) < r2) {
        region.push_back(static_cast<std::uint32_t>(v));
      }
    }
  }
  std::sort(region.begin(), region.end());
  region.erase(std::unique(region.begin(), region.end()), region.end());
  return region;
}

}  // namespace

CandidatePool build_candidate_pool(
    const std::vector<motion::MotionSequence>& sequences,
    const geom::TriMesh& source_mesh, const body::ArticulatedBody& body_a,
    const body::ArticulatedBody& body_b, const PoolConfig& cfg,
    const std::vector<std::string>& ids) {
  cfg.validate();
  if (!ids.empty() && ids.size() != sequences.size()) {
    throw ConfigError("ids must be empty or match the sequence count");
  }
  const geom::MeshSoa soa(source_mesh);
  CandidatePool pool;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const motion::MotionSequence& seq = sequences[s];
    const std::string id = ids.empty() ? "seq" + std::to_string(s) : ids[s];
    motion::ContactMasks masks = motion::detect_contacts(
        seq, source_mesh, body_a, body_b, cfg.contact_threshold);
    for (std::size_t f = 0; f < seq.frames(); ++f) {
      bool any = false;
      for (int agent = 0; agent < motion::kAgentCount; ++agent) {
        for (int hand = 0; hand < motion::kHandsPerAgent; ++hand) {
          any = any || masks.contact[agent][hand][f] != 0;
        }
      }
      if (!any) continue;

      const Mat3 rot = axis_angle_to_matrix(seq.object.rotations[f]);
      const Vec3& transl = seq.object.translations[f];
      morph::ContactCandidate cand;
      cand.source_id = id;
      cand.frame_range = {static_cast<std::int64_t>(f),
                          static_cast<std::int64_t>(f)};
      for (int agent = 0; agent < motion::kAgentCount; ++agent) {
        const body::ArticulatedBody& body = agent == 0 ? body_a : body_b;
        auto fk = body::forward_kinematics(body, seq.agents[agent][f]);
        auto tips = body::fingertip_positions(body, fk);
        for (int hand = 0; hand < motion::kHandsPerAgent; ++hand) {
          if (!masks.contact[agent][hand][f]) continue;
          int slot = agent * motion::kHandsPerAgent + hand;
          cand.hands[slot] =
              hand_region(source_mesh, soa, &tips[hand * body::kFingertipsPerHand],
                          rot, transl, cfg.region_radius);
        }
      }

      bool duplicate = false;
      for (morph::ContactCandidate& kept : pool.candidates) {
        if (candidate_iou(cand, kept) >= cfg.dedup_iou) {
          if (kept.source_id == id) {
            kept.frame_range[1] = static_cast<std::int64_t>(f);
          }
          duplicate = true;
          break;
        }
      }
      if (!duplicate) pool.candidates.push_back(std::move(cand));
    }
  }
  return pool;
}

}  // namespace m4d::select
