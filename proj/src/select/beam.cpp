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

#include "m4d/select/beam.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>
#include <utility>

#include "m4d/error.hpp"

namespace m4d::select {

void BeamConfig::validate() const {
  if (beam_width < 1 || iterations < 1 || initial_samples < 1 || jobs < 1) {
    throw ConfigError("beam sizes must be positive");
  }
  weights.validate();
  human_cfg.validate();
}

namespace {

using Region = std::vector<std::uint32_t>;
using RegionKey = std::array<Region, morph::kHandSlots>;

// Undirected vertex adjacency, each list sorted.
std::vector<Region> vertex_adjacency(const geom::TriMesh& mesh) {
  std::vector<Region> adj(mesh.vertices.size());
  for (const auto& face : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      std::uint32_t u = face[e];
      std::uint32_t v = face[(e + 1) % 3];
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  }
  for (Region& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

Region dilate_region(const Region& region, const std::vector<Region>& adj) {
  Region out = region;
  for (std::uint32_t v : region) {
    out.insert(out.end(), adj[v].begin(), adj[v].end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Region contract_region(const Region& region, const std::vector<Region>& adj) {
  Region out;
  for (std::uint32_t v : region) {
    bool interior = true;
    for (std::uint32_t n : adj[v]) {
      if (!std::binary_search(region.begin(), region.end(), n)) {
        interior = false;
        break;
      }
    }
    if (interior) out.push_back(v);
  }
  return out;
}

struct Evaluation {
  morph::ContactCandidate candidate;
  morph::ContactConstraint constraint;
  motion::MotionSequence motion;
  double score = 0.0;
  FilterStats filter;
  CandidateRecord record;
};

struct Pending {
  morph::ContactCandidate candidate;
  std::string origin;
  int pool_index = -1;
};

// A candidate is worth retargeting only when some hand has both a contact
// region and at least one in-contact frame; the human stage requires it.
bool usable(const morph::ContactCandidate& cand,
            const std::array<bool, morph::kHandSlots>& mask_any) {
  for (int slot = 0; slot < morph::kHandSlots; ++slot) {
    if (!cand.hands[slot].empty() && mask_any[slot]) return true;
  }
  return false;
}

}  // namespace

BeamResult beam_search_select(const CandidatePool& pool,
                              const motion::MotionSequence& source,
                              const motion::ContactMasks& source_masks,
                              const morph::MorphSequence& morph,
                              const motion::ObjectTrack& target_track,
                              const disc::RankingModel& model,
                              const body::ArticulatedBody& body_a,
                              const body::ArticulatedBody& body_b,
                              const BeamConfig& cfg) {
  cfg.validate();
  if (pool.empty()) throw ConfigError("candidate pool is empty");
  if (morph.steps.size() < 2) throw ConfigError("morph chain has no target");
  source.validate();
  target_track.validate();
  if (target_track.frames() != source.frames()) {
    throw ConfigError("target track length differs from the source");
  }

  std::array<bool, morph::kHandSlots> mask_any{};
  for (int agent = 0; agent < motion::kAgentCount; ++agent) {
    for (int hand = 0; hand < motion::kHandsPerAgent; ++hand) {
      const auto& mask = source_masks.contact[agent][hand];
      mask_any[agent * motion::kHandsPerAgent + hand] =
          std::find(mask.begin(), mask.end(), std::uint8_t{1}) != mask.end();
    }
  }

  const std::vector<Region> adjacency = vertex_adjacency(morph.steps.front().mesh);
  const InteriorVoxels voxels = interior_voxels(morph.steps.back().grid);

  BeamResult result;
  std::set<RegionKey> queued;
  std::vector<Evaluation> beam;
  int iteration = 0;

  auto evaluate_batch = [&](std::vector<Pending>& pending) {
    std::vector<Evaluation> evals(pending.size());
    std::vector<std::exception_ptr> errors(pending.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= pending.size()) return;
        try {
          Evaluation& e = evals[i];
          e.candidate = std::move(pending[i].candidate);
          e.constraint = morph::transfer_contacts(e.candidate, morph);
          retarget::HumanRetargetResult human = retarget::retarget_human_motion(
              source, target_track, e.constraint, source_masks, body_a, body_b,
              cfg.weights, cfg.human_cfg);
          e.motion = source;
          e.motion.object = target_track;
          e.motion.agents = std::move(human.agents);
          e.filter = filter_candidate(e.motion, voxels, body_a, body_b);
          e.score = disc::score_sequence(model, e.motion, body_a, body_b);
          e.record.source_id = e.candidate.source_id;
          e.record.frame_range = e.candidate.frame_range;
          e.record.pool_index = pending[i].pool_index;
          e.record.origin = pending[i].origin;
          e.record.iteration = iteration;
          e.record.score = e.score;
          e.record.kept = e.filter.keep;
          e.record.flagged_ratio = e.filter.flagged_ratio;
          e.record.flagged_frames = e.filter.flagged_frames;
          e.record.max_volume = e.filter.max_volume;
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    int jobs = std::min<int>(cfg.jobs, static_cast<int>(pending.size()));
    if (jobs <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
      for (std::thread& t : threads) t.join();
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
    }
    for (Evaluation& e : evals) {
      result.records.push_back(e.record);
      if (e.filter.keep) beam.push_back(std::move(e));
    }
    pending.clear();
  };

  auto shrink_beam = [&]() {
    // Incumbents precede newcomers, so stable sort keeps ties elitist.
    std::stable_sort(beam.begin(), beam.end(),
                     [](const Evaluation& a, const Evaluation& b) {
                       return a.score > b.score;
                     });
    if (beam.size() > static_cast<std::size_t>(cfg.beam_width)) {
      beam.resize(cfg.beam_width);
    }
  };

  auto queue_pool_index = [&](std::vector<Pending>& pending, std::size_t index,
                              const char* origin) {
    const morph::ContactCandidate& cand = pool.candidates[index];
    if (!usable(cand, mask_any)) return;
    if (!queued.insert(cand.hands).second) return;
    pending.push_back({cand, origin, static_cast<int>(index)});
  };

  // Iteration 0: an evenly spaced sample, widened to the whole pool when the
  // sample leaves no survivor.
  std::vector<Pending> pending;
  const std::size_t n = pool.size();
  const std::size_t m = std::min<std::size_t>(cfg.initial_samples, n);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t index =
        m == 1 ? 0
               : static_cast<std::size_t>(std::llround(
                     static_cast<double>(i) * static_cast<double>(n - 1) /
                     static_cast<double>(m - 1)));
    queue_pool_index(pending, index, "initial");
  }
  evaluate_batch(pending);
  if (beam.empty()) {
    for (std::size_t index = 0; index < n; ++index) {
      queue_pool_index(pending, index, "initial");
    }
    evaluate_batch(pending);
  }
  if (beam.empty()) {
    throw AllCandidatesRejectedError(
        "every contact candidate failed the penetration filter");
  }
  shrink_beam();
  result.best_score_history.push_back(beam.front().score);

  for (iteration = 1; iteration < cfg.iterations; ++iteration) {
    for (const Evaluation& member : beam) {
      morph::ContactCandidate dilated = member.candidate;
      morph::ContactCandidate contracted = member.candidate;
      for (int slot = 0; slot < morph::kHandSlots; ++slot) {
        if (member.candidate.hands[slot].empty()) continue;
        dilated.hands[slot] = dilate_region(member.candidate.hands[slot], adjacency);
        contracted.hands[slot] =
            contract_region(member.candidate.hands[slot], adjacency);
      }
      for (auto* neighbor : {&dilated, &contracted}) {
        if (!usable(*neighbor, mask_any)) continue;
        if (!queued.insert(neighbor->hands).second) continue;
        pending.push_back(
            {std::move(*neighbor), neighbor == &dilated ? "dilate" : "contract", -1});
      }
    }
    // Swap-in: the unevaluated pool candidate most similar to the current best.
    double best_iou = -1.0;
    std::size_t best_index = n;
    for (std::size_t index = 0; index < n; ++index) {
      const morph::ContactCandidate& cand = pool.candidates[index];
      if (queued.count(cand.hands) || !usable(cand, mask_any)) continue;
      double iou = candidate_iou(cand, beam.front().candidate);
      if (iou > best_iou) {
        best_iou = iou;
        best_index = index;
      }
    }
    if (best_index < n) queue_pool_index(pending, best_index, "swap");

    evaluate_batch(pending);
    shrink_beam();
    result.best_score_history.push_back(beam.front().score);
  }

  Evaluation& best = beam.front();
  result.best_candidate = std::move(best.candidate);
  result.best_constraint = std::move(best.constraint);
  result.best_motion = std::move(best.motion);
  result.best_score = best.score;
  result.best_filter = best.filter;
  return result;
}

}  // namespace m4d::select
