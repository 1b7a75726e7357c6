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

#ifndef M4D_SELECT_BEAM_HPP_
#define M4D_SELECT_BEAM_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/disc/model.hpp"
#include "m4d/morph/contact_transfer.hpp"
#include "m4d/morph/morph.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/motion/sequence.hpp"
#include "m4d/opt/optimize.hpp"
#include "m4d/retarget/retarget.hpp"
#include "m4d/select/penetration.hpp"
#include "m4d/select/pool.hpp"

namespace m4d::select {

struct BeamConfig {
  int beam_width = 4;      // survivors kept between iterations
  int iterations = 3;      // total, counting the initial-sample iteration
  int initial_samples = 8; // iteration-0 budget, clamped to the pool size
  int jobs = 1;            // candidate evaluations per iteration in parallel
  retarget::LossWeights weights;
  opt::OptimConfig human_cfg;

  BeamConfig() { human_cfg.iterations = retarget::kHumanStageIterations; }
  void validate() const;  // throws ConfigError on non-positive sizes
};

// Everything the manifest needs about one evaluated candidate.
struct CandidateRecord {
  std::string source_id;
  std::array<std::int64_t, 2> frame_range{0, -1};
  int pool_index = -1;   // -1 for generated neighbors
  std::string origin;    // initial, dilate, contract, swap
  int iteration = 0;
  double score = 0.0;
  bool kept = false;
  double flagged_ratio = 0.0;
  std::size_t flagged_frames = 0;
  double max_volume = 0.0;
};

struct BeamResult {
  morph::ContactCandidate best_candidate;
  morph::ContactConstraint best_constraint;
  motion::MotionSequence best_motion;
  double best_score = 0.0;
  FilterStats best_filter;
  std::vector<double> best_score_history;  // one entry per iteration run
  std::vector<CandidateRecord> records;    // evaluation order
};

// Iteration 0 retargets, filters, and scores an evenly spaced initial sample
// of the pool (the whole pool if the sample leaves no survivor); later
// iterations evaluate neighbors of the beam (per member, every non-empty hand
// region dilated by one vertex ring and contracted by one ring, plus the pool
// candidate with highest IoU to the current best). The beam keeps the top
// beam_width survivors of old beam plus newcomers, so the best score never
// decreases. Candidates are evaluated at most once. Throws
// AllCandidatesRejectedError when no pool candidate passes the filter.
BeamResult beam_search_select(const CandidatePool& pool,
                              const motion::MotionSequence& source,
                              const motion::ContactMasks& source_masks,
                              const morph::MorphSequence& morph,
                              const motion::ObjectTrack& target_track,
                              const disc::RankingModel& model,
                              const body::ArticulatedBody& body_a,
                              const body::ArticulatedBody& body_b,
                              const BeamConfig& cfg);

}  // namespace m4d::select

#endif  // M4D_SELECT_BEAM_HPP_
