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

#ifndef M4D_SELECT_PIPELINE_HPP_
#define M4D_SELECT_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "m4d/body/body.hpp"
#include "m4d/disc/model.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/motion/sequence.hpp"
#include "m4d/opt/optimize.hpp"
#include "m4d/select/beam.hpp"
#include "m4d/select/pool.hpp"

namespace m4d::select {

struct PipelineConfig {
  int n_intermediates = 3;  // morph chain interior steps
  int resolution = 64;      // SDF lattice resolution
  PoolConfig pool;
  BeamConfig beam;          // carries the human stage weights and budget
  opt::OptimConfig object_cfg;
  std::uint64_t seed = 0;   // provenance; every stage is deterministic

  PipelineConfig() { object_cfg.iterations = retarget::kObjectStageIterations; }
  void validate() const;
};

// Per-sequence result. A failure carries the thrown error's type and message
// and leaves the rest of the batch untouched.
struct SequenceOutcome {
  std::string id;
  bool ok = false;
  std::string error_type;
  std::string error_message;
  motion::MotionSequence motion;  // meaningful when ok
  BeamResult beam;                // meaningful when ok
};

struct PipelineResult {
  std::vector<SequenceOutcome> outcomes;  // one per source sequence, in order
  nlohmann::ordered_json manifest;

  std::size_t succeeded() const;
};

// Full retargeting run: morph chain source -> target, one candidate pool over
// all source sequences, then per sequence the object stage followed by beam
// search over transferred constraints. The manifest records inputs (mesh and
// sequence content hashes), seed, a config hash, the pool, and every
// candidate evaluation; identical inputs and config produce a byte-identical
// manifest dump. An empty sequence list succeeds with empty outcomes.
PipelineResult run_pipeline(const geom::TriMesh& source_mesh,
                            const geom::TriMesh& target_mesh,
                            const std::vector<motion::MotionSequence>& sequences,
                            const disc::RankingModel& model,
                            const body::ArticulatedBody& body_a,
                            const body::ArticulatedBody& body_b,
                            const PipelineConfig& cfg = {});

}  // namespace m4d::select

#endif  // M4D_SELECT_PIPELINE_HPP_
