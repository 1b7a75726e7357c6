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

#include "m4d/select/pipeline.hpp"

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "m4d/error.hpp"
#include "m4d/morph/morph.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/retarget/retarget.hpp"

namespace m4d::select {

namespace {

using nlohmann::ordered_json;

// FNV-1a over raw bytes; doubles hash by bit pattern, so identical inputs
// give identical digests on any IEEE platform.
class Hasher {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 1099511628211ULL;
    }
  }
  void f64(double v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void vec3(const Vec3& v) {
    f64(v.x);
    f64(v.y);
    f64(v.z);
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 14695981039346656037ULL;
};

std::string mesh_hash(const geom::TriMesh& mesh) {
  Hasher h;
  h.u64(mesh.vertices.size());
  h.u64(mesh.faces.size());
  for (const Vec3& v : mesh.vertices) h.vec3(v);
  for (const auto& f : mesh.faces) {
    for (std::uint32_t idx : f) h.u64(idx);
  }
  return h.hex();
}

std::string sequence_hash(const motion::MotionSequence& seq) {
  Hasher h;
  h.f64(seq.fps);
  h.u64(seq.frames());
  for (const Vec3& r : seq.object.rotations) h.vec3(r);
  for (const Vec3& t : seq.object.translations) h.vec3(t);
  for (const auto& agent : seq.agents) {
    for (const body::Pose& pose : agent) {
      h.vec3(pose.root_orient);
      h.vec3(pose.root_transl);
      for (const Vec3& theta : pose.theta) h.vec3(theta);
    }
  }
  return h.hex();
}

ordered_json optim_json(const opt::OptimConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},
          {"iterations", cfg.iterations},
          {"beta1", cfg.beta1},
          {"beta2", cfg.beta2},
          {"epsilon", cfg.epsilon}};
}

ordered_json weights_json(const retarget::LossWeights& w) {
  return {{"fidelity_rot", w.fidelity_rot},
          {"fidelity_trans", w.fidelity_trans},
          {"spatial", w.spatial},
          {"smooth", w.smooth},
          {"shape_relative", w.shape_relative},
          {"world_relative", w.world_relative},
          {"contact", w.contact}};
}

ordered_json config_json(const PipelineConfig& cfg) {
  return {{"n_intermediates", cfg.n_intermediates},
          {"resolution", cfg.resolution},
          {"pool",
           {{"contact_threshold", cfg.pool.contact_threshold},
            {"region_radius", cfg.pool.region_radius},
            {"dedup_iou", cfg.pool.dedup_iou}}},
          {"beam",
           {{"beam_width", cfg.beam.beam_width},
            {"iterations", cfg.beam.iterations},
            {"initial_samples", cfg.beam.initial_samples},
            {"jobs", cfg.beam.jobs},
            {"weights", weights_json(cfg.beam.weights)},
            {"human_cfg", optim_json(cfg.beam.human_cfg)}}},
          {"object_cfg", optim_json(cfg.object_cfg)},
          {"seed", cfg.seed}};
}

ordered_json record_json(const CandidateRecord& r) {
  return {{"source_id", r.source_id},
          {"frame_range", {r.frame_range[0], r.frame_range[1]}},
          {"pool_index", r.pool_index},
          {"origin", r.origin},
          {"iteration", r.iteration},
          {"score", r.score},
          {"kept", r.kept},
          {"flagged_ratio", r.flagged_ratio},
          {"flagged_frames", r.flagged_frames},
          {"max_volume", r.max_volume}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (n_intermediates < 0) throw ConfigError("n_intermediates must be >= 0");
  if (resolution < 8) throw ConfigError("resolution must be >= 8");
  pool.validate();
  beam.validate();
  object_cfg.validate();
}

std::size_t PipelineResult::succeeded() const {
  std::size_t n = 0;
  for (const SequenceOutcome& o : outcomes) n += o.ok ? 1 : 0;
  return n;
}

PipelineResult run_pipeline(const geom::TriMesh& source_mesh,
                            const geom::TriMesh& target_mesh,
                            const std::vector<motion::MotionSequence>& sequences,
                            const disc::RankingModel& model,
                            const body::ArticulatedBody& body_a,
                            const body::ArticulatedBody& body_b,
                            const PipelineConfig& cfg) {
  cfg.validate();
  model.validate();

  PipelineResult result;
  ordered_json& manifest = result.manifest;
  manifest["schema_version"] = "core-retarget/manifest/1";
  manifest["seed"] = cfg.seed;
  manifest["config"] = config_json(cfg);
  {
    Hasher h;
    std::string dump = manifest["config"].dump();
    h.bytes(dump.data(), dump.size());
    manifest["config_hash"] = h.hex();
  }
  manifest["inputs"] = {
      {"source_mesh",
       {{"vertices", source_mesh.vertices.size()},
        {"triangles", source_mesh.faces.size()},
        {"hash", mesh_hash(source_mesh)}}},
      {"target_mesh",
       {{"vertices", target_mesh.vertices.size()},
        {"triangles", target_mesh.faces.size()},
        {"hash", mesh_hash(target_mesh)}}},
      {"sequences", ordered_json::array()}};
  std::vector<std::string> ids;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    ids.push_back("seq" + std::to_string(s));
    manifest["inputs"]["sequences"].push_back(
        {{"id", ids.back()},
         {"frames", sequences[s].frames()},
         {"hash", sequence_hash(sequences[s])}});
  }

  // The chain and the pool are shared by every sequence; candidates from one
  // clip may serve another.
  morph::MorphSequence chain = morph::build_morph_sequence(
      source_mesh, target_mesh, cfg.n_intermediates, cfg.resolution);
  manifest["morph"] = {{"steps", chain.steps.size()},
                       {"spacing", chain.spacing()}};

  CandidatePool pool = build_candidate_pool(sequences, chain.steps.front().mesh,
                                            body_a, body_b, cfg.pool, ids);
  manifest["pool"] = {{"size", pool.size()},
                      {"candidates", ordered_json::array()}};
  for (const morph::ContactCandidate& cand : pool.candidates) {
    ordered_json sizes = ordered_json::array();
    for (const auto& hand : cand.hands) sizes.push_back(hand.size());
    manifest["pool"]["candidates"].push_back(
        {{"source_id", cand.source_id},
         {"frame_range", {cand.frame_range[0], cand.frame_range[1]}},
         {"region_sizes", sizes}});
  }

  manifest["results"] = ordered_json::array();
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    SequenceOutcome outcome;
    outcome.id = ids[s];
    ordered_json entry = {{"id", ids[s]}};
    try {
      const motion::MotionSequence& seq = sequences[s];
      motion::ContactMasks masks =
          motion::detect_contacts(seq, chain.steps.front().mesh, body_a, body_b,
                                  cfg.pool.contact_threshold);
      motion::ObjectTrack track = retarget::retarget_object_motion(
          seq.object, chain.steps.back().grid, chain.steps.back().mesh,
          cfg.beam.weights, cfg.object_cfg);
      outcome.beam = beam_search_select(pool, seq, masks, chain, track, model,
                                        body_a, body_b, cfg.beam);
      outcome.motion = outcome.beam.best_motion;
      outcome.ok = true;

      entry["status"] = "ok";
      entry["best"] = {{"score", outcome.beam.best_score},
                       {"source_id", outcome.beam.best_candidate.source_id},
                       {"flagged_ratio", outcome.beam.best_filter.flagged_ratio},
                       {"max_volume", outcome.beam.best_filter.max_volume}};
      entry["history"] = outcome.beam.best_score_history;
      entry["candidates"] = ordered_json::array();
      for (const CandidateRecord& r : outcome.beam.records) {
        entry["candidates"].push_back(record_json(r));
      }
    } catch (const Error& e) {
      outcome.error_type = e.type();
      outcome.error_message = e.what();
    } catch (const std::exception& e) {
      outcome.error_type = "InternalError";
      outcome.error_message = e.what();
    }
    if (!outcome.ok) {
      entry["status"] = "error";
      entry["error"] = {{"type", outcome.error_type},
                        {"message", outcome.error_message}};
    }
    manifest["results"].push_back(entry);
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

}  // namespace m4d::select
