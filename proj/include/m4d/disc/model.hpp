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

#ifndef M4D_DISC_MODEL_HPP_
#define M4D_DISC_MODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/motion/sequence.hpp"

namespace m4d::disc {

// Pose feature: the 21 non-root joint positions with the root frame removed,
// flattened row-major. Root translation and orientation never enter, so the
// score is exactly invariant to rigid transforms at the root.
inline constexpr int kPoseFeatureDim = 3 * (body::kJointCount - 1);

// Feed-forward pose scorer. Hidden layers apply x / sqrt(1 + x^2), a smooth
// bounded unit whose every step is a correctly rounded IEEE operation, so the
// scalar and SIMD backends agree bitwise on the activation itself. The output
// layer is linear. Weights are row-major [out, in] in f32.
struct RankingModel {
  struct Layer {
    std::vector<float> w;
    std::vector<float> b;
  };

  std::vector<int> dims;  // e.g. {63, 256, 256, 1}
  std::vector<Layer> layers;

  std::size_t parameter_count() const;
  // Throws ConfigError on malformed dims or mismatched layer sizes,
  // NumericalError on non-finite weights.
  void validate() const;
};

// Default layer sizes.
std::vector<int> default_model_dims();

// Uniform Glorot initialization, biases zero, deterministic per seed.
RankingModel make_ranking_model(const std::vector<int>& dims, std::uint64_t seed);

// Parameter vector layout: per layer, weights row-major then biases. Used by
// the trainer (f64 master weights) and the gradient checks.
std::vector<double> flatten_parameters(const RankingModel& model);
void load_parameters(RankingModel& model, const std::vector<double>& params);

std::array<float, kPoseFeatureDim> canonicalize(const body::Pose& pose,
                                                const body::ArticulatedBody& body);

// Per-layer buffers from a forward pass, consumed by backward_batch.
// pre[i] holds layer i's pre-activation rows, act[i] the activated rows
// (act.back() is the raw output scores).
struct ForwardCache {
  std::vector<std::vector<float>> pre;
  std::vector<std::vector<float>> act;
};

// Scores `rows` feature rows (row-major, kPoseFeatureDim wide unless the
// model says otherwise). cache may be null when no backward pass follows.
void forward_batch(const RankingModel& model, const float* x, std::size_t rows,
                   float* scores, ForwardCache* cache = nullptr);

// Accumulates parameter gradients of sum(dscores . scores) into grads, which
// must have the model's shape and arrive zeroed unless accumulation across
// batches is wanted. x and cache must come from the matching forward pass.
void backward_batch(const RankingModel& model, const float* x, std::size_t rows,
                    const ForwardCache& cache, const float* dscores,
                    RankingModel& grads);

// Higher scores read as more plausible poses.
double score(const RankingModel& model, const body::Pose& pose,
             const body::ArticulatedBody& body);

// Sequence score: mean over every agent-frame pose. Frame order cannot
// matter because the mean is permutation-invariant.
double score_sequence(const RankingModel& model, const motion::MotionSequence& seq,
                      const body::ArticulatedBody& body_a,
                      const body::ArticulatedBody& body_b);

// Checkpoint IO, magic "RNK1": layer count, dims, then f32 weight/bias blocks
// per layer. Throws IoError on unreadable files, SchemaVersionMismatch on a
// foreign magic, ParseError on truncation or non-finite payloads.
void save_model(const RankingModel& model, const std::string& path);
RankingModel load_model(const std::string& path);

}  // namespace m4d::disc

#endif  // M4D_DISC_MODEL_HPP_
