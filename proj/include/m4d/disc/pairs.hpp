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

#ifndef M4D_DISC_PAIRS_HPP_
#define M4D_DISC_PAIRS_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "m4d/disc/model.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/motion/sequence.hpp"
#include "m4d/opt/optimize.hpp"
#include "m4d/retarget/retarget.hpp"
#include "m4d/rng.hpp"

namespace m4d::disc {

// Magnitude ranges for the 6D object-pose noise. The degenerate all-zero
// spec is allowed so tests can synthesize noise-free negatives; real use
// keeps 0 < lo < hi.
struct NoiseSpec {
  double rot_lo_deg = 20.0;
  double rot_hi_deg = 60.0;
  double trans_lo = 0.2;
  double trans_hi = 0.5;

  void validate() const;  // throws ConfigError unless 0 <= lo <= hi per range
};

// One sampled perturbation: rotation angles in degrees, translation in
// meters. Component magnitudes fall in the spec ranges; signs are random.
struct NoiseDelta {
  Vec3 rot_deg{0.0, 0.0, 0.0};
  Vec3 trans{0.0, 0.0, 0.0};
};

// m = (|alpha| + |beta| + |gamma|) / 10 + (|x| + |y| + |z|) * 10,
// angles in degrees, translations in meters.
double margin(const NoiseDelta& delta);

// Draw order is fixed (per component: magnitude, then sign) so sequences of
// draws reproduce exactly.
NoiseDelta sample_noise(const NoiseSpec& spec, Rng& rng);

// Left-multiplies every frame rotation by R(delta) and offsets every
// translation: the whole track moves rigidly, in the world frame.
motion::ObjectTrack apply_noise(const motion::ObjectTrack& track,
                                const NoiseDelta& delta);

// One training pair: canonicalized positive and negative pose features plus
// the noise that separates them.
struct RankPair {
  std::array<float, kPoseFeatureDim> pos;
  std::array<float, kPoseFeatureDim> neg;
  NoiseDelta delta;
};

struct NegativeSample {
  motion::MotionSequence sequence;  // noised track, re-retargeted agents
  NoiseDelta delta;
};

// Negative synthesis: samples a per-sequence constant noise, shifts the
// object track by it, and reruns the human retargeting stage against the
// sequence's own detected contacts. With zero noise this reduces to identity
// retargeting, so negatives match positives up to optimizer tolerance.
// Errors propagate from retargeting.
NegativeSample make_negative(const motion::MotionSequence& seq,
                             const geom::TriMesh& object,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b,
                             const NoiseSpec& noise, std::uint64_t seed,
                             const retarget::LossWeights& weights,
                             const opt::OptimConfig& cfg);

// Expands a positive/negative sequence pair into per-agent per-frame feature
// pairs, all sharing the sample's noise record.
std::vector<RankPair> pairs_from_sequences(const motion::MotionSequence& pos,
                                           const motion::MotionSequence& neg,
                                           const NoiseDelta& delta,
                                           const body::ArticulatedBody& body_a,
                                           const body::ArticulatedBody& body_b);

// Pair file IO, magic "PRS1": u64 count, then per pair f32 features (pos,
// neg) and the f64 noise record. Same error contract as the model
// checkpoint IO.
void save_pairs(const std::vector<RankPair>& pairs, const std::string& path);
std::vector<RankPair> load_pairs(const std::string& path);

}  // namespace m4d::disc

#endif  // M4D_DISC_PAIRS_HPP_
