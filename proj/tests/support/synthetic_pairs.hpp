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

#ifndef M4D_TESTS_SUPPORT_SYNTHETIC_PAIRS_HPP_
#define M4D_TESTS_SUPPORT_SYNTHETIC_PAIRS_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/disc/model.hpp"
#include "m4d/disc/pairs.hpp"
#include "m4d/rng.hpp"

namespace m4d::testsupport {

// Smooth sinusoid pose track family; same flavor as the fit fixture.
inline body::Pose smooth_pose(double s, const double amp[3], const double ph[3]) {
  body::Pose p;
  p.root_transl = {0.05 * std::sin(2.0 * s), 0.02 * s,
                   0.95 + 0.01 * std::sin(3.0 * s)};
  p.root_orient = {0.0, 0.0, 0.1 * std::sin(1.7 * s)};
  for (int j = 0; j < body::kJointCount - 1; ++j) {
    double phase = 0.37 * j;
    p.theta[j] = {amp[0] * std::sin(1.3 * s + phase + ph[0]),
                  amp[1] * std::sin(1.9 * s + 2.0 * phase + ph[1]),
                  amp[2] * std::sin(2.3 * s + 3.0 * phase + ph[2])};
  }
  return p;
}

// Synthetic ranking set: positives from the smooth family, negatives with
// joint noise scaled by the sampled object-pose margin. Cheap to generate at
// any size, fully determined by the seed, and separable by a small model.
inline std::vector<disc::RankPair> synthetic_pairs(
    std::size_t count, std::uint64_t seed, const body::ArticulatedBody& body) {
  std::vector<disc::RankPair> pairs;
  pairs.reserve(count);
  Rng rng(derive_seed(seed, "synthetic-pairs", 0));
  disc::NoiseSpec spec;
  const std::size_t frames = 20;
  while (pairs.size() < count) {
    double amp[3] = {rng.uniform(0.08, 0.20), rng.uniform(0.06, 0.15),
                     rng.uniform(0.04, 0.10)};
    double ph[3] = {rng.uniform(0.0, 6.28), rng.uniform(0.0, 6.28),
                    rng.uniform(0.0, 6.28)};
    disc::NoiseDelta delta = disc::sample_noise(spec, rng);
    double amp_noise = disc::margin(delta) / 60.0;
    for (std::size_t f = 0; f < frames && pairs.size() < count; ++f) {
      double s = static_cast<double>(f) / (frames - 1);
      body::Pose pos = smooth_pose(s, amp, ph);
      body::Pose neg = pos;
      for (auto& t : neg.theta) {
        t.x += rng.uniform(-amp_noise, amp_noise);
        t.y += rng.uniform(-amp_noise, amp_noise);
        t.z += rng.uniform(-amp_noise, amp_noise);
      }
      disc::RankPair pair;
      pair.pos = disc::canonicalize(pos, body);
      pair.neg = disc::canonicalize(neg, body);
      pair.delta = delta;
      pairs.push_back(pair);
    }
  }
  return pairs;
}

}  // namespace m4d::testsupport

#endif  // M4D_TESTS_SUPPORT_SYNTHETIC_PAIRS_HPP_
