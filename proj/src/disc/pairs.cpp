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

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "m4d/disc/pairs.hpp"
#include "m4d/error.hpp"
#include "m4d/motion/contact.hpp"

namespace m4d::disc {

namespace {

constexpr char kMagic[4] = {'P', 'R', 'S', '1'};

void check_range(double lo, double hi, const char* what) {
  if (!(lo >= 0.0) || !(hi >= lo)) {
    throw ConfigError(std::string("noise ") + what +
                      " range must satisfy 0 <= lo <= hi");
  }
}

}  // namespace

void NoiseSpec::validate() const {
  check_range(rot_lo_deg, rot_hi_deg, "rotation");
  check_range(trans_lo, trans_hi, "translation");
}

double margin(const NoiseDelta& delta) {
  double rot = std::abs(delta.rot_deg.x) + std::abs(delta.rot_deg.y) +
               std::abs(delta.rot_deg.z);
  double trans =
      std::abs(delta.trans.x) + std::abs(delta.trans.y) + std::abs(delta.trans.z);
  return rot / 10.0 + trans * 10.0;
}

NoiseDelta sample_noise(const NoiseSpec& spec, Rng& rng) {
  spec.validate();
  NoiseDelta delta;
  double* comps[6] = {&delta.rot_deg.x, &delta.rot_deg.y, &delta.rot_deg.z,
                      &delta.trans.x, &delta.trans.y, &delta.trans.z};
  for (int i = 0; i < 6; ++i) {
    double lo = i < 3 ? spec.rot_lo_deg : spec.trans_lo;
    double hi = i < 3 ? spec.rot_hi_deg : spec.trans_hi;
    *comps[i] = rng.uniform(lo, hi) * rng.pick_sign();
  }
  return delta;
}

motion::ObjectTrack apply_noise(const motion::ObjectTrack& track,
                                const NoiseDelta& delta) {
  Mat3 rot = axis_rotation({0.0, 0.0, 1.0}, deg_to_rad(delta.rot_deg.z)) *
             axis_rotation({0.0, 1.0, 0.0}, deg_to_rad(delta.rot_deg.y)) *
             axis_rotation({1.0, 0.0, 0.0}, deg_to_rad(delta.rot_deg.x));
  motion::ObjectTrack out;
  out.rotations.reserve(track.frames());
  out.translations.reserve(track.frames());
  for (std::size_t f = 0; f < track.frames(); ++f) {
    out.rotations.push_back(
        matrix_to_axis_angle(rot * axis_angle_to_matrix(track.rotations[f])));
    out.translations.push_back(track.translations[f] + delta.trans);
  }
  return out;
}

NegativeSample make_negative(const motion::MotionSequence& seq,
                             const geom::TriMesh& object,
                             const body::ArticulatedBody& body_a,
                             const body::ArticulatedBody& body_b,
                             const NoiseSpec& noise, std::uint64_t seed,
                             const retarget::LossWeights& weights,
                             const opt::OptimConfig& cfg) {
  seq.validate();
  Rng rng(derive_seed(seed, "disc-noise", 0));
  NoiseDelta delta = sample_noise(noise, rng);

  motion::ContactMasks masks = motion::detect_contacts(seq, object, body_a, body_b);
  morph::ContactConstraint constraint =
      retarget::source_contact_constraint(seq, masks, body_a, body_b);
  motion::ObjectTrack noised = apply_noise(seq.object, delta);

  retarget::HumanRetargetResult retargeted = retarget::retarget_human_motion(
      seq, noised, constraint, masks, body_a, body_b, weights, cfg);

  NegativeSample out;
  out.sequence = seq;
  out.sequence.object = std::move(noised);
  out.sequence.agents = std::move(retargeted.agents);
  out.delta = delta;
  return out;
}

std::vector<RankPair> pairs_from_sequences(const motion::MotionSequence& pos,
                                           const motion::MotionSequence& neg,
                                           const NoiseDelta& delta,
                                           const body::ArticulatedBody& body_a,
                                           const body::ArticulatedBody& body_b) {
  if (pos.frames() != neg.frames()) {
    throw ConfigError("positive and negative sequences disagree on frame count");
  }
  const body::ArticulatedBody* bodies[2] = {&body_a, &body_b};
  std::vector<RankPair> pairs;
  pairs.reserve(motion::kAgentCount * pos.frames());
  for (int a = 0; a < motion::kAgentCount; ++a) {
    for (std::size_t f = 0; f < pos.frames(); ++f) {
      RankPair pair;
      pair.pos = canonicalize(pos.agents[a][f], *bodies[a]);
      pair.neg = canonicalize(neg.agents[a][f], *bodies[a]);
      pair.delta = delta;
      pairs.push_back(pair);
    }
  }
  return pairs;
}

void save_pairs(const std::vector<RankPair>& pairs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  std::uint64_t count = pairs.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const RankPair& p : pairs) {
    out.write(reinterpret_cast<const char*>(p.pos.data()), sizeof(p.pos));
    out.write(reinterpret_cast<const char*>(p.neg.data()), sizeof(p.neg));
    double d[6] = {p.delta.rot_deg.x, p.delta.rot_deg.y, p.delta.rot_deg.z,
                   p.delta.trans.x, p.delta.trans.y, p.delta.trans.z};
    out.write(reinterpret_cast<const char*>(d), sizeof(d));
  }
  if (!out) throw IoError("failed while writing " + path);
}

std::vector<RankPair> load_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, sizeof(magic))) {
    throw ParseError(path + ": truncated before the magic");
  }
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw SchemaVersionMismatch(path + ": not a PRS1 pair file");
  }
  std::uint64_t count = 0;
  if (!in.read(reinterpret_cast<char*>(&count), sizeof(count)) ||
      count > (1ull << 32)) {
    throw ParseError(path + ": invalid pair count");
  }
  std::vector<RankPair> pairs(count);
  for (auto& p : pairs) {
    double d[6];
    if (!in.read(reinterpret_cast<char*>(p.pos.data()), sizeof(p.pos)) ||
        !in.read(reinterpret_cast<char*>(p.neg.data()), sizeof(p.neg)) ||
        !in.read(reinterpret_cast<char*>(d), sizeof(d))) {
      throw ParseError(path + ": truncated pair payload");
    }
    p.delta.rot_deg = {d[0], d[1], d[2]};
    p.delta.trans = {d[3], d[4], d[5]};
    for (float v : p.pos) {
      if (!std::isfinite(v)) throw ParseError(path + ": non-finite feature");
    }
    for (float v : p.neg) {
      if (!std::isfinite(v)) throw ParseError(path + ": non-finite feature");
    }
  }
  return pairs;
}

}  // namespace m4d::disc
