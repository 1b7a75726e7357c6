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

#ifndef M4D_MOTION_SEQUENCE_HPP_
#define M4D_MOTION_SEQUENCE_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "m4d/body/body.hpp"
#include "m4d/math.hpp"

namespace m4d::motion {

// Rigid object trajectory. Rotations are axis-angle with |r| < pi so the
// representation stays unique along the track.
struct ObjectTrack {
  std::vector<Vec3> rotations;
  std::vector<Vec3> translations;

  std::size_t frames() const { return rotations.size(); }

  // Throws ConfigError when lengths differ, a rotation reaches pi, or any
  // component is non-finite.
  void validate() const;
};

constexpr int kAgentCount = 2;

// Two-agent interaction clip sampled at a fixed rate. All tracks share the
// same frame count N >= 2.
struct MotionSequence {
  double fps = 15.0;
  ObjectTrack object;
  std::array<std::vector<body::Pose>, kAgentCount> agents;
  std::string object_id;
  std::string label;  // one of: move1 move2 pass join leave

  std::size_t frames() const { return object.frames(); }

  // Throws ConfigError on any violated invariant (N >= 2, fps > 0, equal
  // track lengths, finite poses, valid label).
  void validate() const;
};

bool is_valid_label(const std::string& label);

// JSON clip IO, schema_version "core-retarget/1". Round trips are bit-exact
// for every f64 payload value. Throws ParseError with the offending field
// path, SchemaVersionMismatch on version drift, IoError on unreadable files.
MotionSequence read_motion(const std::string& path);
void write_motion(const MotionSequence& seq, const std::string& path);

}  // namespace m4d::motion

#endif  // M4D_MOTION_SEQUENCE_HPP_
