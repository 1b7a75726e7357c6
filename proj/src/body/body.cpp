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

#include "m4d/body/body.hpp"

#include <fstream>

#include <json.hpp>

#include "m4d/error.hpp"

namespace m4d::body {

void ArticulatedBody::validate() const {
  if (parent[0] != -1) throw ConfigError("joint 0 must be the root");
  for (int j = 1; j < kJointCount; ++j) {
    if (parent[j] < 0 || parent[j] >= j) {
      throw ConfigError("joint " + std::to_string(j) +
                        " parent must precede it in index order");
    }
    if (norm(offset[j]) <= 0.0) {
      throw ConfigError("joint " + std::to_string(j) + " has a zero bone");
    }
    if (capsule_radius[j] <= 0.0) {
      throw ConfigError("joint " + std::to_string(j) +
                        " capsule radius must be positive");
    }
  }
}

ArticulatedBody default_body() {
  ArticulatedBody b;
  b.parent = {
      -1,  // pelvis
      0,   // left hip
      0,   // right hip
      0,   // spine1
      1,   // left knee
      2,   // right knee
      3,   // spine2
      4,   // left ankle
      5,   // right ankle
      6,   // spine3
      7,   // left foot
      8,   // right foot
      9,   // neck
      9,   // left collar
      9,   // right collar
      12,  // head
      13,  // left shoulder
      14,  // right shoulder
      16,  // left elbow
      17,  // right elbow
      18,  // left wrist
      19,  // right wrist
  };
  b.offset = {
      Vec3{0.000, 0.000, 0.000},    // pelvis
      Vec3{0.090, 0.000, -0.060},   // left hip
      Vec3{-0.090, 0.000, -0.060},  // right hip
      Vec3{0.000, 0.000, 0.110},    // spine1
      Vec3{0.000, 0.000, -0.380},   // left knee
      Vec3{0.000, 0.000, -0.380},   // right knee
      Vec3{0.000, 0.000, 0.130},    // spine2
      Vec3{0.000, 0.000, -0.400},   // left ankle
      Vec3{0.000, 0.000, -0.400},   // right ankle
      Vec3{0.000, 0.000, 0.130},    // spine3
      Vec3{0.000, 0.120, -0.060},   // left foot
      Vec3{0.000, 0.120, -0.060},   // right foot
      Vec3{0.000, 0.000, 0.110},    // neck
      Vec3{0.070, 0.000, 0.060},    // left collar
      Vec3{-0.070, 0.000, 0.060},   // right collar
      Vec3{0.000, 0.000, 0.150},    // head
      Vec3{0.110, 0.000, 0.015},    // left shoulder
      Vec3{-0.110, 0.000, 0.015},   // right shoulder
      Vec3{0.280, 0.000, 0.000},    // left elbow
      Vec3{-0.280, 0.000, 0.000},   // right elbow
      Vec3{0.250, 0.000, 0.000},    // left wrist
      Vec3{-0.250, 0.000, 0.000},   // right wrist
  };
  b.capsule_radius = {
      0.0,    // pelvis (no bone)
      0.075,  // left hip
      0.075,  // right hip
      0.100,  // spine1
      0.060,  // left knee
      0.060,  // right knee
      0.100,  // spine2
      0.050,  // left ankle
      0.050,  // right ankle
      0.100,  // spine3
      0.040,  // left foot
      0.040,  // right foot
      0.050,  // neck
      0.060,  // left collar
      0.060,  // right collar
      0.090,  // head
      0.050,  // left shoulder
      0.050,  // right shoulder
      0.045,  // left elbow
      0.045,  // right elbow
      0.040,  // left wrist
      0.040,  // right wrist
  };
  b.left_fingertips = {
      Vec3{0.160, 0.060, 0.005},
      Vec3{0.185, 0.025, 0.010},
      Vec3{0.190, -0.005, 0.010},
      Vec3{0.180, -0.035, 0.005},
      Vec3{0.160, -0.060, 0.000},
  };
  for (int t = 0; t < kFingertipsPerHand; ++t) {
    b.right_fingertips[t] = Vec3{-b.left_fingertips[t].x,
                                 b.left_fingertips[t].y,
                                 b.left_fingertips[t].z};
  }
  b.joint_name = {
      "pelvis",        "left_hip",       "right_hip",     "spine1",
      "left_knee",     "right_knee",     "spine2",        "left_ankle",
      "right_ankle",   "spine3",         "left_foot",     "right_foot",
      "neck",          "left_collar",    "right_collar",  "head",
      "left_shoulder", "right_shoulder", "left_elbow",    "right_elbow",
      "left_wrist",    "right_wrist",
  };
  b.validate();
  return b;
}

namespace {

nlohmann::ordered_json vec_to_json(const Vec3& v) {
  return nlohmann::ordered_json::array({v.x, v.y, v.z});
}

Vec3 vec_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw IoError("expected 3-vector at " + where);
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void save_body(const ArticulatedBody& body, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema_version"] = "core-retarget/body/1";
  nlohmann::ordered_json joints = nlohmann::ordered_json::array();
  for (int i = 0; i < kJointCount; ++i) {
    nlohmann::ordered_json jj;
    jj["name"] = body.joint_name[i];
    jj["parent"] = body.parent[i];
    jj["offset"] = vec_to_json(body.offset[i]);
    jj["capsule_radius"] = body.capsule_radius[i];
    joints.push_back(jj);
  }
  j["joints"] = joints;
  nlohmann::ordered_json lt = nlohmann::ordered_json::array();
  nlohmann::ordered_json rt = nlohmann::ordered_json::array();
  for (int t = 0; t < kFingertipsPerHand; ++t) {
    lt.push_back(vec_to_json(body.left_fingertips[t]));
    rt.push_back(vec_to_json(body.right_fingertips[t]));
  }
  j["left_fingertips"] = lt;
  j["right_fingertips"] = rt;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write body file: " + path);
  out << j.dump(2) << '\n';
}

ArticulatedBody load_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open body file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": invalid json: " + e.what());
  }
  if (j.value("schema_version", "") != "core-retarget/body/1") {
    throw IoError(path + ": unsupported body schema");
  }
  const auto& joints = j.at("joints");
  if (!joints.is_array() || joints.size() != kJointCount) {
    throw IoError(path + ": body must define exactly " +
                  std::to_string(kJointCount) + " joints");
  }
  ArticulatedBody b;
  for (int i = 0; i < kJointCount; ++i) {
    const auto& jj = joints[i];
    b.joint_name[i] = jj.at("name").get<std::string>();
    b.parent[i] = jj.at("parent").get<int>();
    b.offset[i] = vec_from_json(jj.at("offset"), "joints[" +
                                                     std::to_string(i) +
                                                     "].offset");
    b.capsule_radius[i] = jj.at("capsule_radius").get<double>();
  }
  const auto& lt = j.at("left_fingertips");
  const auto& rt = j.at("right_fingertips");
  if (lt.size() != kFingertipsPerHand || rt.size() != kFingertipsPerHand) {
    throw IoError(path + ": expected 5 fingertips per hand");
  }
  for (int t = 0; t < kFingertipsPerHand; ++t) {
    b.left_fingertips[t] = vec_from_json(lt[t], "left_fingertips");
    b.right_fingertips[t] = vec_from_json(rt[t], "right_fingertips");
  }
  try {
    b.validate();
  } catch (const ConfigError& e) {
    throw IoError(path + ": " + e.what());
  }
  return b;
}

}  // namespace m4d::body
