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

#include "m4d/motion/sequence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "m4d/error.hpp"

namespace m4d::motion {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "core-retarget/1";

bool finite3(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

ordered_json vec3_json(const Vec3& v) {
  return ordered_json::array({v.x, v.y, v.z});
}

Vec3 parse_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(field + ": expected an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      throw ParseError(field + "[" + std::to_string(i) + "]: expected a number");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

body::Pose parse_pose(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ParseError(where + ": expected a pose object");
  }
  body::Pose pose;
  const json& theta = require(j, "theta", where);
  if (!theta.is_array() || theta.size() != body::kJointCount - 1) {
    throw ParseError(where + ".theta: expected " +
                     std::to_string(body::kJointCount - 1) + " axis-angle rows");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    pose.theta[i] =
        parse_vec3(theta[i], where + ".theta[" + std::to_string(i) + "]");
  }
  pose.root_orient = parse_vec3(require(j, "root_orient", where), where + ".root_orient");
  pose.root_transl = parse_vec3(require(j, "root_transl", where), where + ".root_transl");
  return pose;
}

}  // namespace

void ObjectTrack::validate() const {
  if (rotations.size() != translations.size()) {
    throw ConfigError("object track length mismatch: " +
                      std::to_string(rotations.size()) + " rotations vs " +
                      std::to_string(translations.size()) + " translations");
  }
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    if (!finite3(rotations[i]) || !finite3(translations[i])) {
      throw ConfigError("object track frame " + std::to_string(i) +
                        " has non-finite values");
    }
    if (norm(rotations[i]) >= kPi) {
      throw ConfigError("object rotation magnitude at frame " +
                        std::to_string(i) + " reaches pi");
    }
  }
}

bool is_valid_label(const std::string& label) {
  return label == "move1" || label == "move2" || label == "pass" ||
         label == "join" || label == "leave";
}

void MotionSequence::validate() const {
  object.validate();
  const std::size_t n = object.frames();
  if (n < 2) {
    throw ConfigError("motion sequence needs at least 2 frames, got " +
                      std::to_string(n));
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw ConfigError("fps must be positive and finite");
  }
  if (!is_valid_label(label)) {
    throw ConfigError("unknown interaction label \"" + label + "\"");
  }
  for (int a = 0; a < kAgentCount; ++a) {
    if (agents[a].size() != n) {
      throw ConfigError("agent " + std::to_string(a) + " track length " +
                        std::to_string(agents[a].size()) +
                        " differs from object track length " + std::to_string(n));
    }
    for (std::size_t f = 0; f < n; ++f) {
      const body::Pose& p = agents[a][f];
      bool ok = finite3(p.root_orient) && finite3(p.root_transl);
      for (const Vec3& t : p.theta) ok = ok && finite3(t);
      if (!ok) {
        throw ConfigError("agent " + std::to_string(a) + " frame " +
                          std::to_string(f) + " has non-finite values");
      }
    }
  }
}

MotionSequence read_motion(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open motion file: " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(path + ": top level must be an object");
  }
  const json& version = require(doc, "schema_version", path);
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion) {
    throw SchemaVersionMismatch(path + ": expected schema_version \"" +
                                kSchemaVersion + "\", got " + version.dump());
  }

  MotionSequence seq;
  const json& fps = require(doc, "fps", path);
  if (!fps.is_number()) throw ParseError(path + ".fps: expected a number");
  seq.fps = fps.get<double>();

  const json& object_id = require(doc, "object_id", path);
  if (!object_id.is_string()) throw ParseError(path + ".object_id: expected a string");
  seq.object_id = object_id.get<std::string>();

  const json& label = require(doc, "label", path);
  if (!label.is_string()) throw ParseError(path + ".label: expected a string");
  seq.label = label.get<std::string>();

  const json& object = require(doc, "object", path);
  if (!object.is_object()) throw ParseError(path + ".object: expected an object");
  const json& rot = require(object, "rotations", path + ".object");
  const json& tra = require(object, "translations", path + ".object");
  if (!rot.is_array() || !tra.is_array()) {
    throw ParseError(path + ".object: rotations/translations must be arrays");
  }
  for (std::size_t i = 0; i < rot.size(); ++i) {
    seq.object.rotations.push_back(
        parse_vec3(rot[i], path + ".object.rotations[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < tra.size(); ++i) {
    seq.object.translations.push_back(
        parse_vec3(tra[i], path + ".object.translations[" + std::to_string(i) + "]"));
  }

  const json& agents = require(doc, "agents", path);
  if (!agents.is_array() || agents.size() != kAgentCount) {
    throw ParseError(path + ".agents: expected exactly " +
                     std::to_string(kAgentCount) + " agent tracks");
  }
  for (int a = 0; a < kAgentCount; ++a) {
    const std::string where = path + ".agents[" + std::to_string(a) + "]";
    const json& frames = require(agents[a], "frames", where);
    if (!frames.is_array()) throw ParseError(where + ".frames: expected an array");
    for (std::size_t f = 0; f < frames.size(); ++f) {
      seq.agents[a].push_back(
          parse_pose(frames[f], where + ".frames[" + std::to_string(f) + "]"));
    }
  }

  try {
    seq.validate();
  } catch (const ConfigError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return seq;
}

void write_motion(const MotionSequence& seq, const std::string& path) {
  seq.validate();
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["fps"] = seq.fps;
  doc["object_id"] = seq.object_id;
  doc["label"] = seq.label;

  ordered_json object;
  ordered_json rot = ordered_json::array();
  ordered_json tra = ordered_json::array();
  for (std::size_t i = 0; i < seq.object.frames(); ++i) {
    rot.push_back(vec3_json(seq.object.rotations[i]));
    tra.push_back(vec3_json(seq.object.translations[i]));
  }
  object["rotations"] = std::move(rot);
  object["translations"] = std::move(tra);
  doc["object"] = std::move(object);

  ordered_json agents = ordered_json::array();
  for (int a = 0; a < kAgentCount; ++a) {
    ordered_json frames = ordered_json::array();
    for (const body::Pose& p : seq.agents[a]) {
      ordered_json pj;
      ordered_json theta = ordered_json::array();
      for (const Vec3& t : p.theta) theta.push_back(vec3_json(t));
      pj["theta"] = std::move(theta);
      pj["root_orient"] = vec3_json(p.root_orient);
      pj["root_transl"] = vec3_json(p.root_transl);
      frames.push_back(std::move(pj));
    }
    ordered_json agent;
    agent["frames"] = std::move(frames);
    agents.push_back(std::move(agent));
  }
  doc["agents"] = std::move(agents);

  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write motion file: " + path);
  }
  out << doc.dump(1, '\t') << "\n";
  if (!out) {
    throw IoError("failed writing motion file: " + path);
  }
}

}  // namespace m4d::motion
