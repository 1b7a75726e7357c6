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

#include "m4d/morph/contact_transfer.hpp"

#include <fstream>

#include <json.hpp>

#include "m4d/error.hpp"
#include "m4d/geom/nearest.hpp"

namespace m4d::morph {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open contact file: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

}  // namespace

bool ContactCandidate::all_empty() const {
  for (const auto& h : hands) {
    if (!h.empty()) return false;
  }
  return true;
}

void ContactCandidate::check_indices(const geom::TriMesh& source_mesh) const {
  const std::size_t n = source_mesh.vertices.size();
  for (int h = 0; h < kHandSlots; ++h) {
    for (std::uint32_t idx : hands[h]) {
      if (idx >= n) {
        throw ConfigError("contact candidate hand " + std::to_string(h) +
                          " references vertex " + std::to_string(idx) +
                          " but the source mesh has " + std::to_string(n) +
                          " vertices");
      }
    }
  }
}

bool ContactConstraint::all_empty() const {
  for (const auto& h : hands) {
    if (!h.empty()) return false;
  }
  return true;
}

ContactConstraint transfer_contacts(const ContactCandidate& cand,
                                    const MorphSequence& morph) {
  if (morph.steps.size() < 2) {
    throw ConfigError("morph sequence needs at least source and target steps");
  }
  if (cand.all_empty()) {
    throw Error(ErrorCategory::kConfig, "EmptyCandidate",
                "all four hand contact sets are empty");
  }
  const geom::TriMesh& source_mesh = morph.steps.front().mesh;
  cand.check_indices(source_mesh);

  ContactConstraint constraint;
  for (int h = 0; h < kHandSlots; ++h) {
    constraint.hands[h].reserve(cand.hands[h].size());
    for (std::uint32_t idx : cand.hands[h]) {
      constraint.hands[h].push_back(source_mesh.vertices[idx]);
    }
  }

  for (std::size_t step = 1; step < morph.steps.size(); ++step) {
    const geom::TriMesh& mesh = morph.steps[step].mesh;
    const geom::MeshSoa soa(mesh);
    for (int h = 0; h < kHandSlots; ++h) {
      for (Vec3& p : constraint.hands[h]) {
        p = geom::nearest_surface_point(mesh, soa, p).point;
      }
    }
  }
  return constraint;
}

void save_contact_candidate(const ContactCandidate& cand, const std::string& path) {
  ordered_json doc;
  ordered_json hands = ordered_json::array();
  for (const auto& h : cand.hands) {
    ordered_json set = ordered_json::array();
    for (std::uint32_t idx : h) set.push_back(idx);
    hands.push_back(std::move(set));
  }
  doc["hands"] = std::move(hands);
  ordered_json prov;
  prov["sequence"] = cand.source_id;
  prov["frames"] = ordered_json::array({cand.frame_range[0], cand.frame_range[1]});
  doc["provenance"] = std::move(prov);

  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write contact candidate: " + path);
  }
  out << doc.dump(1, '\t') << "\n";
}

ContactCandidate load_contact_candidate(const std::string& path) {
  const json doc = parse_file(path);
  ContactCandidate cand;
  const json& hands = require(doc, "hands", path);
  if (!hands.is_array() || hands.size() != kHandSlots) {
    throw ParseError(path + ".hands: expected " + std::to_string(kHandSlots) +
                     " index sets");
  }
  for (int h = 0; h < kHandSlots; ++h) {
    if (!hands[h].is_array()) {
      throw ParseError(path + ".hands[" + std::to_string(h) + "]: expected an array");
    }
    for (const json& v : hands[h]) {
      if (!v.is_number_unsigned()) {
        throw ParseError(path + ".hands[" + std::to_string(h) +
                         "]: expected unsigned vertex indices");
      }
      cand.hands[h].push_back(v.get<std::uint32_t>());
    }
  }
  if (auto it = doc.find("provenance"); it != doc.end() && it->is_object()) {
    if (auto s = it->find("sequence"); s != it->end() && s->is_string()) {
      cand.source_id = s->get<std::string>();
    }
    if (auto f = it->find("frames"); f != it->end() && f->is_array() && f->size() == 2) {
      cand.frame_range[0] = (*f)[0].get<std::int64_t>();
      cand.frame_range[1] = (*f)[1].get<std::int64_t>();
    }
  }
  return cand;
}

void save_contact_constraint(const ContactConstraint& constraint,
                             const std::string& path) {
  ordered_json doc;
  ordered_json hands = ordered_json::array();
  for (const auto& h : constraint.hands) {
    ordered_json set = ordered_json::array();
    for (const Vec3& p : h) set.push_back(ordered_json::array({p.x, p.y, p.z}));
    hands.push_back(std::move(set));
  }
  doc["hands"] = std::move(hands);

  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write contact constraint: " + path);
  }
  out << doc.dump(1, '\t') << "\n";
}

ContactConstraint load_contact_constraint(const std::string& path) {
  const json doc = parse_file(path);
  ContactConstraint constraint;
  const json& hands = require(doc, "hands", path);
  if (!hands.is_array() || hands.size() != kHandSlots) {
    throw ParseError(path + ".hands: expected " + std::to_string(kHandSlots) +
                     " point sets");
  }
  for (int h = 0; h < kHandSlots; ++h) {
    if (!hands[h].is_array()) {
      throw ParseError(path + ".hands[" + std::to_string(h) + "]: expected an array");
    }
    for (const json& p : hands[h]) {
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
          !p[2].is_number()) {
        throw ParseError(path + ".hands[" + std::to_string(h) +
                         "]: expected [x,y,z] points");
      }
      constraint.hands[h].push_back(
          Vec3{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
  }
  return constraint;
}

}  // namespace m4d::morph
