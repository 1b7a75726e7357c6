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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "m4d/error.hpp"
#include "m4d/geom/trimesh.hpp"

namespace m4d::geom {

namespace {

// Face corners may carry /vt/vn suffixes; only the vertex index is used.
uint32_t parse_face_index(const std::string& token, size_t vertex_count,
                          const std::string& path) {
  size_t slash = token.find('/');
  std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  long idx = 0;
  try {
    idx = std::stol(head);
  } catch (const std::exception&) {
    throw IoError(path + ": malformed face index '" + token + "'");
  }
  if (idx < 1 || static_cast<size_t>(idx) > vertex_count) {
    throw IoError(path + ": face index " + std::to_string(idx) +
                  " outside 1.." + std::to_string(vertex_count));
  }
  return static_cast<uint32_t>(idx - 1);
}

}  // namespace

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  TriMesh mesh;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x >> v.y >> v.z)) {
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": malformed vertex record");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<uint32_t> corners;
      std::string token;
      while (ss >> token) {
        corners.push_back(
            parse_face_index(token, mesh.vertices.size(), path));
      }
      if (corners.size() < 3) {
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": face with fewer than 3 corners");
      }
      for (size_t i = 1; i + 1 < corners.size(); ++i) {
        mesh.faces.push_back({corners[0], corners[i], corners[i + 1]});
      }
    }
    // All other record types are ignored.
  }
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw IoError(path + ": no geometry found");
  }
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file: " + path);
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace m4d::geom
