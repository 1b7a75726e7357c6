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

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

#include "m4d/error.hpp"
#include "m4d/geom/sdf.hpp"

namespace m4d::geom {

float SdfGrid::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

float SdfGrid::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double SdfGrid::sample(const Vec3& p) const {
  Aabb box = bounds();
  Vec3 q = cwise_max(box.lo, cwise_min(box.hi, p));
  double outside = norm(p - q);
  double fx = (q.x - origin.x) / spacing;
  double fy = (q.y - origin.y) / spacing;
  double fz = (q.z - origin.z) / spacing;
  auto split = [](double f, uint32_t dim, uint32_t* i0, double* t) {
    double fl = std::floor(f);
    long i = static_cast<long>(fl);
    long hi = static_cast<long>(dim) - 2;
    i = std::clamp(i, 0l, std::max(0l, hi));
    *i0 = static_cast<uint32_t>(i);
    *t = std::clamp(f - static_cast<double>(i), 0.0, 1.0);
  };
  uint32_t i0, j0, k0;
  double tx, ty, tz;
  split(fx, dims[0], &i0, &tx);
  split(fy, dims[1], &j0, &ty);
  split(fz, dims[2], &k0, &tz);
  uint32_t i1 = std::min(i0 + 1, dims[0] - 1);
  uint32_t j1 = std::min(j0 + 1, dims[1] - 1);
  uint32_t k1 = std::min(k0 + 1, dims[2] - 1);
  double c000 = at(i0, j0, k0), c100 = at(i1, j0, k0);
  double c010 = at(i0, j1, k0), c110 = at(i1, j1, k0);
  double c001 = at(i0, j0, k1), c101 = at(i1, j0, k1);
  double c011 = at(i0, j1, k1), c111 = at(i1, j1, k1);
  double c00 = c000 + tx * (c100 - c000);
  double c10 = c010 + tx * (c110 - c010);
  double c01 = c001 + tx * (c101 - c001);
  double c11 = c011 + tx * (c111 - c011);
  double c0 = c00 + ty * (c10 - c00);
  double c1 = c01 + ty * (c11 - c01);
  return c0 + tz * (c1 - c0) + outside;
}

Vec3 SdfGrid::gradient(const Vec3& p) const {
  double h = spacing * 0.5;
  return {(sample({p.x + h, p.y, p.z}) - sample({p.x - h, p.y, p.z})) /
              (2.0 * h),
          (sample({p.x, p.y + h, p.z}) - sample({p.x, p.y - h, p.z})) /
              (2.0 * h),
          (sample({p.x, p.y, p.z + h}) - sample({p.x, p.y, p.z - h})) /
              (2.0 * h)};
}

namespace {

constexpr char kMagic[4] = {'S', 'D', 'F', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T* v, const std::string& path) {
  in.read(reinterpret_cast<char*>(v), sizeof(T));
  if (!in) throw IoError("truncated sdf file: " + path);
}

}  // namespace

void save_sdf(const SdfGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sdf file: " + path);
  out.write(kMagic, 4);
  write_raw(out, grid.origin.x);
  write_raw(out, grid.origin.y);
  write_raw(out, grid.origin.z);
  write_raw(out, grid.spacing);
  write_raw(out, grid.dims[0]);
  write_raw(out, grid.dims[1]);
  write_raw(out, grid.dims[2]);
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path);
}

SdfGrid load_sdf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sdf file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("bad magic in sdf file: " + path);
  }
  SdfGrid g;
  read_raw(in, &g.origin.x, path);
  read_raw(in, &g.origin.y, path);
  read_raw(in, &g.origin.z, path);
  read_raw(in, &g.spacing, path);
  read_raw(in, &g.dims[0], path);
  read_raw(in, &g.dims[1], path);
  read_raw(in, &g.dims[2], path);
  if (g.spacing <= 0.0 || g.dims[0] < 2 || g.dims[1] < 2 || g.dims[2] < 2) {
    throw IoError("invalid sdf header: " + path);
  }
  size_t n = static_cast<size_t>(g.dims[0]) * g.dims[1] * g.dims[2];
  if (n > (size_t{1} << 31)) throw IoError("sdf grid too large: " + path);
  g.values.resize(n);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw IoError("truncated sdf values: " + path);
  char extra;
  if (in.read(&extra, 1)) throw IoError("trailing bytes in sdf file: " + path);
  return g;
}

}  // namespace m4d::geom
