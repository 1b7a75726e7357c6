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

#ifndef M4D_RNG_HPP_
#define M4D_RNG_HPP_

#include <cstdint>
#include <string_view>

#include "m4d/math.hpp"

namespace m4d {

uint64_t splitmix64(uint64_t& state);

// FNV-1a over bytes; used for manifest hashing and sub-seed derivation.
uint64_t fnv1a(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ull);

// Derives a stream-specific seed so pipeline stages draw independent,
// reproducible randomness regardless of execution order.
uint64_t derive_seed(uint64_t seed, std::string_view stream, uint64_t index);

// xoshiro256** with splitmix64 seeding. Hand-rolled distributions keep
// results identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  uint64_t uniform_int(uint64_t n);        // [0, n)
  double normal();                         // standard normal, Box-Muller
  double pick_sign();                      // -1.0 or +1.0
  Vec3 unit_vector();                      // uniform on the sphere

 private:
  uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace m4d

#endif  // M4D_RNG_HPP_
