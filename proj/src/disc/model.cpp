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
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "m4d/disc/model.hpp"
#include "m4d/error.hpp"
#include "m4d/kern/kernels.hpp"
#include "m4d/rng.hpp"

namespace m4d::disc {

namespace {

constexpr char kMagic[4] = {'R', 'N', 'K', '1'};

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) {
    throw ConfigError("ranking model needs at least an input and output size");
  }
  for (int d : dims) {
    if (d < 1) throw ConfigError("ranking model layer sizes must be positive");
  }
}

inline float activate(float x) { return x / std::sqrt(1.0f + x * x); }

// d activate / dx = (1 + x^2)^(-3/2)
inline float activate_grad(float x) {
  float t = 1.0f + x * x;
  return 1.0f / (t * std::sqrt(t));
}

}  // namespace

std::vector<int> default_model_dims() { return {kPoseFeatureDim, 256, 256, 1}; }

std::size_t RankingModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    n += static_cast<std::size_t>(dims[i]) * dims[i + 1] + dims[i + 1];
  }
  return n;
}

void RankingModel::validate() const {
  check_dims(dims);
  if (layers.size() != dims.size() - 1) {
    throw ConfigError("ranking model layer count disagrees with dims");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.w.size() != static_cast<std::size_t>(dims[i]) * dims[i + 1] ||
        l.b.size() != static_cast<std::size_t>(dims[i + 1])) {
      throw ConfigError("ranking model layer " + std::to_string(i) +
                        " has mismatched weight sizes");
    }
    for (float v : l.w) {
      if (!std::isfinite(v)) {
        throw NumericalError("NonFiniteWeight", "ranking model weight is not finite");
      }
    }
    for (float v : l.b) {
      if (!std::isfinite(v)) {
        throw NumericalError("NonFiniteWeight", "ranking model bias is not finite");
      }
    }
  }
}

RankingModel make_ranking_model(const std::vector<int>& dims, std::uint64_t seed) {
  check_dims(dims);
  RankingModel model;
  model.dims = dims;
  model.layers.resize(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Rng rng(derive_seed(seed, "disc-init", i));
    auto& layer = model.layers[i];
    std::size_t in = dims[i], out = dims[i + 1];
    layer.w.resize(in * out);
    layer.b.assign(out, 0.0f);
    double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (auto& w : layer.w) {
      w = static_cast<float>(rng.uniform(-limit, limit));
    }
  }
  return model;
}

std::vector<double> flatten_parameters(const RankingModel& model) {
  std::vector<double> params;
  params.reserve(model.parameter_count());
  for (const auto& layer : model.layers) {
    for (float w : layer.w) params.push_back(w);
    for (float b : layer.b) params.push_back(b);
  }
  return params;
}

void load_parameters(RankingModel& model, const std::vector<double>& params) {
  if (params.size() != model.parameter_count()) {
    throw ConfigError("parameter vector size disagrees with the model shape");
  }
  std::size_t k = 0;
  for (auto& layer : model.layers) {
    for (auto& w : layer.w) w = static_cast<float>(params[k++]);
    for (auto& b : layer.b) b = static_cast<float>(params[k++]);
  }
}

std::array<float, kPoseFeatureDim> canonicalize(const body::Pose& pose,
                                                const body::ArticulatedBody& body) {
  body::Pose rooted = pose;
  rooted.root_orient = {0.0, 0.0, 0.0};
  rooted.root_transl = {0.0, 0.0, 0.0};
  body::FkResult fk = body::forward_kinematics(body, rooted);
  std::array<float, kPoseFeatureDim> out;
  for (int j = 1; j < body::kJointCount; ++j) {
    out[3 * (j - 1) + 0] = static_cast<float>(fk.position[j].x);
    out[3 * (j - 1) + 1] = static_cast<float>(fk.position[j].y);
    out[3 * (j - 1) + 2] = static_cast<float>(fk.position[j].z);
  }
  return out;
}

void forward_batch(const RankingModel& model, const float* x, std::size_t rows,
                   float* scores, ForwardCache* cache) {
  std::size_t n_layers = model.layers.size();
  ForwardCache scratch;
  ForwardCache& c = cache ? *cache : scratch;
  c.pre.resize(n_layers);
  c.act.resize(n_layers);
  const float* cur = x;
  for (std::size_t i = 0; i < n_layers; ++i) {
    std::size_t in = model.dims[i], out = model.dims[i + 1];
    c.pre[i].resize(rows * out);
    kern::linear_forward(cur, rows, in, model.layers[i].w.data(),
                         model.layers[i].b.data(), out, c.pre[i].data());
    c.act[i] = c.pre[i];
    if (i + 1 < n_layers) {
      for (float& v : c.act[i]) v = activate(v);
    }
    cur = c.act[i].data();
  }
  std::memcpy(scores, cur, rows * model.dims.back() * sizeof(float));
}

void backward_batch(const RankingModel& model, const float* x, std::size_t rows,
                    const ForwardCache& cache, const float* dscores,
                    RankingModel& grads) {
  std::size_t n_layers = model.layers.size();
  std::vector<float> d(dscores, dscores + rows * model.dims.back());
  std::vector<float> dx;
  for (std::size_t i = n_layers; i-- > 0;) {
    std::size_t in = model.dims[i], out = model.dims[i + 1];
    const float* input = i == 0 ? x : cache.act[i - 1].data();
    kern::linear_backward_params(d.data(), rows, out, input, in,
                                 grads.layers[i].w.data(),
                                 grads.layers[i].b.data());
    if (i == 0) break;
    dx.resize(rows * in);
    kern::linear_backward_input(d.data(), rows, out, model.layers[i].w.data(),
                                in, dx.data());
    const auto& pre = cache.pre[i - 1];
    for (std::size_t k = 0; k < dx.size(); ++k) dx[k] *= activate_grad(pre[k]);
    d.swap(dx);
  }
}

double score(const RankingModel& model, const body::Pose& pose,
             const body::ArticulatedBody& body) {
  if (model.dims.front() != kPoseFeatureDim || model.dims.back() != 1) {
    throw ConfigError("pose scoring needs a " + std::to_string(kPoseFeatureDim) +
                      "-to-1 ranking model");
  }
  auto features = canonicalize(pose, body);
  float s = 0.0f;
  forward_batch(model, features.data(), 1, &s);
  return s;
}

double score_sequence(const RankingModel& model, const motion::MotionSequence& seq,
                      const body::ArticulatedBody& body_a,
                      const body::ArticulatedBody& body_b) {
  if (model.dims.front() != kPoseFeatureDim || model.dims.back() != 1) {
    throw ConfigError("pose scoring needs a " + std::to_string(kPoseFeatureDim) +
                      "-to-1 ranking model");
  }
  std::size_t frames = seq.frames();
  std::size_t rows = motion::kAgentCount * frames;
  const body::ArticulatedBody* bodies[2] = {&body_a, &body_b};
  std::vector<float> features(rows * kPoseFeatureDim);
  for (int a = 0; a < motion::kAgentCount; ++a) {
    for (std::size_t f = 0; f < frames; ++f) {
      auto row = canonicalize(seq.agents[a][f], *bodies[a]);
      std::memcpy(features.data() + (a * frames + f) * kPoseFeatureDim,
                  row.data(), sizeof(row));
    }
  }
  std::vector<float> scores(rows);
  forward_batch(model, features.data(), rows, scores.data());
  // Summing in sorted order makes the mean exactly frame-order invariant.
  std::sort(scores.begin(), scores.end());
  double sum = 0.0;
  for (float s : scores) sum += s;
  return sum / static_cast<double>(rows);
}

void save_model(const RankingModel& model, const std::string& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  std::uint32_t n = static_cast<std::uint32_t>(model.dims.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int d : model.dims) {
    std::uint32_t u = static_cast<std::uint32_t>(d);
    out.write(reinterpret_cast<const char*>(&u), sizeof(u));
  }
  for (const auto& layer : model.layers) {
    out.write(reinterpret_cast<const char*>(layer.w.data()),
              layer.w.size() * sizeof(float));
    out.write(reinterpret_cast<const char*>(layer.b.data()),
              layer.b.size() * sizeof(float));
  }
  if (!out) throw IoError("failed while writing " + path);
}

RankingModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, sizeof(magic))) {
    throw ParseError(path + ": truncated before the magic");
  }
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw SchemaVersionMismatch(path + ": not an RNK1 checkpoint");
  }
  std::uint32_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof(n)) || n < 2 || n > 64) {
    throw ParseError(path + ": invalid layer count");
  }
  RankingModel model;
  model.dims.resize(n);
  for (auto& d : model.dims) {
    std::uint32_t u = 0;
    if (!in.read(reinterpret_cast<char*>(&u), sizeof(u)) || u == 0 ||
        u > (1u << 20)) {
      throw ParseError(path + ": invalid layer size");
    }
    d = static_cast<int>(u);
  }
  model.layers.resize(n - 1);
  for (std::size_t i = 0; i + 1 < model.dims.size(); ++i) {
    auto& layer = model.layers[i];
    layer.w.resize(static_cast<std::size_t>(model.dims[i]) * model.dims[i + 1]);
    layer.b.resize(model.dims[i + 1]);
    if (!in.read(reinterpret_cast<char*>(layer.w.data()),
                 layer.w.size() * sizeof(float)) ||
        !in.read(reinterpret_cast<char*>(layer.b.data()),
                 layer.b.size() * sizeof(float))) {
      throw ParseError(path + ": truncated weight payload");
    }
  }
  try {
    model.validate();
  } catch (const NumericalError&) {
    throw ParseError(path + ": non-finite weight payload");
  }
  return model;
}

}  // namespace m4d::disc
