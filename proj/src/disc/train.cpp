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
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "m4d/disc/train.hpp"
#include "m4d/error.hpp"
#include "m4d/kern/kernels.hpp"
#include "m4d/rng.hpp"

namespace m4d::disc {

namespace {

void check_train_dims(const std::vector<int>& dims) {
  if (dims.size() < 2 || dims.front() != kPoseFeatureDim || dims.back() != 1) {
    throw ConfigError("pair training needs dims from " +
                      std::to_string(kPoseFeatureDim) + " to 1");
  }
  for (int d : dims) {
    if (d < 1) throw ConfigError("ranking model layer sizes must be positive");
  }
}

std::size_t dims_parameter_count(const std::vector<int>& dims) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    n += static_cast<std::size_t>(dims[i]) * dims[i + 1] + dims[i + 1];
  }
  return n;
}

void zero_gradients(RankingModel& grads) {
  for (auto& layer : grads.layers) {
    std::fill(layer.w.begin(), layer.w.end(), 0.0f);
    std::fill(layer.b.begin(), layer.b.end(), 0.0f);
  }
}

void append_flat(const RankingModel& grads, std::vector<double>& out) {
  std::size_t k = 0;
  for (const auto& layer : grads.layers) {
    for (float w : layer.w) out[k++] = w;
    for (float b : layer.b) out[k++] = b;
  }
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = rng.uniform_int(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// sigmoid(-z) without overflow on either tail.
double sigmoid_neg(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

// Double-precision single-sample forward pass; acts[i] holds layer i's
// activated output, pres[i] the pre-activation.
double forward_ref(const std::vector<double>& params,
                   const std::vector<int>& dims, const double* input,
                   std::vector<std::vector<double>>& pres,
                   std::vector<std::vector<double>>& acts) {
  std::size_t n_layers = dims.size() - 1;
  pres.resize(n_layers);
  acts.resize(n_layers);
  const double* cur = input;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n_layers; ++i) {
    std::size_t in = dims[i], out = dims[i + 1];
    const double* w = params.data() + offset;
    const double* b = w + in * out;
    offset += in * out + out;
    pres[i].resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* wo = w + o * in;
      for (std::size_t k = 0; k < in; ++k) acc += wo[k] * cur[k];
      pres[i][o] = acc;
    }
    acts[i] = pres[i];
    if (i + 1 < n_layers) {
      for (double& v : acts[i]) v = v / std::sqrt(1.0 + v * v);
    }
    cur = acts[i].data();
  }
  return acts.back()[0];
}

void backward_ref(const std::vector<double>& params,
                  const std::vector<int>& dims, const double* input,
                  const std::vector<std::vector<double>>& pres,
                  const std::vector<std::vector<double>>& acts, double dscore,
                  std::vector<double>& grad) {
  std::size_t n_layers = dims.size() - 1;
  std::vector<std::size_t> offsets(n_layers);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n_layers; ++i) {
    offsets[i] = offset;
    offset += static_cast<std::size_t>(dims[i]) * dims[i + 1] + dims[i + 1];
  }
  std::vector<double> d{dscore};
  std::vector<double> dx;
  for (std::size_t i = n_layers; i-- > 0;) {
    std::size_t in = dims[i], out = dims[i + 1];
    const double* x = i == 0 ? input : acts[i - 1].data();
    double* dw = grad.data() + offsets[i];
    double* db = dw + in * out;
    for (std::size_t o = 0; o < out; ++o) {
      db[o] += d[o];
      double* dwo = dw + o * in;
      for (std::size_t k = 0; k < in; ++k) dwo[k] += d[o] * x[k];
    }
    if (i == 0) break;
    const double* w = params.data() + offsets[i];
    dx.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w + o * in;
      for (std::size_t k = 0; k < in; ++k) dx[k] += d[o] * wo[k];
    }
    for (std::size_t k = 0; k < in; ++k) {
      double t = 1.0 + pres[i - 1][k] * pres[i - 1][k];
      dx[k] /= t * std::sqrt(t);
    }
    d.swap(dx);
  }
}

}  // namespace

void TrainConfig::validate() const {
  optim.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  check_train_dims(dims);
}

double ranking_pair_loss(double r_pos, double r_neg, double margin) {
  double u = -(r_pos - r_neg - margin);
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

double ranking_pair_loss_grad(double r_pos, double r_neg, double margin) {
  return -sigmoid_neg(r_pos - r_neg - margin);
}

TrainResult train(const std::vector<RankPair>& pairs, const TrainConfig& cfg) {
  cfg.validate();
  if (pairs.size() < 100) {
    throw ConfigError("pair training needs at least 100 pairs, got " +
                      std::to_string(pairs.size()));
  }
  const std::size_t n = pairs.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  RankingModel model = make_ranking_model(cfg.dims, cfg.seed);
  RankingModel grads = model;
  std::vector<double> master = flatten_parameters(model);
  const std::size_t n_params = master.size();
  std::vector<double> adam_m(n_params, 0.0), adam_v(n_params, 0.0);
  std::vector<double> grad_flat(n_params, 0.0);

  std::vector<double> margins(n);
  for (std::size_t i = 0; i < n; ++i) margins[i] = margin(pairs[i].delta);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<float> features(2 * batch * kPoseFeatureDim);
  std::vector<float> scores(2 * batch);
  std::vector<float> dscores(2 * batch);
  ForwardCache cache;

  TrainResult result;
  result.loss_trace.reserve(cfg.optim.iterations);
  long step = 0;
  for (int epoch = 0; epoch < cfg.optim.iterations; ++epoch) {
    Rng rng(derive_seed(cfg.seed, "disc-shuffle", epoch));
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      std::size_t b = std::min(batch, n - start);
      for (std::size_t i = 0; i < b; ++i) {
        const RankPair& p = pairs[order[start + i]];
        std::copy(p.pos.begin(), p.pos.end(),
                  features.begin() + i * kPoseFeatureDim);
        std::copy(p.neg.begin(), p.neg.end(),
                  features.begin() + (b + i) * kPoseFeatureDim);
      }
      load_parameters(model, master);
      forward_batch(model, features.data(), 2 * b, scores.data(), &cache);
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < b; ++i) {
        double m = margins[order[start + i]];
        double r_pos = scores[i], r_neg = scores[b + i];
        batch_loss += ranking_pair_loss(r_pos, r_neg, m);
        double g = ranking_pair_loss_grad(r_pos, r_neg, m) /
                   static_cast<double>(b);
        dscores[i] = static_cast<float>(g);
        dscores[b + i] = static_cast<float>(-g);
      }
      batch_loss /= static_cast<double>(b);
      if (!std::isfinite(batch_loss)) {
        throw NonFiniteLossError(static_cast<int>(step),
                                 "ranking loss is not finite");
      }
      zero_gradients(grads);
      backward_batch(model, features.data(), 2 * b, cache, dscores.data(), grads);
      append_flat(grads, grad_flat);
      ++step;
      double bc1 = 1.0 - std::pow(cfg.optim.beta1, static_cast<double>(step));
      double bc2 = 1.0 - std::pow(cfg.optim.beta2, static_cast<double>(step));
      kern::adam_step(master.data(), adam_m.data(), adam_v.data(),
                      grad_flat.data(), n_params, cfg.optim.learning_rate,
                      cfg.optim.beta1, cfg.optim.beta2, cfg.optim.epsilon, bc1,
                      bc2);
      epoch_loss += batch_loss * static_cast<double>(b);
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(n));
  }
  load_parameters(model, master);
  result.model = std::move(model);
  return result;
}

double ranking_accuracy(const RankingModel& model,
                        const std::vector<RankPair>& pairs) {
  if (pairs.empty()) return 1.0;
  constexpr std::size_t kChunk = 512;
  std::vector<float> features(2 * kChunk * kPoseFeatureDim);
  std::vector<float> scores(2 * kChunk);
  std::size_t correct = 0;
  for (std::size_t start = 0; start < pairs.size(); start += kChunk) {
    std::size_t b = std::min(kChunk, pairs.size() - start);
    for (std::size_t i = 0; i < b; ++i) {
      const RankPair& p = pairs[start + i];
      std::copy(p.pos.begin(), p.pos.end(),
                features.begin() + i * kPoseFeatureDim);
      std::copy(p.neg.begin(), p.neg.end(),
                features.begin() + (b + i) * kPoseFeatureDim);
    }
    forward_batch(model, features.data(), 2 * b, scores.data());
    for (std::size_t i = 0; i < b; ++i) {
      if (scores[i] > scores[b + i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

RankingObjective::RankingObjective(std::vector<int> dims,
                                   std::vector<RankPair> pairs)
    : dims_(std::move(dims)), pairs_(std::move(pairs)) {
  check_train_dims(dims_);
  if (pairs_.empty()) {
    throw ConfigError("ranking objective needs at least one pair");
  }
  dimension_ = dims_parameter_count(dims_);
}

double RankingObjective::value(const std::vector<double>& x) {
  std::vector<std::vector<double>> pres, acts;
  std::vector<double> input(kPoseFeatureDim);
  double loss = 0.0;
  for (const RankPair& p : pairs_) {
    for (int k = 0; k < kPoseFeatureDim; ++k) input[k] = p.pos[k];
    double r_pos = forward_ref(x, dims_, input.data(), pres, acts);
    for (int k = 0; k < kPoseFeatureDim; ++k) input[k] = p.neg[k];
    double r_neg = forward_ref(x, dims_, input.data(), pres, acts);
    loss += ranking_pair_loss(r_pos, r_neg, margin(p.delta));
  }
  return loss / static_cast<double>(pairs_.size());
}

double RankingObjective::value_grad(const std::vector<double>& x,
                                    std::vector<double>& grad) {
  grad.assign(dimension_, 0.0);
  std::vector<std::vector<double>> pres_pos, acts_pos, pres_neg, acts_neg;
  std::vector<double> input_pos(kPoseFeatureDim), input_neg(kPoseFeatureDim);
  double loss = 0.0;
  double inv_n = 1.0 / static_cast<double>(pairs_.size());
  for (const RankPair& p : pairs_) {
    for (int k = 0; k < kPoseFeatureDim; ++k) {
      input_pos[k] = p.pos[k];
      input_neg[k] = p.neg[k];
    }
    double r_pos = forward_ref(x, dims_, input_pos.data(), pres_pos, acts_pos);
    double r_neg = forward_ref(x, dims_, input_neg.data(), pres_neg, acts_neg);
    double m = margin(p.delta);
    loss += ranking_pair_loss(r_pos, r_neg, m);
    double g = ranking_pair_loss_grad(r_pos, r_neg, m) * inv_n;
    backward_ref(x, dims_, input_pos.data(), pres_pos, acts_pos, g, grad);
    backward_ref(x, dims_, input_neg.data(), pres_neg, acts_neg, -g, grad);
  }
  return loss * inv_n;
}

}  // namespace m4d::disc
