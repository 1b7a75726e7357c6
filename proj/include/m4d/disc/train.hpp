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

#ifndef M4D_DISC_TRAIN_HPP_
#define M4D_DISC_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "m4d/disc/model.hpp"
#include "m4d/disc/pairs.hpp"
#include "m4d/opt/optimize.hpp"

namespace m4d::disc {

// Trainer configuration. optim.iterations counts epochs; each epoch shuffles
// the pair order (seeded) and walks it in mini-batches.
struct TrainConfig {
  opt::OptimConfig optim;
  int batch_size = 256;
  std::uint64_t seed = 0;
  std::vector<int> dims = default_model_dims();

  TrainConfig() { optim.learning_rate = 2e-4; }

  void validate() const;  // optim checks plus batch_size >= 1, valid dims
};

struct TrainResult {
  RankingModel model;
  std::vector<double> loss_trace;  // mean ranking loss per epoch
};

// Pairwise loss -log sigmoid(r_pos - r_neg - margin), evaluated stably. At
// tied scores and zero margin this is exactly log 2. Strictly decreasing in
// (r_pos - r_neg): positives are pushed up, negatives down, at any value.
double ranking_pair_loss(double r_pos, double r_neg, double margin);

// d loss / d (r_pos - r_neg - margin); always negative.
double ranking_pair_loss_grad(double r_pos, double r_neg, double margin);

// Minimizes the mean ranking loss with Adam over shuffled mini-batches.
// Master weights accumulate in f64; the batched forward/backward runs in
// f32. Requires at least 100 pairs (ConfigError below that); throws
// NonFiniteLossError when a batch loss stops being finite.
TrainResult train(const std::vector<RankPair>& pairs, const TrainConfig& cfg);

// Fraction of pairs the model orders correctly (score(pos) > score(neg)).
double ranking_accuracy(const RankingModel& model,
                        const std::vector<RankPair>& pairs);

// Mean ranking loss over a pair set, f64 reference arithmetic end to end.
// The analytic gradient matches finite differences everywhere because every
// ingredient (linear maps, the activation, softplus) is smooth; refresh has
// nothing to freeze.
class RankingObjective final : public opt::Objective {
 public:
  RankingObjective(std::vector<int> dims, std::vector<RankPair> pairs);

  std::size_t dimension() const override { return dimension_; }
  double value(const std::vector<double>& x) override;
  double value_grad(const std::vector<double>& x,
                    std::vector<double>& grad) override;

 private:
  std::vector<int> dims_;
  std::vector<RankPair> pairs_;
  std::size_t dimension_;
};

}  // namespace m4d::disc

#endif  // M4D_DISC_TRAIN_HPP_
