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
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "m4d/body/body.hpp"
#include "m4d/disc/model.hpp"
#include "m4d/disc/pairs.hpp"
#include "m4d/disc/train.hpp"
#include "m4d/error.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/motion/toy_scene.hpp"
#include "m4d/opt/grad_check.hpp"
#include "m4d/retarget/retarget.hpp"
#include "m4d/rng.hpp"
#include "support/synthetic_pairs.hpp"

namespace {

using namespace m4d;

double pose_mpjpe_mm(const body::ArticulatedBody& body,
                     const std::array<std::vector<body::Pose>, 2>& a,
                     const std::array<std::vector<body::Pose>, 2>& b) {
  double sum = 0.0;
  std::size_t count = 0;
  for (int agent = 0; agent < 2; ++agent) {
    for (std::size_t f = 0; f < a[agent].size(); ++f) {
      auto fka = body::forward_kinematics(body, a[agent][f]);
      auto fkb = body::forward_kinematics(body, b[agent][f]);
      for (int j = 0; j < body::kJointCount; ++j) {
        sum += norm(fka.position[j] - fkb.position[j]);
        ++count;
      }
    }
  }
  return sum / static_cast<double>(count) * 1000.0;
}

}  // namespace

TEST_CASE("margin matches the noise formula") {
  CHECK(disc::margin({{30, 0, 0}, {0.3, 0, 0}}) == 6.0);
  CHECK(disc::margin({}) == 0.0);
  CHECK(disc::margin({{20, 20, 20}, {0.2, 0.2, 0.2}}) == 12.0);
  CHECK(disc::margin({{-20, 20, -20}, {-0.2, 0.2, -0.2}}) == 12.0);
}

TEST_CASE("noise sampling respects ranges and signs") {
  disc::NoiseSpec spec;
  Rng rng(derive_seed(77, "disc-noise", 0));
  bool neg_rot = false, neg_trans = false;
  for (int i = 0; i < 1000; ++i) {
    disc::NoiseDelta d = disc::sample_noise(spec, rng);
    for (double v : {d.rot_deg.x, d.rot_deg.y, d.rot_deg.z}) {
      CHECK(std::abs(v) >= 20.0);
      CHECK(std::abs(v) < 60.0);
      neg_rot = neg_rot || v < 0.0;
    }
    for (double v : {d.trans.x, d.trans.y, d.trans.z}) {
      CHECK(std::abs(v) >= 0.2);
      CHECK(std::abs(v) < 0.5);
      neg_trans = neg_trans || v < 0.0;
    }
  }
  CHECK(neg_rot);
  CHECK(neg_trans);

  Rng ra(41), rb(41);
  disc::NoiseDelta da = disc::sample_noise(spec, ra);
  disc::NoiseDelta db = disc::sample_noise(spec, rb);
  CHECK(da.rot_deg.x == db.rot_deg.x);
  CHECK(da.trans.z == db.trans.z);

  disc::NoiseSpec zero{0, 0, 0, 0};
  Rng rz(1);
  disc::NoiseDelta dz = disc::sample_noise(zero, rz);
  CHECK(disc::margin(dz) == 0.0);

  disc::NoiseSpec bad;
  bad.rot_lo_deg = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  disc::NoiseSpec inverted;
  inverted.trans_lo = 0.6;
  CHECK_THROWS_AS(inverted.validate(), ConfigError);
}

TEST_CASE("ranking loss is log 2 at tied scores and strictly ranking") {
  CHECK(std::abs(disc::ranking_pair_loss(0.0, 0.0, 0.0) - std::log(2.0)) <= 1e-12);
  CHECK(std::abs(disc::ranking_pair_loss(3.7, 3.7, 0.0) - std::log(2.0)) <= 1e-12);

  double prev = std::numeric_limits<double>::infinity();
  for (double z = -30.0; z <= 30.0; z += 0.25) {
    double loss = disc::ranking_pair_loss(z, 0.0, 0.0);
    CHECK(loss < prev);
    prev = loss;
    CHECK(disc::ranking_pair_loss_grad(z, 0.0, 0.0) < 0.0);
  }

  const double h = 1e-6;
  for (double z : {-5.0, -0.7, 0.0, 0.3, 2.0, 8.0}) {
    double fd = (disc::ranking_pair_loss(z + h, 0.0, 1.3) -
                 disc::ranking_pair_loss(z - h, 0.0, 1.3)) /
                (2.0 * h);
    double an = disc::ranking_pair_loss_grad(z, 0.0, 1.3);
    CHECK(std::abs(fd - an) <= 1e-8);
  }
}

TEST_CASE("ranking objective gradient matches finite differences") {
  body::ArticulatedBody body = body::default_body();
  int config = 0;
  for (std::vector<int> dims :
       {std::vector<int>{63, 8, 8, 1}, std::vector<int>{63, 12, 1}}) {
    auto pairs = testsupport::synthetic_pairs(6, 21 + config, body);
    disc::RankingObjective obj(dims, pairs);
    disc::RankingModel model = disc::make_ranking_model(dims, 31 + config);
    opt::GradCheckReport rep =
        opt::grad_check(obj, disc::flatten_parameters(model), 1e-4);
    CAPTURE(rep.max_rel_error);
    CHECK(rep.pass);
    ++config;
  }
}

TEST_CASE("batched f32 path agrees with the f64 reference") {
  body::ArticulatedBody body = body::default_body();
  auto pairs = testsupport::synthetic_pairs(8, 41, body);
  std::vector<int> dims = {63, 16, 8, 1};
  disc::RankingModel model = disc::make_ranking_model(dims, 51);
  std::vector<double> x = disc::flatten_parameters(model);
  disc::RankingObjective obj(dims, pairs);
  std::vector<double> gref;
  double loss_ref = obj.value_grad(x, gref);

  const std::size_t b = pairs.size();
  std::vector<float> feats(2 * b * disc::kPoseFeatureDim);
  std::vector<float> scores(2 * b), dscores(2 * b);
  for (std::size_t i = 0; i < b; ++i) {
    std::copy(pairs[i].pos.begin(), pairs[i].pos.end(),
              feats.begin() + i * disc::kPoseFeatureDim);
    std::copy(pairs[i].neg.begin(), pairs[i].neg.end(),
              feats.begin() + (b + i) * disc::kPoseFeatureDim);
  }
  disc::ForwardCache cache;
  disc::forward_batch(model, feats.data(), 2 * b, scores.data(), &cache);
  double loss_f32 = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    double m = disc::margin(pairs[i].delta);
    loss_f32 += disc::ranking_pair_loss(scores[i], scores[b + i], m);
    double g = disc::ranking_pair_loss_grad(scores[i], scores[b + i], m) /
               static_cast<double>(b);
    dscores[i] = static_cast<float>(g);
    dscores[b + i] = static_cast<float>(-g);
  }
  loss_f32 /= static_cast<double>(b);
  CHECK(std::abs(loss_f32 - loss_ref) / std::abs(loss_ref) <= 1e-6);

  disc::RankingModel grads = model;
  for (auto& layer : grads.layers) {
    std::fill(layer.w.begin(), layer.w.end(), 0.0f);
    std::fill(layer.b.begin(), layer.b.end(), 0.0f);
  }
  disc::backward_batch(model, feats.data(), 2 * b, cache, dscores.data(), grads);
  std::vector<double> g32 = disc::flatten_parameters(grads);
  double max_rel = 0.0;
  for (std::size_t k = 0; k < gref.size(); ++k) {
    double err = std::abs(g32[k] - gref[k]);
    max_rel = std::max(
        max_rel, err / std::max({std::abs(gref[k]), std::abs(g32[k]), 1e-6}));
  }
  CHECK(max_rel <= 2e-3);
}

TEST_CASE("score ignores root placement exactly") {
  body::ArticulatedBody body = body::default_body();
  auto pairs = testsupport::synthetic_pairs(1, 3, body);
  body::Pose pose;
  for (int j = 0; j < body::kJointCount - 1; ++j) {
    pose.theta[j] = {0.1 * std::sin(j * 0.7), -0.08 * std::cos(j * 1.1),
                     0.05 * std::sin(j * 1.9)};
  }
  body::Pose moved = pose;
  moved.root_transl = {3.7, -2.1, 5.5};
  moved.root_orient = {0.9, -1.2, 0.4};
  disc::RankingModel model = disc::make_ranking_model(disc::default_model_dims(), 4);
  CHECK(disc::score(model, pose, body) == disc::score(model, moved, body));
}

TEST_CASE("sequence score ignores frame order exactly") {
  body::ArticulatedBody body = body::default_body();
  geom::TriMesh box = geom::make_box({0.6, 0.4, 0.3});
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 24, box, body, 11);
  disc::RankingModel model = disc::make_ranking_model(disc::default_model_dims(), 4);
  double base = disc::score_sequence(model, scene.sequence, body, body);

  motion::MotionSequence permuted = scene.sequence;
  std::mt19937_64 gen(99);
  std::vector<std::size_t> perm(permuted.frames());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  for (std::size_t f = 0; f < perm.size(); ++f) {
    permuted.object.rotations[f] = scene.sequence.object.rotations[perm[f]];
    permuted.object.translations[f] = scene.sequence.object.translations[perm[f]];
    permuted.agents[0][f] = scene.sequence.agents[0][perm[f]];
    permuted.agents[1][f] = scene.sequence.agents[1][perm[f]];
  }
  CHECK(disc::score_sequence(model, permuted, body, body) == base);
}

TEST_CASE("checkpoint and pair files round trip bitwise") {
  body::ArticulatedBody body = body::default_body();
  disc::RankingModel model = disc::make_ranking_model({63, 24, 12, 1}, 8);
  const std::string model_path = "/tmp/m4d_test_disc.rnk1";
  disc::save_model(model, model_path);
  disc::RankingModel loaded = disc::load_model(model_path);
  CHECK(loaded.dims == model.dims);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    CHECK(loaded.layers[i].w == model.layers[i].w);
    CHECK(loaded.layers[i].b == model.layers[i].b);
  }

  auto pairs = testsupport::synthetic_pairs(7, 2, body);
  const std::string pair_path = "/tmp/m4d_test_disc.prs1";
  disc::save_pairs(pairs, pair_path);
  auto reloaded = disc::load_pairs(pair_path);
  REQUIRE(reloaded.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(reloaded[i].pos == pairs[i].pos);
    CHECK(reloaded[i].neg == pairs[i].neg);
    CHECK(reloaded[i].delta.rot_deg.x == pairs[i].delta.rot_deg.x);
    CHECK(reloaded[i].delta.trans.z == pairs[i].delta.trans.z);
  }

  CHECK_THROWS_AS(disc::load_model(pair_path), SchemaVersionMismatch);
  CHECK_THROWS_AS(disc::load_pairs(model_path), SchemaVersionMismatch);
  CHECK_THROWS_AS(disc::load_model("/tmp/m4d_no_such_file.rnk1"), IoError);

  // Truncate the checkpoint mid-payload.
  {
    std::ifstream in(model_path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    std::ofstream out(model_path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(disc::load_model(model_path), ParseError);
}

TEST_CASE("training is deterministic and validates its inputs") {
  body::ArticulatedBody body = body::default_body();
  auto pairs = testsupport::synthetic_pairs(200, 5, body);
  disc::TrainConfig cfg;
  cfg.optim.iterations = 20;
  cfg.seed = 3;
  disc::TrainResult r1 = disc::train(pairs, cfg);
  disc::TrainResult r2 = disc::train(pairs, cfg);
  CHECK(disc::flatten_parameters(r1.model) == disc::flatten_parameters(r2.model));
  CHECK(r1.loss_trace == r2.loss_trace);
  CHECK(r1.loss_trace.size() == 20);
  CHECK(r1.loss_trace.back() < r1.loss_trace.front());

  std::vector<disc::RankPair> few(pairs.begin(), pairs.begin() + 99);
  CHECK_THROWS_AS(disc::train(few, cfg), ConfigError);

  disc::TrainConfig bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(disc::train(pairs, bad), ConfigError);
  disc::TrainConfig wrong_dims = cfg;
  wrong_dims.dims = {10, 4, 1};
  CHECK_THROWS_AS(disc::train(pairs, wrong_dims), ConfigError);

  CHECK(disc::TrainConfig{}.optim.learning_rate == 2e-4);
  CHECK(disc::TrainConfig{}.optim.iterations == 1000);
}

TEST_CASE("zero-noise negatives match positives within optimizer tolerance") {
  body::ArticulatedBody body = body::default_body();
  geom::TriMesh box = geom::make_box({0.6, 0.4, 0.3});
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 30, box, body, 33);
  disc::NoiseSpec zero{0, 0, 0, 0};
  retarget::LossWeights weights;
  opt::OptimConfig cfg;
  cfg.iterations = retarget::kHumanStageIterations;
  disc::NegativeSample neg =
      disc::make_negative(scene.sequence, box, body, body, zero, 17, weights, cfg);
  CHECK(disc::margin(neg.delta) == 0.0);
  CHECK(pose_mpjpe_mm(body, scene.sequence.agents, neg.sequence.agents) < 10.0);
}

TEST_CASE("object-noise negatives rank below positives after training") {
  body::ArticulatedBody body = body::default_body();
  geom::TriMesh box = geom::make_box({0.6, 0.4, 0.3});
  disc::NoiseSpec spec45{45, 45, 0.35, 0.35};
  retarget::LossWeights weights;
  opt::OptimConfig cfg;
  cfg.iterations = retarget::kHumanStageIterations;

  std::vector<disc::RankPair> pairs;
  int idx = 0;
  for (motion::ToyKind kind : {motion::ToyKind::kCarry, motion::ToyKind::kHandover}) {
    for (std::uint64_t seed : {101, 202}) {
      motion::ToyScene scene = motion::generate_toy_scene(kind, 30, box, body, seed);
      disc::NegativeSample neg = disc::make_negative(
          scene.sequence, box, body, body, spec45, 1000 + idx, weights, cfg);
      auto expanded = disc::pairs_from_sequences(scene.sequence, neg.sequence,
                                                 neg.delta, body, body);
      pairs.insert(pairs.end(), expanded.begin(), expanded.end());
      ++idx;
    }
  }
  REQUIRE(pairs.size() == 240);

  // Interleaved split keeps every sequence represented on both sides.
  std::vector<disc::RankPair> train_set, held;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (i % 5 == 4 ? held : train_set).push_back(pairs[i]);
  }
  disc::TrainConfig tc;
  tc.optim.iterations = 300;
  tc.seed = 9;
  disc::TrainResult res = disc::train(train_set, tc);
  CHECK(res.loss_trace.back() < res.loss_trace.front());
  CHECK(disc::ranking_accuracy(res.model, held) >= 0.9);
}
