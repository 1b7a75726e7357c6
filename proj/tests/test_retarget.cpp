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
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "m4d/body/body.hpp"
#include "m4d/error.hpp"
#include "m4d/geom/sdf.hpp"
#include "m4d/geom/trimesh.hpp"
#include "m4d/motion/contact.hpp"
#include "m4d/motion/toy_scene.hpp"
#include "m4d/opt/grad_check.hpp"
#include "m4d/retarget/objectives.hpp"
#include "m4d/retarget/retarget.hpp"

namespace {

using namespace m4d;
using retarget::FitObjective;
using retarget::FitResult;
using retarget::FitTargets;
using retarget::FitWeights;
using retarget::HumanStageObjective;
using retarget::LossWeights;
using retarget::ObjectStageObjective;

double mpjpe_mm(const body::ArticulatedBody& body,
                const std::vector<body::Pose>& a,
                const std::vector<body::Pose>& b) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const body::FkResult fa = body::forward_kinematics(body, a[f]);
    const body::FkResult fb = body::forward_kinematics(body, b[f]);
    for (int j = 0; j < body::kJointCount; ++j) {
      sum += norm(fa.position[j] - fb.position[j]);
      ++count;
    }
  }
  return sum / static_cast<double>(count) * 1000.0;
}

// Object-frame fingertip positions per hand slot over the in-contact frames.
// Under the toy scene's rigid grips these are constant per slot, which makes
// them the contact points the source motion actually realizes.
std::array<std::vector<Vec3>, 4> contact_tip_locals(
    const motion::MotionSequence& seq, const motion::ContactMasks& masks,
    const body::ArticulatedBody& body) {
  std::array<std::vector<Vec3>, 4> locals;
  for (std::size_t f = 0; f < seq.frames(); ++f) {
    const Mat3 rot = axis_angle_to_matrix(seq.object.rotations[f]);
    for (int a = 0; a < 2; ++a) {
      const body::FkResult fk = body::forward_kinematics(body, seq.agents[a][f]);
      const auto tips = body::fingertip_positions(body, fk);
      for (int h = 0; h < 2; ++h) {
        if (!masks.contact[a][h][f]) continue;
        for (int t = 0; t < 5; ++t) {
          locals[static_cast<std::size_t>(a * 2 + h)].push_back(transposed_mul(
              rot, tips[static_cast<std::size_t>(h * 5 + t)] -
                       seq.object.translations[f]));
        }
      }
    }
  }
  return locals;
}

morph::ContactConstraint source_contact_points(
    const motion::MotionSequence& seq, const motion::ContactMasks& masks,
    const body::ArticulatedBody& body) {
  const auto locals = contact_tip_locals(seq, masks, body);
  morph::ContactConstraint cons;
  for (int s = 0; s < 4; ++s) {
    const auto& ls = locals[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ls.size()); ++i) {
      cons.hands[static_cast<std::size_t>(s)].push_back(ls[i]);
    }
  }
  return cons;
}

FitTargets targets_from_poses(const body::ArticulatedBody& body,
                              const std::vector<body::Pose>& poses) {
  FitTargets tg;
  for (const body::Pose& p : poses) {
    const body::FkResult fk = body::forward_kinematics(body, p);
    tg.joint_positions.push_back(fk.position);
    std::array<Mat3, body::kOrientationJoints.size()> ori;
    for (std::size_t i = 0; i < ori.size(); ++i) {
      ori[i] = fk.local[body::kOrientationJoints[i]];
    }
    tg.joint_orientations.push_back(ori);
    tg.fingertips.push_back(body::fingertip_positions(body, fk));
  }
  return tg;
}

}  // namespace

TEST_CASE("retarget weight validation rejects bad values") {
  LossWeights lw;
  CHECK_NOTHROW(lw.validate());
  lw.contact = -1.0;
  CHECK_THROWS_AS(lw.validate(), ConfigError);
  FitWeights fw;
  CHECK_NOTHROW(fw.validate());
  fw.smooth = std::nan("");
  CHECK_THROWS_AS(fw.validate(), ConfigError);
}

TEST_CASE("object stage gradient matches finite differences") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  motion::ObjectTrack track;
  std::mt19937_64 rng(7);
  auto urand = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  for (int i = 0; i < 5; ++i) {
    track.rotations.push_back(
        {urand(-0.4, 0.4), urand(-0.4, 0.4), urand(-0.4, 0.4)});
    track.translations.push_back(
        {urand(-0.2, 0.2), urand(-0.2, 0.2), urand(-0.15, 0.25)});
  }
  ObjectStageObjective objective(track, box, LossWeights{});
  std::vector<double> x = ObjectStageObjective::pack(track);
  // Keep the probe clear of the fidelity kinks; central differences use
  // h = 1e-5 around each coordinate.
  for (double& v : x) {
    v += (urand(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * urand(0.005, 0.05);
  }
  const opt::GradCheckReport rep = opt::grad_check(objective, x, 1e-3);
  CHECK(rep.pass);
}

TEST_CASE("object retarget onto the same shape returns the source track") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  geom::SdfGrid sdf = geom::compute_sdf(box, 24);
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 60, box, body, 21);

  opt::MinimizeResult trace;
  motion::ObjectTrack out = retarget::retarget_object_motion(
      scene.sequence.object, sdf, box, LossWeights{}, opt::OptimConfig{}, &trace);

  double max_dt = 0.0;
  double max_deg = 0.0;
  for (std::size_t i = 0; i < out.frames(); ++i) {
    max_dt = std::max(
        max_dt, norm(out.translations[i] - scene.sequence.object.translations[i]));
    const Mat3 ra = axis_angle_to_matrix(out.rotations[i]);
    const Mat3 rb = axis_angle_to_matrix(scene.sequence.object.rotations[i]);
    const Mat3 rel = ra.transposed() * rb;
    const double tr = rel.m[0] + rel.m[4] + rel.m[8];
    max_deg = std::max(
        max_deg,
        rad_to_deg(std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0))));
  }
  CHECK(max_dt <= 1e-3);
  CHECK(max_deg <= 0.5);

  // The returned track never scores worse than the initialization.
  ObjectStageObjective objective(scene.sequence.object, box, LossWeights{});
  std::vector<double> xs = ObjectStageObjective::pack(scene.sequence.object);
  objective.refresh(xs);
  const double loss_src = objective.value(xs);
  std::vector<double> xo = ObjectStageObjective::pack(out);
  objective.refresh(xo);
  const double loss_out = objective.value(xo);
  CHECK(loss_out <= loss_src);
}

TEST_CASE("object retarget is deterministic") {
  geom::TriMesh box = geom::make_box({0.3, 0.3, 0.3});
  geom::SdfGrid sdf = geom::compute_sdf(box, 16);
  motion::ObjectTrack track;
  std::mt19937_64 rng(3);
  auto urand = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  for (int i = 0; i < 5; ++i) {
    track.rotations.push_back({urand(-0.3, 0.3), 0.0, urand(-0.3, 0.3)});
    track.translations.push_back({urand(-0.2, 0.2), 0.0, 0.3});
  }
  opt::OptimConfig cfg;
  cfg.iterations = 60;
  motion::ObjectTrack a =
      retarget::retarget_object_motion(track, sdf, box, LossWeights{}, cfg);
  motion::ObjectTrack b =
      retarget::retarget_object_motion(track, sdf, box, LossWeights{}, cfg);
  REQUIRE(a.frames() == b.frames());
  for (std::size_t i = 0; i < a.frames(); ++i) {
    CHECK(a.rotations[i].x == b.rotations[i].x);
    CHECK(a.rotations[i].y == b.rotations[i].y);
    CHECK(a.rotations[i].z == b.rotations[i].z);
    CHECK(a.translations[i].x == b.translations[i].x);
    CHECK(a.translations[i].y == b.translations[i].y);
    CHECK(a.translations[i].z == b.translations[i].z);
  }
}

TEST_CASE("constant-velocity track is an exact fixed point") {
  // Dyadic increments make the second differences bitwise zero, so the
  // initial gradient vanishes exactly and the optimizer must not move.
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  geom::SdfGrid sdf = geom::compute_sdf(box, 16);
  motion::ObjectTrack track;
  for (int i = 0; i < 20; ++i) {
    track.rotations.push_back({0.0, 0.0, 0.015625 * i});
    track.translations.push_back({0.0625 * i, 0.0, 0.5 + 0.03125 * i});
  }
  motion::ObjectTrack out = retarget::retarget_object_motion(
      track, sdf, box, LossWeights{}, opt::OptimConfig{});
  REQUIRE(out.frames() == track.frames());
  for (std::size_t i = 0; i < out.frames(); ++i) {
    CHECK(out.rotations[i].z == track.rotations[i].z);
    CHECK(out.translations[i].x == track.translations[i].x);
    CHECK(out.translations[i].z == track.translations[i].z);
  }
}

TEST_CASE("taller target rises clear of the ground") {
  geom::TriMesh tall = geom::make_box({0.3, 0.3, 1.0});
  geom::SdfGrid sdf = geom::compute_sdf(tall, 24);
  motion::ObjectTrack track;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    track.rotations.push_back({0.0, 0.0, 0.2 * u});
    track.translations.push_back({0.5 * u, 0.1 * u, 0.16});
  }
  motion::ObjectTrack out = retarget::retarget_object_motion(
      track, sdf, tall, LossWeights{}, opt::OptimConfig{});
  double min_h = 1e9;
  for (std::size_t i = 0; i < out.frames(); ++i) {
    const Mat3 rot = axis_angle_to_matrix(out.rotations[i]);
    for (const Vec3& v : tall.vertices) {
      min_h = std::min(min_h, (rot * v).z + out.translations[i].z);
    }
  }
  CHECK(min_h >= -1e-3);
}

TEST_CASE("object retarget rejects short tracks") {
  geom::TriMesh box = geom::make_box({0.3, 0.3, 0.3});
  geom::SdfGrid sdf = geom::compute_sdf(box, 16);
  motion::ObjectTrack track;
  track.rotations = {{0, 0, 0}, {0, 0, 0.1}};
  track.translations = {{0, 0, 0.3}, {0.1, 0, 0.3}};
  try {
    retarget::retarget_object_motion(track, sdf, box, LossWeights{},
                                     opt::OptimConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.type() == "TrackTooShort");
    CHECK(e.category() == ErrorCategory::kConfig);
  }
}

TEST_CASE("human stage gradient matches finite differences") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 10, box, body, 11);
  const motion::MotionSequence& seq = scene.sequence;
  morph::ContactConstraint cons =
      source_contact_points(seq, scene.scripted_contact, body);
  HumanStageObjective objective(seq, seq.object, cons, scene.scripted_contact,
                                body, body, LossWeights{});
  std::vector<double> x = HumanStageObjective::pack(seq.agents);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.02, 0.02);
  for (double& v : x) v += d(rng);
  const opt::GradCheckReport rep = opt::grad_check(objective, x, 1e-3);
  CHECK(rep.pass);
}

TEST_CASE("human retarget onto the same object stays near the source") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 30, box, body, 33);
  const motion::MotionSequence& seq = scene.sequence;
  morph::ContactConstraint cons =
      source_contact_points(seq, scene.scripted_contact, body);

  opt::OptimConfig cfg;
  cfg.iterations = retarget::kHumanStageIterations;
  retarget::HumanRetargetResult res = retarget::retarget_human_motion(
      seq, seq.object, cons, scene.scripted_contact, body, body, LossWeights{},
      cfg);

  const double mp = 0.5 * (mpjpe_mm(body, res.agents[0], seq.agents[0]) +
                           mpjpe_mm(body, res.agents[1], seq.agents[1]));
  CHECK(mp < 10.0);

  // The grips are rigid in the object frame, so the source realizes the
  // constraint exactly and the contact term starts at zero.
  HumanStageObjective objective(seq, seq.object, cons, scene.scripted_contact,
                                body, body, LossWeights{});
  std::vector<double> xs = HumanStageObjective::pack(seq.agents);
  objective.refresh(xs);
  objective.value(xs);
  CHECK(objective.term_values()[2] == doctest::Approx(0.0).epsilon(1e-12));

  // Monotone against the initialization.
  CHECK(res.trace.loss_trace.back() <= res.trace.loss_trace.front());
}

TEST_CASE("all-false contact masks match a zero contact weight") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 12, box, body, 44);
  const motion::MotionSequence& seq = scene.sequence;
  morph::ContactConstraint cons;
  cons.hands[0].push_back({0.0, -0.15, 0.0});
  cons.hands[3].push_back({0.0, 0.15, 0.0});
  motion::ContactMasks none;
  none.resize(seq.frames());
  opt::OptimConfig cfg;
  cfg.iterations = 200;
  retarget::HumanRetargetResult masked = retarget::retarget_human_motion(
      seq, seq.object, cons, none, body, body, LossWeights{}, cfg);
  LossWeights zero_contact;
  zero_contact.contact = 0.0;
  retarget::HumanRetargetResult reweighted = retarget::retarget_human_motion(
      seq, seq.object, cons, scene.scripted_contact, body, body, zero_contact,
      cfg);
  const std::vector<double> xa = HumanStageObjective::pack(masked.agents);
  const std::vector<double> xb = HumanStageObjective::pack(reweighted.agents);
  REQUIRE(xa.size() == xb.size());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(xa[i] - xb[i]));
  }
  CHECK(max_diff <= 1e-6);
}

TEST_CASE("wider target pulls contacts onto the new surface") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 30, box, body, 55);
  const motion::MotionSequence& seq = scene.sequence;

  // Transfer the source contact points through a pure y-stretch.
  auto locals = contact_tip_locals(seq, scene.scripted_contact, body);
  morph::ContactConstraint cons;
  for (int s = 0; s < 4; ++s) {
    auto& ls = locals[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ls.size()); ++i) {
      Vec3 p = ls[i];
      p.y *= 1.3;
      cons.hands[static_cast<std::size_t>(s)].push_back(p);
    }
  }

  opt::OptimConfig cfg;
  cfg.iterations = retarget::kHumanStageIterations;
  retarget::HumanRetargetResult res = retarget::retarget_human_motion(
      seq, seq.object, cons, scene.scripted_contact, body, body, LossWeights{},
      cfg);

  // In-contact chamfer at the optimum does not exceed its initial value.
  HumanStageObjective objective(seq, seq.object, cons, scene.scripted_contact,
                                body, body, LossWeights{});
  std::vector<double> xs = HumanStageObjective::pack(seq.agents);
  objective.refresh(xs);
  objective.value(xs);
  const double cd_init = objective.term_values()[2];
  std::vector<double> xo = HumanStageObjective::pack(res.agents);
  objective.refresh(xo);
  objective.value(xo);
  const double cd_final = objective.term_values()[2];
  CHECK(cd_final <= cd_init);

  // Fingertips land on the widened surface and nothing clips the ground.
  double sum = 0.0;
  std::size_t count = 0;
  double min_z = 1e9;
  for (int a = 0; a < 2; ++a) {
    for (std::size_t f = 0; f < seq.frames(); ++f) {
      const body::FkResult fk = body::forward_kinematics(body, res.agents[a][f]);
      for (int j = 0; j < body::kJointCount; ++j) {
        min_z = std::min(min_z, fk.position[j].z);
      }
      const auto tips = body::fingertip_positions(body, fk);
      const Mat3 rot = axis_angle_to_matrix(seq.object.rotations[f]);
      for (int h = 0; h < 2; ++h) {
        if (!scene.scripted_contact.contact[a][h][f]) continue;
        for (int t = 0; t < 5; ++t) {
          const Vec3 local = transposed_mul(
              rot, tips[static_cast<std::size_t>(h * 5 + t)] -
                       seq.object.translations[f]);
          double best = 1e9;
          for (const Vec3& c : cons.hands[static_cast<std::size_t>(a * 2 + h)]) {
            best = std::min(best, norm(local - c));
          }
          sum += best;
          ++count;
        }
      }
    }
  }
  CHECK(sum / static_cast<double>(count) < 0.03);
  CHECK(min_z >= -1e-3);
}

TEST_CASE("human retarget rejects an all-empty constraint") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 10, box, body, 2);
  morph::ContactConstraint empty;
  try {
    retarget::retarget_human_motion(scene.sequence, scene.sequence.object,
                                    empty, scene.scripted_contact, body, body,
                                    LossWeights{}, opt::OptimConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.type() == "EmptyConstraint");
    CHECK(e.category() == ErrorCategory::kConfig);
  }
}

TEST_CASE("human retarget rejects mismatched frame counts") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 10, box, body, 2);
  morph::ContactConstraint cons =
      source_contact_points(scene.sequence, scene.scripted_contact, body);
  motion::ObjectTrack shorter = scene.sequence.object;
  shorter.rotations.pop_back();
  shorter.translations.pop_back();
  CHECK_THROWS_AS(retarget::retarget_human_motion(
                      scene.sequence, shorter, cons, scene.scripted_contact,
                      body, body, LossWeights{}, opt::OptimConfig{}),
                  ConfigError);
}

TEST_CASE("fit gradient matches finite differences") {
  geom::TriMesh box = geom::make_box({0.24, 0.30, 0.20});
  body::ArticulatedBody body = body::default_body();
  motion::ToyScene scene =
      motion::generate_toy_scene(motion::ToyKind::kCarry, 10, box, body, 13);
  std::vector<body::Pose> truth(scene.sequence.agents[0].begin(),
                                scene.sequence.agents[0].begin() + 3);
  FitTargets tg = targets_from_poses(body, truth);
  FitObjective objective(tg, body, FitWeights{});
  std::vector<double> x = FitObjective::pack(truth);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-0.03, 0.03);
  for (double& v : x) v += d(rng);
  const opt::GradCheckReport rep = opt::grad_check(objective, x, 1e-3);
  CHECK(rep.pass);
}

TEST_CASE("fit recovers the track that generated its targets") {
  body::ArticulatedBody body = body::default_body();
  std::vector<body::Pose> truth;
  const int n = 40;
  for (int f = 0; f < n; ++f) {
    const double s = static_cast<double>(f) / (n - 1);
    body::Pose p;
    p.root_transl = {0.05 * std::sin(2.0 * s), 0.02 * s,
                     0.95 + 0.01 * std::sin(3.0 * s)};
    p.root_orient = {0.0, 0.0, 0.1 * std::sin(1.7 * s)};
    for (int j = 0; j + 1 < body::kJointCount; ++j) {
      const double ph = 0.37 * j;
      p.theta[static_cast<std::size_t>(j)] = {0.16 * std::sin(1.3 * s + ph),
                                              0.12 * std::sin(1.9 * s + 2.0 * ph),
                                              0.08 * std::sin(2.3 * s + 3.0 * ph)};
    }
    truth.push_back(p);
  }
  FitTargets tg = targets_from_poses(body, truth);

  opt::OptimConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.iterations = 800;
  FitResult res = retarget::fit_pose_sequence(tg, body, FitWeights{}, cfg);
  CHECK(mpjpe_mm(body, res.poses, truth) < 5.0);

  // The body regularizer shrinks the recovered joint angles.
  FitWeights no_reg;
  no_reg.body = 0.0;
  FitResult unreg = retarget::fit_pose_sequence(tg, body, no_reg, cfg);
  double n_reg = 0.0;
  double n_unreg = 0.0;
  for (std::size_t f = 0; f < res.poses.size(); ++f) {
    for (int j = 0; j + 1 < body::kJointCount; ++j) {
      n_reg += norm_sq(res.poses[f].theta[static_cast<std::size_t>(j)]);
      n_unreg += norm_sq(unreg.poses[f].theta[static_cast<std::size_t>(j)]);
    }
  }
  CHECK(n_reg <= n_unreg);

  // A single-frame problem is legal and converges.
  FitTargets one;
  one.joint_positions = {tg.joint_positions[5]};
  one.joint_orientations = {tg.joint_orientations[5]};
  one.fingertips = {tg.fingertips[5]};
  FitResult single = retarget::fit_pose_sequence(one, body, FitWeights{}, cfg);
  CHECK(mpjpe_mm(body, single.poses, {truth[5]}) < 5.0);
}

TEST_CASE("fit targets validate their shape") {
  body::ArticulatedBody body = body::default_body();
  FitTargets empty;
  CHECK_THROWS_AS(retarget::fit_pose_sequence(empty, body, FitWeights{},
                                              opt::OptimConfig{}),
                  ConfigError);
  std::vector<body::Pose> truth(2);
  FitTargets tg = targets_from_poses(body, truth);
  tg.fingertips.pop_back();
  CHECK_THROWS_AS(tg.validate(), ConfigError);
}
