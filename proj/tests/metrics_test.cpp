// Copyright 2026 The polytraj Authors
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

#include "polytraj/metrics.hpp"
#include "polytraj/polyfit.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace
{

using namespace polytraj;
using polytraj::testing::stamps;
using polytraj::testing::track_from;

TEST(DisplacementError, Examples)
{
  const auto ts = stamps(4.0, 1.0);
  const auto label = track_from(ts, [](double t) { return t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_EQ(displacement_error(label, label, 2.0), 0.0);
  const auto off = track_from(ts, [](double t) { return t + 3; }, [](double) { return 4.0; }, [](double) { return 0.0; });
  EXPECT_DOUBLE_EQ(displacement_error(off, label, 2.0), 5.0);
}

TEST(DisplacementError, InterpolatedConstantAcceleration)
{
  const auto ts = stamps(4.0, 1.0);
  const auto truth = track_from(ts, [](double t) { return t * t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  const std::vector<double> sup{0.0, 2.0};
  EXPECT_NEAR(displacement_error(truth.subset(sup), truth, 1.0), 2.0 * 4.0 / 8.0, 1e-12);
}

TEST(HeadingError, Examples)
{
  const auto a = SE2Pose::from_angle(0, 0, 0.3);
  EXPECT_NEAR(heading_error_deg(a, a), 0.0, 1e-12);
  EXPECT_NEAR(heading_error_deg(SE2Pose::from_angle(0, 0, 0), SE2Pose::from_angle(0, 0, std::numbers::pi / 2)), 90.0, 1e-12);
  const double deg = std::numbers::pi / 180.0;
  EXPECT_NEAR(heading_error_deg(SE2Pose::from_angle(0, 0, 359 * deg), SE2Pose::from_angle(0, 0, 1 * deg)), 2.0, 1e-9);
  EXPECT_NEAR(heading_error_deg(SE2Pose{0, 0, 0, 1}, SE2Pose{0, 0, 0, -1}), 180.0, 1e-12);
}

TEST(HeadingError, SymmetricAndRigidInvariant)
{
  std::mt19937_64 gen(16);
  std::uniform_real_distribution<double> U(-3.2, 3.2);
  for (int i = 0; i < 500; ++i) {
    const auto a = SE2Pose::from_angle(U(gen), U(gen), U(gen));
    const auto b = SE2Pose::from_angle(U(gen), U(gen), U(gen));
    const double e = heading_error_deg(a, b);
    EXPECT_NEAR(e, heading_error_deg(b, a), 1e-9);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 180.0);
    const double r = U(gen);
    const auto ra = SE2Pose::from_angle(0, 0, a.angle() + r);
    const auto rb = SE2Pose::from_angle(0, 0, b.angle() + r);
    EXPECT_NEAR(heading_error_deg(ra, rb), e, 1e-9);
  }
}

TEST(HeadingError, UnavailableWithoutHeading)
{
  const auto ts = stamps(1.0, 1.0);
  const auto ped = track_from(ts, [](double t) { return t; }, [](double) { return 0.0; }, nullptr, false);
  try {
    heading_error(ped, ped, 0.0);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::kHeadingUnavailable);
  }
}

TEST(DisplacementError, RigidTransformInvariance)
{
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> U(-5, 5);
  const auto ts = stamps(4.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    const double a = U(gen), b = U(gen), r = U(gen), tx = U(gen), ty = U(gen);
    auto path = [&](double t, double sx) { return Vec2{sx + a * t, b * std::sin(t)}; };
    auto place = [&](double sx, double rr, Vec2 tr) {
      std::vector<SE2Pose> poses;
      for (double t : ts) {
        const Vec2 p = path(t, sx);
        const double c = std::cos(rr), s = std::sin(rr);
        poses.push_back(SE2Pose::from_angle(c * p.x - s * p.y + tr.x, s * p.x + c * p.y + tr.y, 0.2 * t + rr));
      }
      return WaypointTrack(ts, poses);
    };
    const auto pred = place(0.7, 0.0, {0, 0});
    const auto label = place(0.0, 0.0, {0, 0});
    const auto pred_m = place(0.7, r, {tx, ty});
    const auto label_m = place(0.0, r, {tx, ty});
    for (double t : ts) {
      EXPECT_NEAR(displacement_error(pred, label, t), displacement_error(pred_m, label_m, t), 1e-9);
    }
  }
}

TEST(EvaluateBatch, MeansCountsAndFilter)
{
  const auto ts = stamps(4.0, 1.0);
  const auto label = track_from(ts, [](double t) { return 5 * t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto p1 = track_from(ts, [](double t) { return 5 * t + 1; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto p3 = track_from(ts, [](double t) { return 5 * t; }, [](double) { return 3.0; }, [](double) { return 0.0; });
  const auto still = track_from(ts, [](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  EvalSpec spec;
  spec.eval_times = {2.0};
  spec.min_speed_filter = 0.2;
  spec.per_time_report = true;
  const std::vector<WaypointTrack> preds{p1, p3, label};
  const std::vector<WaypointTrack> labels{label, label, still};
  const auto rep = evaluate_batch<WaypointTrack>(preds, labels, spec, "WP");
  EXPECT_EQ(rep.counts[0], 2u);
  EXPECT_DOUBLE_EQ(rep.de_per_time[0], 2.0);
  EXPECT_EQ(rep.per_actor_de[0], (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(rep.representation, "WP");

  const std::vector<WaypointTrack> one{label};
  const auto self = evaluate_batch<WaypointTrack>(one, one, EvalSpec{{0.0, 1.0, 4.0}}, "");
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(self.de_per_time[i], 0.0);
    EXPECT_EQ(self.dtheta_per_time[i], 0.0);
  }

  const std::vector<WaypointTrack> only_still{still};
  const auto empty = evaluate_batch<WaypointTrack>(only_still, only_still, spec, "");
  EXPECT_EQ(empty.counts[0], 0u);
  EXPECT_TRUE(std::isnan(empty.de_per_time[0]));

  EXPECT_THROW(evaluate_batch<WaypointTrack>(one, labels, spec, ""), Error);
  EXPECT_THROW(evaluate_batch<WaypointTrack>(one, one, EvalSpec{{2.0, 1.0}}, ""), Error);
}

TEST(EvaluateBatch, MeanEqualsIndependentRecomputation)
{
  std::mt19937_64 gen(18);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto ts = stamps(4.0, 0.1);
  std::vector<WaypointTrack> labels;
  std::vector<PolyTraj> preds;
  for (int i = 0; i < 40; ++i) {
    const double a = U(gen), w = U(gen);
    labels.push_back(track_from(ts, [&](double t) { return 6 * t + a * t * t; }, [&](double t) { return std::sin(w * t); },
      [&](double t) { return w * t; }));
    preds.push_back(fit_label(labels.back().subset(std::vector<double>{0, 2, 4}), {4.6, 2}, {2, 2, 4.0, 0}).traj);
  }
  EvalSpec spec;
  spec.eval_times = {1.0, 3.0};
  const auto rep = evaluate_batch<PolyTraj>(preds, labels, spec, "P2");
  for (std::size_t k = 0; k < 2; ++k) {
    double de = 0, dth = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const SE2Pose p = eval_pose(preds[i], spec.eval_times[k]);
      const SE2Pose l = labels[i].pose_at_stamp(spec.eval_times[k]);
      de += std::hypot(p.x - l.x, p.y - l.y);
      double d = std::abs(p.angle() - l.angle());
      d = std::min(d, 2 * std::numbers::pi - d);
      dth += d * 180.0 / std::numbers::pi;
    }
    EXPECT_NEAR(rep.de_per_time[k], de / 40, 1e-12);
    EXPECT_NEAR(rep.dtheta_per_time[k], dth / 40, 1e-9);
  }
}

TEST(EvaluateBatch, ModeSets)
{
  const auto ts = stamps(2.0, 1.0);
  const auto label = track_from(ts, [](double t) { return 2 * t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  PolyTraj near, far;
  near.horizon_T = far.horizon_T = 2.0;
  near.channel(Channel::kX) = {0.5, 4.0};
  far.channel(Channel::kX) = {10.0, 4.0};
  const std::vector<ModeSet<PolyTraj>> sets{ModeSet<PolyTraj>({near, far}, {0.2, 0.8})};
  const std::vector<WaypointTrack> labels{label};
  EvalSpec spec;
  spec.eval_times = {1.0};
  EXPECT_DOUBLE_EQ(evaluate_batch<ModeSet<PolyTraj>>(sets, labels, spec).de_per_time[0], 10.0);
  spec.min_over_modes = true;
  EXPECT_DOUBLE_EQ(evaluate_batch<ModeSet<PolyTraj>>(sets, labels, spec).de_per_time[0], 0.5);
}

TEST(LabelSpeed, CentralAndOneSided)
{
  const auto ts = stamps(2.0, 1.0);
  const auto label = track_from(ts, [](double t) { return t * t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_DOUBLE_EQ(label_speed(label, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(label_speed(label, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(label_speed(label, 2.0), 3.0);
  EXPECT_THROW(label_speed(label, 0.5), Error);
}

}  // namespace
