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

#include "polytraj/polyfit.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace
{

using namespace polytraj;
using polytraj::testing::stamps;
using polytraj::testing::track_from;

const OrientedBox kBox{4.6, 2.0};

TEST(FitLabel, StationaryLabelAnyDegree)
{
  const auto ts = stamps(4.0, 0.1);
  const auto label = track_from(ts, [](double) { return 3.0; }, [](double) { return -7.0; }, [](double) { return 0.4; });
  for (int d = 0; d <= 4; ++d) {
    const auto r = fit_label(label, kBox, {d, d, 4.0, 0.0});
    EXPECT_LT(r.max_corner_error, 1e-9) << "degree " << d;
  }
}

TEST(FitLabel, RecoversChangeOfBasisCoefficients)
{
  const auto ts = stamps(4.0, 0.1);
  const auto label = track_from(
    ts, [](double t) { return 3 * t + 0.5 * t * t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto r = fit_label(label, kBox, {2, 2, 4.0, 0.0});
  const auto & cx = r.traj.channel(Channel::kX);
  ASSERT_EQ(cx.size(), 3u);
  EXPECT_NEAR(cx[0], 0.0, 1e-9);
  EXPECT_NEAR(cx[1], 12.0, 1e-9);
  EXPECT_NEAR(cx[2], 8.0, 1e-9);
  EXPECT_LT(r.total_sq_corner_error, 1e-9);
  EXPECT_LT(r.max_corner_error, 1e-9);
}

TEST(FitLabel, UnderfitMatchesNormalEquationOracle)
{
  const auto ts = stamps(4.0, 0.1);
  const auto label = track_from(ts, [](double t) { return t * t; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto r = fit_label(label, kBox, {1, 1, 4.0, 0.0});
  EXPECT_GT(r.total_sq_corner_error, 1e-3);
  const auto x = polytraj::testing::corner_lsq_oracle(label, kBox, 1, 1, 4.0);
  const std::vector<double> got{r.traj.channel(Channel::kX)[0], r.traj.channel(Channel::kX)[1],
    r.traj.channel(Channel::kY)[0], r.traj.channel(Channel::kY)[1], r.traj.channel(Channel::kSin)[0],
    r.traj.channel(Channel::kSin)[1], r.traj.channel(Channel::kCos)[0], r.traj.channel(Channel::kCos)[1]};
  for (int j = 0; j < 8; ++j) {
    EXPECT_NEAR(got[static_cast<std::size_t>(j)], x(j), 1e-8) << "coefficient " << j;
  }
}

TEST(FitLabel, RandomCurvedLabelsMatchOracle)
{
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto ts = stamps(4.0, 0.1);
  for (int i = 0; i < 20; ++i) {
    const double a = U(gen), b = U(gen), w = U(gen);
    const auto label = track_from(
      ts, [&](double t) { return 5 * t + a * std::sin(t); }, [&](double t) { return b * t * t; },
      [&](double t) { return w * std::sin(0.7 * t); });
    for (int d = 1; d <= 3; ++d) {
      const auto r = fit_label(label, kBox, {d, d, 4.0, 0.0});
      const auto x = polytraj::testing::corner_lsq_oracle(label, kBox, d, d, 4.0);
      for (std::size_t n = 0; n <= static_cast<std::size_t>(d); ++n) {
        EXPECT_NEAR(r.traj.channel(Channel::kX)[n], x(static_cast<Eigen::Index>(n)), 1e-7);
        EXPECT_NEAR(r.traj.channel(Channel::kSin)[n], x(2 * (d + 1) + static_cast<Eigen::Index>(n)), 1e-7);
      }
    }
  }
}

TEST(FitLabel, ObjectiveConsistency)
{
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> U(-2, 2);
  const auto ts = stamps(8.0, 0.1);
  for (int i = 0; i < 30; ++i) {
    const double a = U(gen), w = U(gen);
    const auto label = track_from(
      ts, [&](double t) { return 4 * t + a * std::cos(t); }, [&](double t) { return a * std::sin(0.5 * t); },
      [&](double t) { return 0.2 * w * t; });
    const auto r = fit_label(label, kBox, {2, 2, 8.0, 0.0});
    const double explicit_sum = polytraj::testing::raw_corner_sq_error(r.traj, label, kBox);
    EXPECT_NEAR(r.total_sq_corner_error, explicit_sum, 1e-8 * std::max(1.0, explicit_sum));
  }
}

TEST(FitLabel, NestedModelMonotonicity)
{
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto ts = stamps(4.0, 0.1);
  for (int i = 0; i < 30; ++i) {
    const double a = U(gen), w = U(gen);
    const auto label = track_from(
      ts, [&](double t) { return 8 * t + a * t * t * t; }, [&](double t) { return std::exp(0.3 * a * t); },
      [&](double t) { return w * std::sin(t); });
    double prev = INFINITY;
    for (int d = 0; d <= 6; ++d) {
      const auto r = fit_label(label, kBox, {d, d, 4.0, 0.0});
      EXPECT_LE(r.total_sq_corner_error, prev * (1 + 1e-9) + 1e-12);
      prev = r.total_sq_corner_error;
      // raising one degree only
      const auto rx = fit_label(label, kBox, {d + 1, d, 4.0, 0.0});
      const auto rh = fit_label(label, kBox, {d, d + 1, 4.0, 0.0});
      EXPECT_LE(rx.total_sq_corner_error, r.total_sq_corner_error * (1 + 1e-9) + 1e-12);
      EXPECT_LE(rh.total_sq_corner_error, r.total_sq_corner_error * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST(FitLabel, ExactRecoveryAtOrAboveGeneratingDegree)
{
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  const auto ts = stamps(4.0, 0.1);
  for (int d = 0; d <= 4; ++d) {
    for (int i = 0; i < 20; ++i) {
      PolyTraj p = polytraj::testing::random_poly(gen, d, 0, 4.0, 20.0);
      const double a = ang(gen);
      p.channel(Channel::kSin) = {std::sin(a)};
      p.channel(Channel::kCos) = {std::cos(a)};
      const auto label = sample_waypoints(p, ts);
      for (int fd = d; fd <= 5; ++fd) {
        EXPECT_LT(fit_label(label, kBox, {fd, fd, 4.0, 0.0}).max_corner_error, 1e-7);
      }
    }
  }
}

TEST(FitLabel, TranslationEquivariance)
{
  const auto ts = stamps(4.0, 0.1);
  const auto label = track_from(
    ts, [](double t) { return 2 * t + std::sin(t); }, [](double t) { return 0.3 * t * t; }, [](double t) { return 0.1 * t; });
  const auto moved = track_from(
    ts, [](double t) { return 2 * t + std::sin(t) + 130.0; }, [](double t) { return 0.3 * t * t - 45.0; },
    [](double t) { return 0.1 * t; });
  const auto a = fit_label(label, kBox, {2, 2, 4.0, 0.0});
  const auto b = fit_label(moved, kBox, {2, 2, 4.0, 0.0});
  EXPECT_NEAR(b.traj.channel(Channel::kX)[0] - a.traj.channel(Channel::kX)[0], 130.0, 1e-9);
  EXPECT_NEAR(b.traj.channel(Channel::kY)[0] - a.traj.channel(Channel::kY)[0], -45.0, 1e-9);
  EXPECT_NEAR(b.total_sq_corner_error, a.total_sq_corner_error, 1e-10);
}

TEST(FitLabel, ErrorsAndRidge)
{
  const WaypointTrack few({0.0, 1.0}, {SE2Pose{}, SE2Pose{1}});
  try {
    fit_label(few, kBox, {2, 2, 4.0, 0.0});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
  // u^2 underflows to 0 on these stamps, leaving an all-zero column.
  const std::vector<double> ts{0.0, 1e-300, 2e-300};
  const WaypointTrack tiny(ts, {SE2Pose{}, SE2Pose{}, SE2Pose{}});
  try {
    fit_label(tiny, kBox, {2, 2, 1.0, 0.0});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
  const auto ridged = fit_label(tiny, kBox, {2, 2, 1.0, 1e-6});
  EXPECT_TRUE(ridged.condition_warning);
  EXPECT_LT(ridged.max_corner_error, 1e-9);
  try {
    fit_label(few, kBox, {13, 2, 4.0, 0.0});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(FitLabel, HeadingFreeLabelFitsCentroid)
{
  const auto ts = stamps(4.0, 0.1);
  const auto label = track_from(ts, [](double t) { return t; }, [](double t) { return t * t; }, nullptr, false);
  const auto r = fit_label(label, {0.6, 0.6}, {2, 2, 4.0, 0.0});
  EXPECT_LT(r.max_corner_error, 1e-9);
  EXPECT_EQ(r.traj.channel(Channel::kSin), std::vector<double>{0.0});
  EXPECT_EQ(r.traj.channel(Channel::kCos), std::vector<double>{1.0});
}

TEST(MaxCornerError, IdentityOffsetRotation)
{
  const auto ts = stamps(2.0, 0.5);
  const auto label = track_from(ts, [](double t) { return t; }, [](double) { return 0.0; }, [](double) { return 0.3; });
  EXPECT_EQ(max_corner_error(label, label, {4, 2}), 0.0);
  const auto shifted = track_from(ts, [](double t) { return t + 0.3; }, [](double) { return 0.4; }, [](double) { return 0.3; });
  EXPECT_NEAR(max_corner_error(shifted, label, {4, 2}), 0.5, 1e-12);
  const double dth = 0.1;
  const auto rotated = track_from(ts, [](double t) { return t; }, [](double) { return 0.0; }, [&](double) { return 0.3 + dth; });
  // chord of a rotation about the centroid at the half-diagonal radius
  const double radius = std::sqrt(16.0 + 4.0) / 2.0;
  EXPECT_NEAR(max_corner_error(rotated, label, {4, 2}), 2.0 * std::sin(dth / 2.0) * radius, 1e-12);
  const std::vector<double> bad{0.25};
  EXPECT_THROW(max_corner_error(label, label, {4, 2}, bad), Error);
}

TEST(MaxCornerError, DominatesCentroidError)
{
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto ts = stamps(4.0, 0.1);
  for (int i = 0; i < 50; ++i) {
    const double a = U(gen), w = U(gen);
    const auto label = track_from(ts, [&](double t) { return a * t * t * t; }, [&](double t) { return std::sin(a * t); },
      [&](double t) { return w * t; });
    const auto fit = fit_label(label, kBox, {1, 1, 4.0, 0.0});
    for (double t : ts) {
      const std::vector<double> one{t};
      const double ce = norm(eval_pose(fit.traj, t).position() - label.pose_at_stamp(t).position());
      EXPECT_GE(max_corner_error(fit.traj, label, kBox, one) + 1e-12, ce);
    }
  }
}

TEST(CumulativeCurve, Examples)
{
  EXPECT_EQ(cumulative_error_curve(std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{0.15, 0.25, 1.0}),
    (std::vector<double>{1.0 / 3.0, 2.0 / 3.0, 1.0}));
  EXPECT_EQ(cumulative_error_curve(std::vector<double>{0, 0, 0}, std::vector<double>{0.01}), std::vector<double>{1.0});
  EXPECT_THROW(cumulative_error_curve(std::vector<double>{}, std::vector<double>{1.0}), Error);
  EXPECT_THROW(cumulative_error_curve(std::vector<double>{1}, std::vector<double>{1.0, 0.5}), Error);
}

TEST(CumulativeCurve, MonotoneInUnitInterval)
{
  std::mt19937_64 gen(2);
  std::exponential_distribution<double> E(2.0);
  std::vector<double> errs(500);
  for (auto & e : errs) e = E(gen);
  std::vector<double> thr;
  for (int k = 0; k <= 400; ++k) thr.push_back(k * 0.01);
  const auto c = cumulative_error_curve(errs, thr);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_GE(c[i], 0.0);
    EXPECT_LE(c[i], 1.0);
    if (i > 0) EXPECT_GE(c[i], c[i - 1]);
  }
}

}  // namespace
