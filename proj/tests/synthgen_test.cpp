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

#include "polytraj/kinematics.hpp"
#include "polytraj/synthgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace
{

using namespace polytraj;

GenConfig fixed_vehicle(double v, double acc, double kappa, double horizon = 4.0)
{
  GenConfig g = GenConfig::defaults(ActorClass::kVehicle);
  g.horizon = horizon;
  g.fixed_speed = v;
  g.fixed_lon_acc = acc;
  g.fixed_curvature = kappa;
  g.fixed_start = SE2Pose::from_angle(0, 0, 0);
  return g;
}

TEST(GenBicycle, ZeroControlsStraightLine)
{
  const auto a = gen_bicycle_actor(fixed_vehicle(5.0, 0.0, 0.0), 0);
  for (std::size_t i = 0; i < a.track.size(); ++i) {
    const auto & p = a.track.poses()[i];
    EXPECT_NEAR(p.x, 5.0 * a.track.times()[i], 1e-9);
    EXPECT_NEAR(p.y, 0.0, 1e-12);
  }
  const auto st = feasibility_stats(track_derivatives(a.track));
  EXPECT_NEAR(st.max_lon_acc, 0.0, 1e-9);
  EXPECT_NEAR(st.max_lat_acc, 0.0, 1e-9);
  EXPECT_NEAR(st.max_lat_speed, 0.0, 1e-9);
}

TEST(GenBicycle, ConstantCurvatureCircle)
{
  GenConfig g = fixed_vehicle(5.0, 0.0, 0.04, 8.0);
  g.wheelbase = 0.0;
  const auto a = gen_bicycle_actor(g, 0);
  // circle of radius 25 centred at (0, 25)
  for (const auto & p : a.track.poses()) {
    EXPECT_NEAR(std::hypot(p.x, p.y - 25.0), 25.0, 1e-6);
  }
  const auto ks = track_derivatives(a.track);
  const auto st = feasibility_stats(ks);
  EXPECT_NEAR(st.max_lat_acc, 1.0, 2e-3);

  // centroid 1.4 m ahead of the rear axle rides a larger circle about (-1.4, 25)
  const auto b = gen_bicycle_actor(fixed_vehicle(5.0, 0.0, 0.04, 8.0), 0);
  const double rc = std::hypot(25.0, 1.4);
  const double omega = 5.0 * 0.04;
  for (const auto & p : b.track.poses()) {
    EXPECT_NEAR(std::hypot(p.x + 1.4, p.y - 25.0), rc, 1e-6);
  }
  // velocity is tangent to the larger circle: purely centripetal acceleration,
  // and a slip of omega wb/2 across the heading
  const auto kb = track_derivatives(b.track);
  const auto sb = feasibility_stats(kb);
  EXPECT_NEAR(sb.max_lat_acc, omega * omega * rc, 2e-3);
  EXPECT_NEAR(sb.min_lon_acc, 0.0, 2e-3);
  EXPECT_NEAR(sb.max_lon_acc, 0.0, 2e-3);
  const auto & mid = kb[kb.size() / 2];
  EXPECT_NEAR(std::abs(cross(mid.v, mid.h)), omega * 1.4, 1e-3);
}

TEST(GenBicycle, DefaultBoundsAndGeometry)
{
  GenConfig g = GenConfig::defaults(ActorClass::kVehicle);
  g.count = 1000;
  g.seed = 5;
  const auto actors = gen_bicycle(g);
  for (const auto & a : actors) {
    double max_abs = 0;
    for (std::size_t i = 0; i < a.track.size(); ++i) {
      EXPECT_LE(std::abs(a.lon_acc[i]), 8.0);
      EXPECT_LE(std::abs(a.curvature[i]), 0.2);
      EXPECT_GE(a.speed[i], 0.0);
      max_abs = std::max(max_abs, std::abs(a.lon_acc[i]));
      const auto & p = a.track.poses()[i];
      EXPECT_NEAR(p.s * p.s + p.c * p.c, 1.0, 1e-12);
      const Vec2 vc = bicycle_centroid_velocity(p.angle(), a.speed[i], a.curvature[i], a.wheelbase);
      const double lat = std::abs(cross(vc, p.heading()));
      EXPECT_LE(lat, std::abs(a.curvature[i]) * a.speed[i] * a.wheelbase / 2 + 1e-9);
    }
    for (std::size_t i = 1; i < a.curvature.size(); ++i) {
      EXPECT_LE(std::abs(a.curvature[i] - a.curvature[i - 1]), g.curvature_rate_max * g.dt + 1e-12);
    }
    EXPECT_LE(max_abs, 8.0);
  }
}

TEST(GenBicycle, DeterministicPerSeedAndIndex)
{
  GenConfig g = GenConfig::defaults(ActorClass::kBicyclist);
  g.count = 20;
  g.seed = 42;
  const auto a = generate(g);
  const auto b = generate(g);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].track, b[i].track);
    EXPECT_EQ(gen_bicycle_actor(g, i).track, a[i].track);
  }
  g.seed = 43;
  EXPECT_NE(generate(g)[0].track, a[0].track);
}

TEST(GenConfig, Validation)
{
  GenConfig g;
  g.horizon = 1.05;
  g.dt = 0.1;
  EXPECT_THROW(g.validate(), Error);
  g = GenConfig{};
  g.dt = 0;
  EXPECT_THROW(g.validate(), Error);
  g = GenConfig{};
  g.speed_max = -1;
  EXPECT_THROW(g.validate(), Error);
  g = GenConfig::defaults(ActorClass::kPedestrian);
  EXPECT_THROW(gen_bicycle(g), Error);
  EXPECT_THROW(parse_actor_class("truck"), Error);
  EXPECT_EQ(parse_actor_class("pedestrian"), ActorClass::kPedestrian);
}

TEST(GenPedestrian, ZeroNoiseWalksStraight)
{
  GenConfig g = GenConfig::defaults(ActorClass::kPedestrian);
  g.ou_sigma = 0.0;
  const auto a = gen_pedestrian_actor(g, 3);
  EXPECT_FALSE(a.track.has_heading());
  const auto ks = track_derivatives(a.track);
  for (const auto & k : ks) {
    if (k.has_acceleration) EXPECT_LT(norm(k.a), 1e-9);
  }
}

TEST(GenPedestrian, SpeedsInsideRange)
{
  GenConfig g = GenConfig::defaults(ActorClass::kPedestrian);
  g.count = 10000;
  g.seed = 8;
  const auto ps = gen_pedestrian(g);
  double sum = 0;
  std::size_t n = 0;
  for (const auto & a : ps) {
    const auto & poses = a.track.poses();
    for (std::size_t i = 1; i < poses.size(); ++i) {
      const double v = norm(poses[i].position() - poses[i - 1].position()) / g.dt;
      EXPECT_LE(v, g.speed_max + 1e-9);
      EXPECT_GE(v, g.speed_min - 1e-9);
      sum += v;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  EXPECT_GE(mean, 0.9 * g.speed_min);
  EXPECT_LE(mean, 1.1 * g.speed_max);
  EXPECT_EQ(gen_pedestrian(g)[17].track, ps[17].track);
}

TEST(ObservationNoise, ZeroSigmaAndDeterminism)
{
  GenConfig g = GenConfig::defaults(ActorClass::kVehicle);
  g.count = 2;
  const auto actors = generate(g);
  EXPECT_EQ(add_observation_noise(actors[0], 0.0, 0.0, 1), actors[0].track);
  const auto a = add_observation_noise(actors[0], 0.1, 0.05, 7);
  const auto b = add_observation_noise(actors[0], 0.1, 0.05, 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, actors[0].track);
  EXPECT_NE(add_observation_noise(actors[0], 0.1, 0.05, 8), a);
  for (const auto & p : a.poses()) {
    EXPECT_NEAR(p.s * p.s + p.c * p.c, 1.0, 1e-12);
  }
  EXPECT_THROW(add_observation_noise(actors[0], -0.1, 0.0, 1), Error);
}

TEST(ObservationNoise, SecondDifferenceStd)
{
  GenConfig g = GenConfig::defaults(ActorClass::kVehicle);
  g.count = 300;
  g.horizon = 4.0;
  const auto actors = generate(g);
  double sq = 0;
  std::size_t n = 0;
  for (const auto & a : actors) {
    const auto clean = track_derivatives(a.track);
    const auto noisy = track_derivatives(add_observation_noise(a, 0.1, 0.0, 3));
    for (std::size_t i = 0; i < clean.size(); ++i) {
      if (!clean[i].has_acceleration) continue;
      const Vec2 e = noisy[i].a - clean[i].a;
      sq += e.x * e.x + e.y * e.y;
      n += 2;
    }
  }
  ASSERT_GE(n, 10000u);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(n)), 0.1 * std::sqrt(6.0) / 0.01, 0.1 * 24.49);
}

TEST(Rng, PortableMoments)
{
  Rng r(1, 2, 3);
  double s = 0, s2 = 0, l1 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    l1 += std::abs(r.laplace(0.7));
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  EXPECT_NEAR(l1 / n, 0.7, 0.01);
  Rng a(5, 6), b(5, 6), c(5, 7);
  EXPECT_EQ(a.uniform(), b.uniform());
  EXPECT_NE(b.uniform(), c.uniform());
}

}  // namespace
