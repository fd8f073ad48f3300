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

// Seeded synthetic actors: kinematic-bicycle vehicles and bicyclists, and
// pedestrians following a smoothed random walk.

#ifndef POLYTRAJ_SYNTHGEN_HPP_
#define POLYTRAJ_SYNTHGEN_HPP_

#include "polytraj/error.hpp"
#include "polytraj/traj_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace polytraj
{

enum class ActorClass { kVehicle, kBicyclist, kPedestrian };

constexpr std::string_view to_string(ActorClass c)
{
  switch (c) {
    case ActorClass::kVehicle: return "vehicle";
    case ActorClass::kBicyclist: return "bicyclist";
    case ActorClass::kPedestrian: return "pedestrian";
  }
  return "vehicle";
}

inline ActorClass parse_actor_class(std::string_view s)
{
  if (s == "vehicle") return ActorClass::kVehicle;
  if (s == "bicyclist") return ActorClass::kBicyclist;
  if (s == "pedestrian") return ActorClass::kPedestrian;
  throw Error(ErrorCode::kInvalidConfig, "unknown actor class '" + std::string(s) + "'");
}

/// Deterministic random stream keyed by (seed, stream, tag). Uniform and
/// normal variates are derived from raw 64-bit draws so sequences do not
/// depend on the standard library's distribution implementations.
class Rng
{
public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag = 0)
  : gen_(mix(mix(seed) ^ mix(stream + 0x9e3779b97f4a7c15ULL) ^ mix(tag + 0xbf58476d1ce4e5b9ULL)))
  {
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal()
  {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  double normal(double mean, double sd) { return mean + sd * normal(); }

  double laplace(double b)
  {
    const double u = uniform() - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return -b * sign * std::log1p(-2.0 * std::abs(u));
  }

  static constexpr std::uint64_t mix(std::uint64_t z)
  {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::mt19937_64 gen_;
};

struct GenConfig
{
  ActorClass actor_class = ActorClass::kVehicle;
  double horizon = 4.0;
  double dt = 0.1;
  std::size_t count = 1;
  std::uint64_t seed = 0;

  // Control clip bounds.
  double lon_acc_min = -8.0;
  double lon_acc_max = 8.0;
  double curvature_max = 0.2;
  double jerk_max = 1.0;             // m/s^3
  double curvature_rate_max = 0.05;  // 1/(m s)

  double speed_min = 0.0;
  double speed_max = 20.0;

  double box_length = 4.6;
  double box_width = 2.0;
  double wheelbase = 2.8;

  // Random control profile: knot spacing and spread.
  double knot_spacing_min = 4.0;
  double knot_spacing_max = 8.0;
  double acc_knot_sigma = 0.4;
  double curvature_knot_sigma = 0.002;

  // Pedestrian velocity process.
  double ou_reversion = 0.5;  // 1/s
  double ou_sigma = 0.3;      // m/s per sqrt(s)

  // Deterministic overrides (mainly for tests): constant controls, start
  // speed and start pose.
  std::optional<double> fixed_lon_acc;
  std::optional<double> fixed_curvature;
  std::optional<double> fixed_speed;
  std::optional<SE2Pose> fixed_start;

  static GenConfig defaults(ActorClass c)
  {
    GenConfig cfg;
    cfg.actor_class = c;
    switch (c) {
      case ActorClass::kVehicle:
        break;
      case ActorClass::kBicyclist:
        cfg.speed_max = 8.0;
        cfg.box_length = 1.8;
        cfg.box_width = 0.6;
        cfg.wheelbase = 1.1;
        cfg.acc_knot_sigma = 0.3;
        cfg.curvature_knot_sigma = 0.006;
        cfg.curvature_rate_max = 0.1;
        break;
      case ActorClass::kPedestrian:
        cfg.speed_min = 0.3;
        cfg.speed_max = 2.0;
        cfg.box_length = 0.6;
        cfg.box_width = 0.6;
        cfg.wheelbase = 0.0;
        break;
    }
    return cfg;
  }

  std::size_t steps() const { return static_cast<std::size_t>(std::round(horizon / dt)); }

  void validate() const
  {
    auto fail = [](const char * what) { throw Error(ErrorCode::kInvalidConfig, what); };
    if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("horizon must be positive");
    const double ratio = horizon / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
      fail("horizon must be an integer multiple of dt");
    }
    for (double v : {lon_acc_min, lon_acc_max, curvature_max, jerk_max, curvature_rate_max,
           speed_min, speed_max, box_length, box_width, wheelbase, knot_spacing_min,
           knot_spacing_max, acc_knot_sigma, curvature_knot_sigma, ou_reversion, ou_sigma})
    {
      if (!std::isfinite(v)) fail("bounds must be finite");
    }
    if (lon_acc_min > 0.0 || lon_acc_max < 0.0) fail("lon acc bounds must bracket 0");
    if (curvature_max < 0.0 || jerk_max <= 0.0 || curvature_rate_max <= 0.0) {
      fail("curvature, jerk and curvature-rate bounds must be positive");
    }
    if (speed_min < 0.0 || speed_max < speed_min) fail("speed range invalid");
    if (!(box_length > 0.0) || !(box_width > 0.0)) fail("box dims must be positive");
    if (wheelbase < 0.0) fail("wheelbase must be >= 0");
    if (!(knot_spacing_min > 0.0) || knot_spacing_max < knot_spacing_min) fail("knot spacing invalid");
    if (acc_knot_sigma < 0.0 || curvature_knot_sigma < 0.0 || ou_reversion < 0.0 || ou_sigma < 0.0) {
      fail("spreads must be >= 0");
    }
  }
};

struct LabeledActor
{
  std::uint64_t id = 0;
  ActorClass actor_class = ActorClass::kVehicle;
  WaypointTrack track{{0.0}, {SE2Pose{}}};
  OrientedBox box;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  double dt = 0.1;
  double wheelbase = 0.0;
  // Bicycle controls and rear-axle speed per waypoint (empty for pedestrians).
  std::vector<double> lon_acc;
  std::vector<double> curvature;
  std::vector<double> speed;
};

namespace detail
{

// Catmull-Rom through (knot_t, knot_v), sampled on the step grid.
inline std::vector<double> spline_profile(
  const std::vector<double> & kt, const std::vector<double> & kv, std::size_t steps, double dt)
{
  std::vector<double> out(steps + 1);
  const std::size_t m = kt.size();
  std::size_t seg = 0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    while (seg + 2 < m && t > kt[seg + 1]) {
      ++seg;
    }
    const double h = kt[seg + 1] - kt[seg];
    const double w = std::clamp((t - kt[seg]) / h, 0.0, 1.0);
    auto slope = [&](std::size_t k) {
      const std::size_t lo = k == 0 ? 0 : k - 1;
      const std::size_t hi = std::min(k + 1, m - 1);
      return (kv[hi] - kv[lo]) / (kt[hi] - kt[lo]);
    };
    const double m0 = slope(seg) * h;
    const double m1 = slope(seg + 1) * h;
    const double w2 = w * w;
    const double w3 = w2 * w;
    out[i] = (2 * w3 - 3 * w2 + 1) * kv[seg] + (w3 - 2 * w2 + w) * m0 +
      (-2 * w3 + 3 * w2) * kv[seg + 1] + (w3 - w2) * m1;
  }
  return out;
}

// Rate-limits a sampled profile to |delta| <= rate * dt per step, then clips.
inline void rate_limit_and_clip(
  std::vector<double> & v, double rate, double dt, double lo, double hi)
{
  const double max_step = rate * dt;
  v[0] = std::clamp(v[0], lo, hi);
  for (std::size_t i = 1; i < v.size(); ++i) {
    v[i] = std::clamp(v[i - 1] + std::clamp(v[i] - v[i - 1], -max_step, max_step), lo, hi);
  }
}

struct BicycleState
{
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
};

struct Maneuver
{
  double v0 = 0.0;
  double acc_mean = 0.0;
  double acc_sigma = 0.0;
  double curv_mean = 0.0;
  double curv_sigma = 0.0;
  double hold_time = 0.0;  // stays at rest until this time
  bool stationary = false;
};

inline Maneuver draw_maneuver(const GenConfig & cfg, Rng & rng)
{
  const bool bike = cfg.actor_class == ActorClass::kBicyclist;
  const double cruise_lo = bike ? 2.0 : 3.0;
  const double cruise_hi = std::min(cfg.speed_max, bike ? 7.0 : 15.0);
  Maneuver m;
  m.acc_sigma = cfg.acc_knot_sigma;
  m.curv_sigma = cfg.curvature_knot_sigma;
  const double pick = rng.uniform();
  if (pick < 0.10) {
    m.stationary = true;
  } else if (pick < 0.14) {
    // braking to a stop
    m.v0 = rng.uniform(cruise_lo, 0.6 * cruise_hi);
    m.acc_mean = -1.5;
    m.acc_sigma = 0.3 * cfg.acc_knot_sigma;
    m.curv_sigma = 0.5 * cfg.curvature_knot_sigma;
  } else if (pick < 0.18) {
    // pulling away from rest
    m.v0 = 0.0;
    m.acc_mean = 1.0;
    m.acc_sigma = 0.5 * cfg.acc_knot_sigma;
    m.hold_time = rng.uniform(0.5, 2.0);
    m.curv_sigma = 0.5 * cfg.curvature_knot_sigma;
  } else if (pick < 0.28) {
    // slow turn
    m.v0 = rng.uniform(cruise_lo, std::max(cruise_lo, 0.5 * cruise_hi));
    m.curv_mean = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.02, bike ? 0.1 : 0.06);
    m.acc_sigma = 0.5 * cfg.acc_knot_sigma;
  } else {
    m.v0 = rng.uniform(cruise_lo, cruise_hi);
  }
  m.v0 = std::clamp(m.v0, cfg.speed_min, cfg.speed_max);
  return m;
}

}  // namespace detail

/// Centroid velocity of a bicycle whose rear axle moves at speed v with
/// curvature kappa: v h + (wheelbase / 2) v kappa h_perp.
inline Vec2 bicycle_centroid_velocity(double theta, double v, double kappa, double wheelbase)
{
  const Vec2 h{std::cos(theta), std::sin(theta)};
  const Vec2 hp{-h.y, h.x};
  return v * h + (0.5 * wheelbase * v * kappa) * hp;
}

/// One bicycle actor. The rear axle follows x' = v cos(theta),
/// y' = v sin(theta), theta' = v kappa, v' = a (RK4 at cfg.dt); the labeled
/// centroid sits wheelbase / 2 ahead of it. Speed is held inside
/// [0, speed_max] by zeroing acceleration at the limits.
inline LabeledActor gen_bicycle_actor(const GenConfig & cfg, std::uint64_t index)
{
  Rng rng(cfg.seed, index, 0x62696379ULL);
  const std::size_t steps = cfg.steps();
  const double dt = cfg.dt;

  detail::Maneuver man = detail::draw_maneuver(cfg, rng);
  if (cfg.fixed_speed) {
    man.v0 = *cfg.fixed_speed;
  }

  std::vector<double> acc;
  std::vector<double> curv;
  if (man.stationary && !cfg.fixed_lon_acc && !cfg.fixed_speed) {
    acc.assign(steps + 1, 0.0);
    curv.assign(steps + 1, 0.0);
  } else {
    std::vector<double> kt{0.0};
    while (kt.back() < cfg.horizon) {
      kt.push_back(kt.back() + rng.uniform(cfg.knot_spacing_min, cfg.knot_spacing_max));
    }
    std::vector<double> ka;
    std::vector<double> kk;
    for (std::size_t k = 0; k < kt.size(); ++k) {
      ka.push_back(rng.normal(man.acc_mean, man.acc_sigma));
      kk.push_back(rng.normal(man.curv_mean, man.curv_sigma));
    }
    acc = detail::spline_profile(kt, ka, steps, dt);
    curv = detail::spline_profile(kt, kk, steps, dt);
    for (std::size_t i = 0; i <= steps && static_cast<double>(i) * dt < man.hold_time; ++i) {
      acc[i] = 0.0;
    }
  }
  if (cfg.fixed_lon_acc) {
    acc.assign(steps + 1, *cfg.fixed_lon_acc);
  } else {
    detail::rate_limit_and_clip(acc, cfg.jerk_max, dt, cfg.lon_acc_min, cfg.lon_acc_max);
  }
  if (cfg.fixed_curvature) {
    curv.assign(steps + 1, *cfg.fixed_curvature);
  } else {
    detail::rate_limit_and_clip(curv, cfg.curvature_rate_max, dt, -cfg.curvature_max, cfg.curvature_max);
  }
  for (auto & a : acc) a = std::clamp(a, cfg.lon_acc_min, cfg.lon_acc_max);
  for (auto & k : curv) k = std::clamp(k, -cfg.curvature_max, cfg.curvature_max);

  SE2Pose start = cfg.fixed_start.value_or(
    SE2Pose::from_angle(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0), rng.uniform(-std::numbers::pi, std::numbers::pi)));
  detail::BicycleState st;
  st.theta = std::atan2(start.s, start.c);
  const double off = 0.5 * cfg.wheelbase;
  st.x = start.x - off * std::cos(st.theta);
  st.y = start.y - off * std::sin(st.theta);
  st.v = man.v0;

  // Effective control inside step i: linear between grid values.
  auto control = [&](const std::vector<double> & prof, std::size_t i, double w) {
    return i + 1 < prof.size() ? prof[i] + w * (prof[i + 1] - prof[i]) : prof[i];
  };
  auto effective_acc = [&](double a, double v) {
    if (v <= 0.0 && a < 0.0) return 0.0;
    if (v >= cfg.speed_max && a > 0.0) return 0.0;
    return a;
  };
  auto deriv = [&](const detail::BicycleState & s, double a, double k) {
    const double vp = std::max(s.v, 0.0);
    return detail::BicycleState{
      vp * std::cos(s.theta), vp * std::sin(s.theta), vp * k, effective_acc(a, s.v)};
  };
  auto axpy = [](const detail::BicycleState & s, double h, const detail::BicycleState & d) {
    return detail::BicycleState{s.x + h * d.x, s.y + h * d.y, s.theta + h * d.theta, s.v + h * d.v};
  };

  LabeledActor actor;
  actor.id = index;
  actor.actor_class = cfg.actor_class;
  actor.box = {cfg.box_length, cfg.box_width};
  actor.seed = cfg.seed;
  actor.index = index;
  actor.dt = dt;
  actor.wheelbase = cfg.wheelbase;
  std::vector<double> times(steps + 1);
  std::vector<SE2Pose> poses(steps + 1);
  actor.lon_acc.resize(steps + 1);
  actor.curvature = curv;
  actor.speed.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    times[i] = static_cast<double>(i) * dt;
    const double c = std::cos(st.theta);
    const double s = std::sin(st.theta);
    poses[i] = {st.x + off * c, st.y + off * s, s, c};
    actor.lon_acc[i] = effective_acc(acc[i], st.v);
    actor.speed[i] = st.v;
    if (i == steps) {
      break;
    }
    const double a0 = acc[i];
    const double am = control(acc, i, 0.5);
    const double a1 = control(acc, i, 1.0);
    const double k0 = curv[i];
    const double km = control(curv, i, 0.5);
    const double k1 = control(curv, i, 1.0);
    const auto d1 = deriv(st, a0, k0);
    const auto d2 = deriv(axpy(st, 0.5 * dt, d1), am, km);
    const auto d3 = deriv(axpy(st, 0.5 * dt, d2), am, km);
    const auto d4 = deriv(axpy(st, dt, d3), a1, k1);
    st.x += dt / 6.0 * (d1.x + 2 * d2.x + 2 * d3.x + d4.x);
    st.y += dt / 6.0 * (d1.y + 2 * d2.y + 2 * d3.y + d4.y);
    st.theta += dt / 6.0 * (d1.theta + 2 * d2.theta + 2 * d3.theta + d4.theta);
    st.v += dt / 6.0 * (d1.v + 2 * d2.v + 2 * d3.v + d4.v);
    st.v = std::clamp(st.v, 0.0, std::max(cfg.speed_max, man.v0));
  }
  actor.track = WaypointTrack(std::move(times), std::move(poses), true);
  return actor;
}

inline std::vector<LabeledActor> gen_bicycle(const GenConfig & cfg)
{
  cfg.validate();
  if (cfg.actor_class == ActorClass::kPedestrian) {
    throw Error(ErrorCode::kInvalidConfig, "gen_bicycle serves vehicles and bicyclists");
  }
  std::vector<LabeledActor> out;
  out.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    out.push_back(gen_bicycle_actor(cfg, i));
  }
  return out;
}

/// One pedestrian. Velocity follows the discrete Ornstein-Uhlenbeck update
///   v += reversion (v_mean - v) dt + sigma sqrt(dt) N(0, I)
/// around a per-actor mean velocity, with |v| clamped to the speed range.
/// Headings are not modeled.
inline LabeledActor gen_pedestrian_actor(const GenConfig & cfg, std::uint64_t index)
{
  Rng rng(cfg.seed, index, 0x70656473ULL);
  const std::size_t steps = cfg.steps();
  const double dt = cfg.dt;
  const double mean_speed =
    cfg.fixed_speed.value_or(rng.uniform(cfg.speed_min, cfg.speed_max));
  const double dir = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const Vec2 v_mean = mean_speed * Vec2{std::cos(dir), std::sin(dir)};
  const SE2Pose start =
    cfg.fixed_start.value_or(SE2Pose{rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0), 0.0, 1.0});

  Vec2 p = start.position();
  Vec2 v = v_mean;
  std::vector<double> times(steps + 1);
  std::vector<SE2Pose> poses(steps + 1);
  const double sq_dt = std::sqrt(dt);
  for (std::size_t i = 0; i <= steps; ++i) {
    times[i] = static_cast<double>(i) * dt;
    poses[i] = {p.x, p.y, 0.0, 1.0};
    if (i == steps) {
      break;
    }
    p = p + dt * v;
    const double nx = rng.normal();
    const double ny = rng.normal();
    v = v + (cfg.ou_reversion * dt) * (v_mean - v) + (cfg.ou_sigma * sq_dt) * Vec2{nx, ny};
    const double sp = norm(v);
    if (sp > cfg.speed_max) {
      v = (cfg.speed_max / sp) * v;
    } else if (sp < cfg.speed_min) {
      const Vec2 d = sp > 0.0 ? (1.0 / sp) * v : (1.0 / mean_speed) * v_mean;
      v = cfg.speed_min * d;
    }
  }
  LabeledActor actor;
  actor.id = index;
  actor.actor_class = ActorClass::kPedestrian;
  actor.box = {cfg.box_length, cfg.box_width};
  actor.seed = cfg.seed;
  actor.index = index;
  actor.dt = dt;
  actor.track = WaypointTrack(std::move(times), std::move(poses), false);
  return actor;
}

inline std::vector<LabeledActor> gen_pedestrian(const GenConfig & cfg)
{
  cfg.validate();
  if (cfg.actor_class != ActorClass::kPedestrian) {
    throw Error(ErrorCode::kInvalidConfig, "gen_pedestrian needs the pedestrian class");
  }
  std::vector<LabeledActor> out;
  out.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    out.push_back(gen_pedestrian_actor(cfg, i));
  }
  return out;
}

inline std::vector<LabeledActor> generate(const GenConfig & cfg)
{
  return cfg.actor_class == ActorClass::kPedestrian ? gen_pedestrian(cfg) : gen_bicycle(cfg);
}

/// I.i.d. Gaussian perturbation of centroids and heading angles, headings
/// renormalized. The noise stream is keyed by (seed, stream).
inline WaypointTrack add_observation_noise(
  const WaypointTrack & track, std::uint64_t stream, double sigma_pos, double sigma_theta,
  std::uint64_t seed)
{
  if (!(sigma_pos >= 0.0) || !(sigma_theta >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "noise sigmas must be >= 0");
  }
  if (sigma_pos == 0.0 && sigma_theta == 0.0) {
    return track;
  }
  Rng rng(seed, stream, 0x6e6f6973ULL);
  std::vector<SE2Pose> poses = track.poses();
  const bool heading = track.has_heading();
  for (auto & p : poses) {
    p.x += sigma_pos * rng.normal();
    p.y += sigma_pos * rng.normal();
    if (heading && sigma_theta > 0.0) {
      const double th = std::atan2(p.s, p.c) + sigma_theta * rng.normal();
      p.s = std::sin(th);
      p.c = std::cos(th);
    }
  }
  return WaypointTrack(track.times(), std::move(poses), heading);
}

inline WaypointTrack add_observation_noise(
  const LabeledActor & actor, double sigma_pos, double sigma_theta, std::uint64_t seed)
{
  return add_observation_noise(actor.track, actor.index, sigma_pos, sigma_theta, seed);
}

}  // namespace polytraj

#endif  // POLYTRAJ_SYNTHGEN_HPP_
