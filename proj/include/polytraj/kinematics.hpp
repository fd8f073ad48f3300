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

#ifndef POLYTRAJ_KINEMATICS_HPP_
#define POLYTRAJ_KINEMATICS_HPP_

#include "polytraj/error.hpp"
#include "polytraj/traj_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace polytraj
{

struct KinematicSample
{
  double t = 0.0;
  Vec2 v;
  Vec2 a;
  Vec2 h{1.0, 0.0};
  double speed = 0.0;
  // False for finite-difference endpoints, where a is not defined.
  bool has_acceleration = true;

  /// Signed curvature (v x a) / |v|^3; zero when at rest.
  double curvature() const
  {
    return speed > 0.0 ? cross(v, a) / (speed * speed * speed) : 0.0;
  }
};

/// Velocity and acceleration of the centroid by analytic differentiation,
/// d/dt = (1/T) d/du.
inline KinematicSample poly_derivatives(const PolyTraj & traj, double t)
{
  const SE2Pose pose = eval_pose(traj, t);
  const double T = traj.horizon_T;
  const double u = t / T;
  const auto dx = polyder(traj.channel(Channel::kX));
  const auto dy = polyder(traj.channel(Channel::kY));
  const auto ddx = polyder(dx);
  const auto ddy = polyder(dy);
  KinematicSample out;
  out.t = t;
  out.v = {polyval(dx, u) / T, polyval(dy, u) / T};
  out.a = {polyval(ddx, u) / (T * T), polyval(ddy, u) / (T * T)};
  out.h = pose.heading();
  out.speed = norm(out.v);
  return out;
}

/// Samples of poly_derivatives at each time.
inline std::vector<KinematicSample> poly_kinematics(const PolyTraj & traj, std::span<const double> times)
{
  std::vector<KinematicSample> out;
  out.reserve(times.size());
  for (double t : times) {
    out.push_back(poly_derivatives(traj, t));
  }
  return out;
}

/// Central finite differences on a uniformly stamped track. Endpoints get
/// one-sided first-order velocities and no acceleration.
inline std::vector<KinematicSample> track_derivatives(const WaypointTrack & track)
{
  const auto & times = track.times();
  const auto & poses = track.poses();
  if (track.size() < 3) {
    throw Error(ErrorCode::kTooShort, "finite differences need >= 3 waypoints");
  }
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6) {
      throw Error(ErrorCode::kNonUniformTimes, "track stamps are not uniformly spaced");
    }
  }
  const std::size_t n = track.size();
  std::vector<KinematicSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    KinematicSample & k = out[i];
    k.t = times[i];
    k.h = poses[i].heading();
    const Vec2 p = poses[i].position();
    if (i == 0) {
      k.v = (1.0 / dt) * (poses[1].position() - p);
      k.has_acceleration = false;
    } else if (i + 1 == n) {
      k.v = (1.0 / dt) * (p - poses[i - 1].position());
      k.has_acceleration = false;
    } else {
      const Vec2 prev = poses[i - 1].position();
      const Vec2 next = poses[i + 1].position();
      k.v = (0.5 / dt) * (next - prev);
      k.a = (1.0 / (dt * dt)) * (next - 2.0 * p + prev);
    }
    k.speed = norm(k.v);
  }
  return out;
}

struct FeasibilityStats
{
  double max_lon_acc = 0.0;
  double min_lon_acc = 0.0;
  double max_lat_acc = 0.0;
  double max_lat_speed = 0.0;
  bool is_static = false;
};

inline constexpr double kStaticSpeedThreshold = 0.2;

/// Longitudinal acceleration a.v/|v|, lateral acceleration |a x v|/|v| and
/// lateral speed |v x h|, aggregated over the samples. Samples slower than
/// the threshold are left out of the acceleration statistics.
inline FeasibilityStats feasibility_stats(
  std::span<const KinematicSample> samples, double static_speed_threshold = kStaticSpeedThreshold)
{
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no kinematic samples");
  }
  FeasibilityStats st;
  st.is_static = std::all_of(samples.begin(), samples.end(), [&](const KinematicSample & k) {
    return k.speed < static_speed_threshold;
  });
  if (st.is_static) {
    return st;
  }
  double max_lon = -std::numeric_limits<double>::infinity();
  double min_lon = std::numeric_limits<double>::infinity();
  bool any_acc = false;
  for (const auto & k : samples) {
    st.max_lat_speed = std::max(st.max_lat_speed, std::abs(cross(k.v, k.h)));
    if (!k.has_acceleration || k.speed < static_speed_threshold) {
      continue;
    }
    const double lon = dot(k.a, k.v) / k.speed;
    const double lat = std::abs(cross(k.a, k.v)) / k.speed;
    max_lon = std::max(max_lon, lon);
    min_lon = std::min(min_lon, lon);
    st.max_lat_acc = std::max(st.max_lat_acc, lat);
    any_acc = true;
  }
  if (any_acc) {
    st.max_lon_acc = max_lon;
    st.min_lon_acc = min_lon;
  }
  return st;
}

enum class FeasibilityQuantity { kMaxLonAcc, kMinLonAcc, kMaxLatAcc, kMaxLatSpeed };

inline double quantity_value(const FeasibilityStats & st, FeasibilityQuantity q)
{
  switch (q) {
    case FeasibilityQuantity::kMaxLonAcc: return st.max_lon_acc;
    case FeasibilityQuantity::kMinLonAcc: return st.min_lon_acc;
    case FeasibilityQuantity::kMaxLatAcc: return st.max_lat_acc;
    case FeasibilityQuantity::kMaxLatSpeed: return st.max_lat_speed;
  }
  return 0.0;
}

struct HistogramBin
{
  std::int64_t index = 0;  // bin covers [index * width, (index + 1) * width)
  double fraction = 0.0;
};

struct Histogram
{
  double bin_width = 0.1;
  std::vector<HistogramBin> bins;  // ascending index, empty bins omitted
};

struct HistogramWidths
{
  double max_lon_acc = 0.1;
  double min_lon_acc = 0.1;
  double max_lat_acc = 0.1;
  double max_lat_speed = 0.01;

  double width(FeasibilityQuantity q) const
  {
    switch (q) {
      case FeasibilityQuantity::kMaxLonAcc: return max_lon_acc;
      case FeasibilityQuantity::kMinLonAcc: return min_lon_acc;
      case FeasibilityQuantity::kMaxLatAcc: return max_lat_acc;
      case FeasibilityQuantity::kMaxLatSpeed: return max_lat_speed;
    }
    return max_lon_acc;
  }
};

inline constexpr std::array<FeasibilityQuantity, 4> kAllQuantities{
  FeasibilityQuantity::kMaxLonAcc, FeasibilityQuantity::kMinLonAcc,
  FeasibilityQuantity::kMaxLatAcc, FeasibilityQuantity::kMaxLatSpeed};

/// Normalized histogram of one statistic over non-static trajectories.
inline Histogram feasibility_histogram(
  std::span<const FeasibilityStats> stats, FeasibilityQuantity q, double bin_width)
{
  if (!(bin_width > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "bin width must be positive");
  }
  std::map<std::int64_t, std::size_t> counts;
  std::size_t total = 0;
  for (const auto & st : stats) {
    if (st.is_static) {
      continue;
    }
    // Nudge keeps values sitting on a bin edge (e.g. 0.3 / 0.1) in the upper bin.
    const auto idx = static_cast<std::int64_t>(std::floor(quantity_value(st, q) / bin_width + 1e-9));
    ++counts[idx];
    ++total;
  }
  if (total == 0) {
    throw Error(ErrorCode::kEmptyInput, "no non-static trajectories to histogram");
  }
  Histogram h;
  h.bin_width = bin_width;
  for (const auto & [idx, n] : counts) {
    h.bins.push_back({idx, static_cast<double>(n) / static_cast<double>(total)});
  }
  return h;
}

}  // namespace polytraj

#endif  // POLYTRAJ_KINEMATICS_HPP_
