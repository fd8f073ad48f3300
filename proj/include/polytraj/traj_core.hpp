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

#ifndef POLYTRAJ_TRAJ_CORE_HPP_
#define POLYTRAJ_TRAJ_CORE_HPP_

#include "polytraj/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace polytraj
{

/// Slack used when comparing query times against a domain boundary or a
/// label timestamp (times are usually built as i * dt).
inline constexpr double kTimeTolerance = 1e-9;

/// Squared (sin, cos) norm below which a heading is undefined.
inline constexpr double kDegenerateHeadingSq = 1e-12;

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// 2D cross product x1*y2 - x2*y1.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - b.x * a.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Planar rigid transform stored as (x, y, sin(theta), cos(theta)).
struct SE2Pose
{
  double x = 0.0;
  double y = 0.0;
  double s = 0.0;
  double c = 1.0;

  static SE2Pose from_angle(double x, double y, double theta)
  {
    return {x, y, std::sin(theta), std::cos(theta)};
  }

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return {c, s}; }
  double angle() const { return std::atan2(s, c); }

  friend constexpr bool operator==(const SE2Pose &, const SE2Pose &) = default;
};

/// Normalizes raw (s, c) channel values onto the unit circle.
inline std::pair<double, double> normalize_heading(double s_raw, double c_raw)
{
  const double sq = s_raw * s_raw + c_raw * c_raw;
  if (!(sq >= kDegenerateHeadingSq)) {
    throw Error(ErrorCode::kDegenerateHeading, "heading channels have near-zero norm");
  }
  const double n = std::sqrt(sq);
  return {s_raw / n, c_raw / n};
}

struct OrientedBox
{
  double length = 1.0;
  double width = 1.0;

  void validate() const
  {
    if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) || !std::isfinite(width)) {
      throw Error(ErrorCode::kInvalidInput, "box dimensions must be positive and finite");
    }
  }

  /// Body-frame corner offsets in FL, FR, RR, RL order.
  std::array<Vec2, 4> offsets() const
  {
    const double hl = 0.5 * length;
    const double hw = 0.5 * width;
    return {{{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}}};
  }
};

/// Time-stamped pose sequence with strictly increasing times.
class WaypointTrack
{
public:
  WaypointTrack(std::vector<double> times, std::vector<SE2Pose> poses, bool has_heading = true)
  : times_(std::move(times)), poses_(std::move(poses)), has_heading_(has_heading)
  {
    if (times_.empty() || times_.size() != poses_.size()) {
      throw Error(ErrorCode::kInvalidTimes, "track needs >= 1 pose and one time per pose");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i]) || (i > 0 && !(times_[i] > times_[i - 1]))) {
        throw Error(ErrorCode::kInvalidTimes, "track times must be finite and strictly increasing");
      }
    }
  }

  const std::vector<double> & times() const { return times_; }
  const std::vector<SE2Pose> & poses() const { return poses_; }
  bool has_heading() const { return has_heading_; }
  std::size_t size() const { return times_.size(); }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  /// Index of the waypoint stamped at t (within kTimeTolerance), if any.
  std::optional<std::size_t> index_of(double t) const
  {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - kTimeTolerance);
    if (it != times_.end() && std::abs(*it - t) <= kTimeTolerance) {
      return static_cast<std::size_t>(it - times_.begin());
    }
    return std::nullopt;
  }

  /// Pose stamped at t; OutOfDomain when no waypoint carries that time.
  const SE2Pose & pose_at_stamp(double t) const
  {
    const auto idx = index_of(t);
    if (!idx) {
      throw Error(ErrorCode::kOutOfDomain, "no waypoint at t=" + std::to_string(t));
    }
    return poses_[*idx];
  }

  /// Sub-track at the given stamps (each must exist in this track).
  WaypointTrack subset(std::span<const double> stamps) const
  {
    std::vector<double> ts;
    std::vector<SE2Pose> ps;
    ts.reserve(stamps.size());
    ps.reserve(stamps.size());
    for (double t : stamps) {
      const auto idx = index_of(t);
      if (!idx) {
        throw Error(ErrorCode::kOutOfDomain, "no waypoint at t=" + std::to_string(t));
      }
      ts.push_back(times_[*idx]);
      ps.push_back(poses_[*idx]);
    }
    return WaypointTrack(std::move(ts), std::move(ps), has_heading_);
  }

  friend bool operator==(const WaypointTrack &, const WaypointTrack &) = default;

private:
  std::vector<double> times_;
  std::vector<SE2Pose> poses_;
  bool has_heading_ = true;
};

enum class Channel : std::size_t { kX = 0, kY = 1, kSin = 2, kCos = 3 };
inline constexpr std::size_t kNumChannels = 4;

/// Horner evaluation of sum_n coeffs[n] * u^n.
inline double polyval(std::span<const double> coeffs, double u)
{
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * u + *it;
  }
  return acc;
}

/// Coefficients of d/du of the polynomial; empty input stays empty.
inline std::vector<double> polyder(std::span<const double> coeffs)
{
  if (coeffs.size() <= 1) {
    return {};
  }
  std::vector<double> out(coeffs.size() - 1);
  for (std::size_t n = 1; n < coeffs.size(); ++n) {
    out[n - 1] = static_cast<double>(n) * coeffs[n];
  }
  return out;
}

/// Polynomial trajectory over normalized time u = t / horizon_T. The s and c
/// channels hold raw amplitudes; evaluation normalizes them.
struct PolyTraj
{
  double horizon_T = 1.0;
  std::array<std::vector<double>, kNumChannels> coeffs{
    std::vector<double>{0.0}, std::vector<double>{0.0}, std::vector<double>{0.0},
    std::vector<double>{1.0}};

  const std::vector<double> & channel(Channel ch) const
  {
    return coeffs[static_cast<std::size_t>(ch)];
  }
  std::vector<double> & channel(Channel ch) { return coeffs[static_cast<std::size_t>(ch)]; }

  std::size_t degree(Channel ch) const { return channel(ch).size() - 1; }

  void validate() const
  {
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) {
      throw Error(ErrorCode::kInvalidInput, "horizon_T must be positive");
    }
    for (const auto & c : coeffs) {
      if (c.empty()) {
        throw Error(ErrorCode::kInvalidInput, "every channel needs at least one coefficient");
      }
    }
  }

  friend bool operator==(const PolyTraj &, const PolyTraj &) = default;
};

struct EvalOptions
{
  bool allow_extrapolation = false;
};

struct PoseEvaluation
{
  SE2Pose pose;
  bool extrapolated = false;
};

inline void check_domain(double t, double horizon_T, const EvalOptions & opts)
{
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::kOutOfDomain, "non-finite query time");
  }
  if (!opts.allow_extrapolation && (t < -kTimeTolerance || t > horizon_T + kTimeTolerance)) {
    throw Error(
      ErrorCode::kOutOfDomain,
      "t=" + std::to_string(t) + " outside [0, " + std::to_string(horizon_T) + "]");
  }
}

/// Evaluates the pose at t and reports whether t lies beyond [0, T].
inline PoseEvaluation evaluate(const PolyTraj & traj, double t, EvalOptions opts = {})
{
  check_domain(t, traj.horizon_T, opts);
  const double u = t / traj.horizon_T;
  const auto [s, c] = normalize_heading(
    polyval(traj.channel(Channel::kSin), u), polyval(traj.channel(Channel::kCos), u));
  PoseEvaluation out;
  out.pose = {polyval(traj.channel(Channel::kX), u), polyval(traj.channel(Channel::kY), u), s, c};
  out.extrapolated = t < -kTimeTolerance || t > traj.horizon_T + kTimeTolerance;
  return out;
}

inline SE2Pose eval_pose(const PolyTraj & traj, double t, EvalOptions opts = {})
{
  return evaluate(traj, t, opts).pose;
}

inline WaypointTrack sample_waypoints(
  const PolyTraj & traj, std::span<const double> times, EvalOptions opts = {})
{
  if (times.empty()) {
    throw Error(ErrorCode::kInvalidTimes, "no sample times");
  }
  std::vector<SE2Pose> poses;
  poses.reserve(times.size());
  for (double t : times) {
    poses.push_back(eval_pose(traj, t, opts));
  }
  return WaypointTrack(std::vector<double>(times.begin(), times.end()), std::move(poses), true);
}

/// Linear interpolation of a waypoint track. Heading is interpolated on the
/// (sin, cos) pair and renormalized.
inline SE2Pose interp_pose(const WaypointTrack & track, double t)
{
  const auto & times = track.times();
  const auto & poses = track.poses();
  if (!std::isfinite(t) || t < times.front() - kTimeTolerance ||
    t > times.back() + kTimeTolerance)
  {
    throw Error(ErrorCode::kOutOfDomain, "t=" + std::to_string(t) + " outside track span");
  }
  if (const auto idx = track.index_of(t)) {
    return poses[*idx];
  }
  // t is strictly inside (times[i-1], times[i]) here, so size() >= 2.
  const auto hi = static_cast<std::size_t>(
    std::upper_bound(times.begin(), times.end(), t) - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  const SE2Pose & a = poses[lo];
  const SE2Pose & b = poses[hi];
  const auto [s, c] = normalize_heading(a.s + w * (b.s - a.s), a.c + w * (b.c - a.c));
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), s, c};
}

/// World-frame box corners in FL, FR, RR, RL order.
inline std::array<Vec2, 4> corners(const SE2Pose & pose, const OrientedBox & box)
{
  std::array<Vec2, 4> out;
  const auto offs = box.offsets();
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 o = offs[i];
    out[i] = {pose.x + pose.c * o.x - pose.s * o.y, pose.y + pose.s * o.x + pose.c * o.y};
  }
  return out;
}

/// Anything that yields a pose for a query time.
template <typename T>
concept PoseSource = requires(const T & src, double t) {
  { pose_at(src, t) } -> std::convertible_to<SE2Pose>;
};

inline SE2Pose pose_at(const PolyTraj & traj, double t) { return eval_pose(traj, t); }
inline SE2Pose pose_at(const WaypointTrack & track, double t) { return interp_pose(track, t); }

inline bool has_heading(const PolyTraj &) { return true; }
inline bool has_heading(const WaypointTrack & track) { return track.has_heading(); }

/// A set of alternative futures with probabilities.
template <typename Mode>
class ModeSet
{
public:
  ModeSet(std::vector<Mode> modes, std::vector<double> weights)
  : modes_(std::move(modes)), weights_(std::move(weights))
  {
    if (modes_.empty() || modes_.size() != weights_.size()) {
      throw Error(ErrorCode::kInvalidInput, "mode set needs >= 1 mode and one weight per mode");
    }
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "mode weights must be non-negative");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidInput, "mode weights must sum to 1");
    }
  }

  const std::vector<Mode> & modes() const { return modes_; }
  const std::vector<double> & weights() const { return weights_; }

  /// Highest-weight mode; the first one wins ties.
  const Mode & top() const
  {
    const auto it = std::max_element(weights_.begin(), weights_.end());
    return modes_[static_cast<std::size_t>(it - weights_.begin())];
  }

private:
  std::vector<Mode> modes_;
  std::vector<double> weights_;
};

template <typename Mode>
SE2Pose pose_at(const ModeSet<Mode> & set, double t)
{
  return pose_at(set.top(), t);
}

template <typename Mode>
bool has_heading(const ModeSet<Mode> & set)
{
  return has_heading(set.top());
}

/// Uniform stamps 0, dt, 2 dt, ..., horizon (horizon / dt must be integral).
inline std::vector<double> uniform_times(double horizon, double dt)
{
  if (!(dt > 0.0) || !(horizon >= 0.0)) {
    throw Error(ErrorCode::kInvalidTimes, "uniform_times needs dt > 0 and horizon >= 0");
  }
  const double steps = horizon / dt;
  const double n = std::round(steps);
  if (std::abs(steps - n) > 1e-9 * std::max(1.0, steps)) {
    throw Error(ErrorCode::kInvalidTimes, "horizon is not an integer multiple of dt");
  }
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(i) * dt;
  }
  return out;
}

}  // namespace polytraj

#endif  // POLYTRAJ_TRAJ_CORE_HPP_
