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

#ifndef POLYTRAJ_METRICS_HPP_
#define POLYTRAJ_METRICS_HPP_

#include "polytraj/error.hpp"
#include "polytraj/traj_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace polytraj
{

/// Centroid L2 distance between prediction and label at t.
template <PoseSource Pred>
double displacement_error(const Pred & pred, const WaypointTrack & label, double t)
{
  const SE2Pose & truth = label.pose_at_stamp(t);
  return norm(pose_at(pred, t).position() - truth.position());
}

/// Shortest-arc angle between two headings, in degrees within [0, 180].
inline double heading_error_deg(const SE2Pose & a, const SE2Pose & b)
{
  const double s_rel = a.s * b.c - a.c * b.s;
  const double c_rel = a.c * b.c + a.s * b.s;
  return std::abs(std::atan2(s_rel, c_rel)) * 180.0 / std::numbers::pi;
}

template <PoseSource Pred>
double heading_error(const Pred & pred, const WaypointTrack & label, double t)
{
  if (!has_heading(pred) || !label.has_heading()) {
    throw Error(ErrorCode::kHeadingUnavailable, "heading error needs headings on both sides");
  }
  return heading_error_deg(pose_at(pred, t), label.pose_at_stamp(t));
}

/// Smallest displacement error over all modes.
template <typename Mode>
double min_mode_displacement_error(const ModeSet<Mode> & set, const WaypointTrack & label, double t)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & m : set.modes()) {
    best = std::min(best, displacement_error(m, label, t));
  }
  return best;
}

/// Label speed at a stamp by central difference (one-sided at the ends).
inline double label_speed(const WaypointTrack & label, double t)
{
  const auto idx = label.index_of(t);
  if (!idx) {
    throw Error(ErrorCode::kOutOfDomain, "no label waypoint at t=" + std::to_string(t));
  }
  const auto & times = label.times();
  const auto & poses = label.poses();
  if (label.size() < 2) {
    return 0.0;
  }
  const std::size_t lo = *idx == 0 ? 0 : *idx - 1;
  const std::size_t hi = *idx + 1 == label.size() ? *idx : *idx + 1;
  return norm(poses[hi].position() - poses[lo].position()) / (times[hi] - times[lo]);
}

struct EvalSpec
{
  std::vector<double> eval_times;
  double min_speed_filter = 0.0;  // m/s, 0 disables
  bool per_time_report = false;   // keep per-actor errors
  bool min_over_modes = false;

  void validate() const
  {
    if (eval_times.empty()) {
      throw Error(ErrorCode::kInvalidInput, "no evaluation times");
    }
    for (std::size_t i = 1; i < eval_times.size(); ++i) {
      if (!(eval_times[i] > eval_times[i - 1])) {
        throw Error(ErrorCode::kInvalidInput, "evaluation times must be strictly increasing");
      }
    }
    if (!(min_speed_filter >= 0.0)) {
      throw Error(ErrorCode::kInvalidInput, "speed filter must be >= 0");
    }
  }
};

/// Per-time means over the actors passing the speed filter; a time with no
/// passing actor reports NaN means and a zero count.
struct MetricReport
{
  std::string representation;
  std::vector<double> times;
  std::vector<double> de_per_time;
  std::vector<double> dtheta_per_time;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> heading_counts;
  // Filled only with EvalSpec::per_time_report; indexed [time][actor].
  std::vector<std::vector<double>> per_actor_de;
};

template <typename T>
struct is_mode_set : std::false_type {};
template <typename Mode>
struct is_mode_set<ModeSet<Mode>> : std::true_type {};

template <PoseSource Pred>
MetricReport evaluate_batch(
  std::span<const Pred> preds, std::span<const WaypointTrack> labels, const EvalSpec & spec,
  std::string representation = {})
{
  spec.validate();
  if (preds.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidInput, "predictions and labels must pair up");
  }
  if (preds.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no prediction/label pairs");
  }
  MetricReport rep;
  rep.representation = std::move(representation);
  rep.times = spec.eval_times;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : spec.eval_times) {
    double de_sum = 0.0;
    double dth_sum = 0.0;
    std::size_t n = 0;
    std::size_t nh = 0;
    std::vector<double> per_actor;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const WaypointTrack & label = labels[i];
      if (spec.min_speed_filter > 0.0 && label_speed(label, t) < spec.min_speed_filter) {
        continue;
      }
      double de = 0.0;
      if constexpr (is_mode_set<Pred>::value) {
        de = spec.min_over_modes ? min_mode_displacement_error(preds[i], label, t)
                                 : displacement_error(preds[i], label, t);
      } else {
        de = displacement_error(preds[i], label, t);
      }
      de_sum += de;
      ++n;
      if (spec.per_time_report) {
        per_actor.push_back(de);
      }
      if (has_heading(preds[i]) && label.has_heading()) {
        dth_sum += heading_error(preds[i], label, t);
        ++nh;
      }
    }
    rep.de_per_time.push_back(n > 0 ? de_sum / static_cast<double>(n) : nan);
    rep.dtheta_per_time.push_back(nh > 0 ? dth_sum / static_cast<double>(nh) : nan);
    rep.counts.push_back(n);
    rep.heading_counts.push_back(nh);
    if (spec.per_time_report) {
      rep.per_actor_de.push_back(std::move(per_actor));
    }
  }
  return rep;
}

}  // namespace polytraj

#endif  // POLYTRAJ_METRICS_HPP_
