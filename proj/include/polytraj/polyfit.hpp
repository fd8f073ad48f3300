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

#ifndef POLYTRAJ_POLYFIT_HPP_
#define POLYTRAJ_POLYFIT_HPP_

#include "polytraj/error.hpp"
#include "polytraj/traj_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace polytraj
{

inline constexpr int kMaxFitDegree = 12;

struct FitConfig
{
  int degree_xy = 2;
  int degree_heading = 2;
  double horizon_T = 4.0;
  double ridge_lambda = 0.0;

  void validate() const
  {
    if (degree_xy < 0 || degree_heading < 0 || degree_xy > kMaxFitDegree ||
      degree_heading > kMaxFitDegree)
    {
      throw Error(ErrorCode::kInvalidConfig, "fit degrees must lie in [0, 12]");
    }
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) {
      throw Error(ErrorCode::kInvalidConfig, "fit horizon must be positive");
    }
    if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
      throw Error(ErrorCode::kInvalidConfig, "ridge_lambda must be >= 0");
    }
  }
};

struct FitResult
{
  PolyTraj traj;
  double total_sq_corner_error = 0.0;
  double max_corner_error = 0.0;
  bool condition_warning = false;
  // Condition number of the (unregularized) normal matrix.
  double condition_number = 1.0;
  // Last label timestamp; the fit horizon lives in traj.horizon_T.
  double label_end_time = 0.0;
};

/// Condition number above which FitResult::condition_warning is raised.
inline constexpr double kConditionWarning = 1e10;

/// Maximum over stamps and over the four position-matched box corners of the
/// L2 distance between predicted and labeled corners. Labels without heading
/// collapse the corner set to the centroid.
template <PoseSource Pred>
double max_corner_error(
  const Pred & pred, const WaypointTrack & label, const OrientedBox & box,
  std::span<const double> times)
{
  box.validate();
  double worst = 0.0;
  for (double t : times) {
    const SE2Pose & truth = label.pose_at_stamp(t);
    const SE2Pose guess = pose_at(pred, t);
    if (!label.has_heading()) {
      worst = std::max(worst, norm(guess.position() - truth.position()));
      continue;
    }
    const auto pc = corners(guess, box);
    const auto lc = corners(truth, box);
    for (std::size_t k = 0; k < 4; ++k) {
      worst = std::max(worst, norm(pc[k] - lc[k]));
    }
  }
  return worst;
}

template <PoseSource Pred>
double max_corner_error(const Pred & pred, const WaypointTrack & label, const OrientedBox & box)
{
  return max_corner_error(pred, label, box, std::span<const double>(label.times()));
}

namespace detail
{

inline void check_label_headings(const WaypointTrack & label)
{
  if (!label.has_heading()) {
    return;
  }
  for (const auto & p : label.poses()) {
    if (std::abs(p.s * p.s + p.c * p.c - 1.0) > 1e-6) {
      throw Error(ErrorCode::kInvalidInput, "label headings must be unit (sin, cos) pairs");
    }
  }
}

}  // namespace detail

/// Least-squares fit of a PolyTraj to a labeled track, minimizing the summed
/// squared distance between fitted and labeled box corners over every stamp.
///
/// Corner coordinates are linear in the raw (cx, cy, s, c) channel values, so
/// the objective is a single linear least-squares problem in all coefficients.
/// The system is solved through an SVD of the design matrix; with ridge
/// lambda > 0 this gives the solution of (A^T A + lambda I) x = A^T b.
inline FitResult fit_label(const WaypointTrack & label, const OrientedBox & box, const FitConfig & cfg)
{
  cfg.validate();
  box.validate();
  detail::check_label_headings(label);

  const bool heading = label.has_heading();
  const auto nxy = static_cast<Eigen::Index>(cfg.degree_xy + 1);
  const auto nh = heading ? static_cast<Eigen::Index>(cfg.degree_heading + 1) : 0;
  const std::size_t needed =
    static_cast<std::size_t>(std::max(cfg.degree_xy, heading ? cfg.degree_heading : 0)) + 1;
  if (label.size() < needed) {
    throw Error(ErrorCode::kInsufficientData, "label has fewer waypoints than coefficients per channel");
  }
  if (label.start_time() < -kTimeTolerance || label.end_time() > cfg.horizon_T + kTimeTolerance) {
    throw Error(ErrorCode::kOutOfDomain, "label stamps must lie inside [0, horizon_T]");
  }

  const auto offsets = box.offsets();
  const Eigen::Index points_per_stamp = heading ? 4 : 1;
  const Eigen::Index rows = static_cast<Eigen::Index>(label.size()) * points_per_stamp * 2;
  const Eigen::Index cols = 2 * nxy + 2 * nh;
  const Eigen::Index col_cy = nxy;
  const Eigen::Index col_s = 2 * nxy;
  const Eigen::Index col_c = 2 * nxy + nh;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd b(rows);
  std::vector<double> basis(static_cast<std::size_t>(std::max(nxy, nh)));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const double u = label.times()[i] / cfg.horizon_T;
    double p = 1.0;
    for (auto & v : basis) {
      v = p;
      p *= u;
    }
    const SE2Pose & pose = label.poses()[i];
    if (!heading) {
      for (Eigen::Index n = 0; n < nxy; ++n) {
        A(r, n) = basis[static_cast<std::size_t>(n)];
        A(r + 1, col_cy + n) = basis[static_cast<std::size_t>(n)];
      }
      b(r) = pose.x;
      b(r + 1) = pose.y;
      r += 2;
      continue;
    }
    const auto labeled = corners(pose, box);
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec2 o = offsets[k];
      for (Eigen::Index n = 0; n < nxy; ++n) {
        A(r, n) = basis[static_cast<std::size_t>(n)];
        A(r + 1, col_cy + n) = basis[static_cast<std::size_t>(n)];
      }
      // x_k = cx + c*ox - s*oy ; y_k = cy + s*ox + c*oy
      for (Eigen::Index n = 0; n < nh; ++n) {
        const double phi = basis[static_cast<std::size_t>(n)];
        A(r, col_s + n) = -o.y * phi;
        A(r, col_c + n) = o.x * phi;
        A(r + 1, col_s + n) = o.x * phi;
        A(r + 1, col_c + n) = o.y * phi;
      }
      b(r) = labeled[k].x;
      b(r + 1) = labeled[k].y;
      r += 2;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd & sigma = svd.singularValues();
  const double smax = sigma(0);
  const double smin = sigma(sigma.size() - 1);
  const double rank_tol =
    smax * static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();

  FitResult result;
  result.condition_number =
    smin > 0.0 ? (smax / smin) * (smax / smin) : std::numeric_limits<double>::infinity();
  result.condition_warning = result.condition_number > kConditionWarning;
  if (smin <= rank_tol && cfg.ridge_lambda == 0.0) {
    throw Error(ErrorCode::kSingularSystem, "normal system is rank-deficient; retry with ridge_lambda > 0");
  }

  const Eigen::VectorXd utb = svd.matrixU().transpose() * b;
  Eigen::VectorXd scaled(sigma.size());
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    const double sk = sigma(k);
    scaled(k) = sk > 0.0 ? utb(k) * sk / (sk * sk + cfg.ridge_lambda) : 0.0;
  }
  const Eigen::VectorXd x = svd.matrixV() * scaled;

  auto take = [&](Eigen::Index start, Eigen::Index count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (Eigen::Index n = 0; n < count; ++n) {
      out[static_cast<std::size_t>(n)] = x(start + n);
    }
    return out;
  };

  PolyTraj traj;
  traj.horizon_T = cfg.horizon_T;
  traj.channel(Channel::kX) = take(0, nxy);
  traj.channel(Channel::kY) = take(col_cy, nxy);
  if (heading) {
    traj.channel(Channel::kSin) = take(col_s, nh);
    traj.channel(Channel::kCos) = take(col_c, nh);
  } else {
    traj.channel(Channel::kSin) = {0.0};
    traj.channel(Channel::kCos) = {1.0};
  }

  result.traj = std::move(traj);
  result.total_sq_corner_error = (A * x - b).squaredNorm();
  result.max_corner_error = max_corner_error(result.traj, label, box);
  result.label_end_time = label.end_time();
  return result;
}

/// Fraction of errors <= each threshold.
inline std::vector<double> cumulative_error_curve(
  std::span<const double> errors, std::span<const double> thresholds)
{
  if (errors.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no errors to accumulate");
  }
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorCode::kInvalidInput, "thresholds must be non-decreasing");
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(thresholds.size());
  const double n = static_cast<double>(sorted.size());
  for (double thr : thresholds) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), thr) - sorted.begin();
    out.push_back(static_cast<double>(count) / n);
  }
  return out;
}

}  // namespace polytraj

#endif  // POLYTRAJ_POLYFIT_HPP_
