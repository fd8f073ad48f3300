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

#ifndef POLYTRAJ_PROB_LAPLACE_HPP_
#define POLYTRAJ_PROB_LAPLACE_HPP_

#include "polytraj/error.hpp"
#include "polytraj/polyfit.hpp"
#include "polytraj/traj_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace polytraj
{

/// Diversity floor applied inside the likelihood (b >= 1e-3).
inline const double kLogBFloor = std::log(1e-3);

/// One Laplace-distributed channel: polynomial mean and log-polynomial scale.
struct LaplaceChannel
{
  std::vector<double> mu_coeffs{0.0};
  std::vector<double> logb_coeffs{0.0};

  friend bool operator==(const LaplaceChannel &, const LaplaceChannel &) = default;
};

struct LaplaceParams
{
  double mu = 0.0;
  double b = 1.0;
};

struct ProbPolyTraj
{
  double horizon_T = 1.0;
  bool has_heading = true;
  std::array<LaplaceChannel, kNumChannels> channels{};

  std::size_t num_channels() const { return has_heading ? 4 : 2; }

  const LaplaceChannel & channel(Channel ch) const
  {
    return channels[static_cast<std::size_t>(ch)];
  }
  LaplaceChannel & channel(Channel ch) { return channels[static_cast<std::size_t>(ch)]; }

  /// Polynomial mean trajectory; heading-free trajectories get a fixed
  /// (s, c) = (0, 1) heading.
  PolyTraj mean() const
  {
    PolyTraj out;
    out.horizon_T = horizon_T;
    out.channel(Channel::kX) = channel(Channel::kX).mu_coeffs;
    out.channel(Channel::kY) = channel(Channel::kY).mu_coeffs;
    if (has_heading) {
      out.channel(Channel::kSin) = channel(Channel::kSin).mu_coeffs;
      out.channel(Channel::kCos) = channel(Channel::kCos).mu_coeffs;
    }
    return out;
  }

  friend bool operator==(const ProbPolyTraj &, const ProbPolyTraj &) = default;
};

inline LaplaceParams channel_pdf_params(const LaplaceChannel & ch, double T, double t)
{
  check_domain(t, T, {});
  const double u = t / T;
  return {polyval(ch.mu_coeffs, u), std::exp(polyval(ch.logb_coeffs, u))};
}

inline double channel_value(const SE2Pose & pose, Channel ch)
{
  switch (ch) {
    case Channel::kX: return pose.x;
    case Channel::kY: return pose.y;
    case Channel::kSin: return pose.s;
    case Channel::kCos: return pose.c;
  }
  return 0.0;
}

/// Laplace negative log-likelihood ln(2b) + |value - mu| / b of one channel
/// at time t, with log b clamped at kLogBFloor.
inline double channel_nll(const LaplaceChannel & ch, double T, double t, double value)
{
  check_domain(t, T, {});
  const double u = t / T;
  const double mu = polyval(ch.mu_coeffs, u);
  const double logb = std::max(polyval(ch.logb_coeffs, u), kLogBFloor);
  return std::numbers::ln2 + logb + std::abs(value - mu) * std::exp(-logb);
}

inline double nll(const ProbPolyTraj & traj, const WaypointTrack & label, std::span<const double> times)
{
  double total = 0.0;
  for (double t : times) {
    const SE2Pose & truth = label.pose_at_stamp(t);
    for (std::size_t k = 0; k < traj.num_channels(); ++k) {
      const auto ch = static_cast<Channel>(k);
      total += channel_nll(traj.channel(ch), traj.horizon_T, t, channel_value(truth, ch));
    }
  }
  return total;
}

/// Coefficients laid out channel by channel, mu coefficients before logb
/// coefficients.
inline std::vector<double> flatten(const ProbPolyTraj & traj)
{
  std::vector<double> out;
  for (std::size_t k = 0; k < traj.num_channels(); ++k) {
    const auto & ch = traj.channels[k];
    out.insert(out.end(), ch.mu_coeffs.begin(), ch.mu_coeffs.end());
    out.insert(out.end(), ch.logb_coeffs.begin(), ch.logb_coeffs.end());
  }
  return out;
}

/// Inverse of flatten(); the shape (degrees) is taken from traj.
inline void assign_flat(ProbPolyTraj & traj, std::span<const double> flat)
{
  std::size_t pos = 0;
  for (std::size_t k = 0; k < traj.num_channels(); ++k) {
    auto & ch = traj.channels[k];
    for (auto * coeffs : {&ch.mu_coeffs, &ch.logb_coeffs}) {
      if (pos + coeffs->size() > flat.size()) {
        throw Error(ErrorCode::kInvalidInput, "flat coefficient vector too short");
      }
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), coeffs->size(), coeffs->begin());
      pos += coeffs->size();
    }
  }
  if (pos != flat.size()) {
    throw Error(ErrorCode::kInvalidInput, "flat coefficient vector too long");
  }
}

/// Analytic gradient of nll() in flatten() order. Exactly-zero residuals take
/// subgradient 0; clamped log-scales contribute no gradient.
inline std::vector<double> nll_grad(
  const ProbPolyTraj & traj, const WaypointTrack & label, std::span<const double> times)
{
  std::vector<double> grad(flatten(traj).size(), 0.0);
  for (double t : times) {
    const SE2Pose & truth = label.pose_at_stamp(t);
    check_domain(t, traj.horizon_T, {});
    const double u = t / traj.horizon_T;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < traj.num_channels(); ++k) {
      const auto & ch = traj.channels[k];
      const double mu = polyval(ch.mu_coeffs, u);
      const double logb_raw = polyval(ch.logb_coeffs, u);
      const double logb = std::max(logb_raw, kLogBFloor);
      const double inv_b = std::exp(-logb);
      const double r = channel_value(truth, static_cast<Channel>(k)) - mu;
      const double sign = (r > 0.0) - (r < 0.0);
      double un = 1.0;
      for (std::size_t n = 0; n < ch.mu_coeffs.size(); ++n, un *= u) {
        grad[pos + n] += -sign * un * inv_b;
      }
      pos += ch.mu_coeffs.size();
      if (logb_raw >= kLogBFloor) {
        const double dlogb = 1.0 - std::abs(r) * inv_b;
        un = 1.0;
        for (std::size_t n = 0; n < ch.logb_coeffs.size(); ++n, un *= u) {
          grad[pos + n] += dlogb * un;
        }
      }
      pos += ch.logb_coeffs.size();
    }
  }
  return grad;
}

struct ProbFitConfig
{
  int degree_mu = 2;
  int degree_b = 1;
  double horizon_T = 4.0;
  double lr = 1e-2;
  int max_iters = 500;
  double tol = 1e-9;
  // Box used by the corner-objective initialization.
  OrientedBox box{4.6, 2.0};
};

struct ProbFitResult
{
  ProbPolyTraj traj;
  double initial_nll = 0.0;
  double final_nll = 0.0;
  int iterations = 0;
};

/// NLL fit on sampled waypoints by gradient descent with step halving.
///
/// Means start from the closed-form corner fit on the supervision stamps and
/// every log-scale starts constant at ln(mean |residual|) of that fit, floored
/// at ln(1e-3). The mu and logb coefficients of each channel form separate
/// blocks with their own step size; a block step is accepted only if it does
/// not increase that channel's NLL, and its step then regrows towards lr.
inline ProbFitResult fit_prob(
  const WaypointTrack & label, std::span<const double> times, const ProbFitConfig & cfg)
{
  if (cfg.degree_b < 0 || cfg.degree_b > kMaxFitDegree) {
    throw Error(ErrorCode::kInvalidConfig, "degree_b must lie in [0, 12]");
  }
  if (!(cfg.lr > 0.0) || cfg.max_iters < 0 || !(cfg.tol >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "fit_prob needs lr > 0, max_iters >= 0, tol >= 0");
  }
  const auto needed = static_cast<std::size_t>(std::max(cfg.degree_mu, cfg.degree_b)) + 1;
  if (times.size() < needed) {
    throw Error(ErrorCode::kInsufficientData, "fewer supervision times than coefficients");
  }

  const WaypointTrack sup = label.subset(times);
  const FitResult init = fit_label(sup, cfg.box, {cfg.degree_mu, cfg.degree_mu, cfg.horizon_T, 0.0});

  ProbPolyTraj traj;
  traj.horizon_T = cfg.horizon_T;
  traj.has_heading = label.has_heading();
  for (std::size_t k = 0; k < traj.num_channels(); ++k) {
    const auto ch = static_cast<Channel>(k);
    auto & lc = traj.channel(ch);
    lc.mu_coeffs = init.traj.channel(ch);
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < sup.size(); ++i) {
      const double u = sup.times()[i] / cfg.horizon_T;
      abs_sum += std::abs(channel_value(sup.poses()[i], ch) - polyval(lc.mu_coeffs, u));
    }
    const double mean_abs = abs_sum / static_cast<double>(sup.size());
    lc.logb_coeffs.assign(static_cast<std::size_t>(cfg.degree_b) + 1, 0.0);
    lc.logb_coeffs[0] = std::max(std::log(mean_abs), kLogBFloor);
  }

  ProbFitResult result;
  double current = nll(traj, label, times);
  if (!std::isfinite(current)) {
    throw Error(ErrorCode::kNonFinite, "initial NLL is not finite");
  }
  result.initial_nll = current;

  // nll() separates over channels and the mu / logb blocks have very
  // different curvature, so each block keeps its own step size.
  const std::size_t nblocks = 2 * traj.num_channels();
  std::vector<std::size_t> offset(nblocks + 1, 0);
  for (std::size_t k = 0; k < traj.num_channels(); ++k) {
    offset[2 * k + 1] = offset[2 * k] + traj.channels[k].mu_coeffs.size();
    offset[2 * k + 2] = offset[2 * k + 1] + traj.channels[k].logb_coeffs.size();
  }
  auto channel_total = [&](const ProbPolyTraj & p, std::size_t k) {
    double total = 0.0;
    for (double t : times) {
      total += channel_nll(p.channels[k], p.horizon_T, t, channel_value(label.pose_at_stamp(t), static_cast<Channel>(k)));
    }
    return total;
  };
  std::vector<double> theta = flatten(traj);
  std::vector<double> lr(nblocks, cfg.lr);
  std::vector<double> ch_nll(traj.num_channels());
  for (std::size_t k = 0; k < ch_nll.size(); ++k) ch_nll[k] = channel_total(traj, k);
  ProbPolyTraj candidate = traj;
  constexpr int kMaxHalvings = 60;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const auto grad = nll_grad(traj, label, times);
    bool any_step = false;
    double improvement = 0.0;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      const std::size_t k = blk / 2;
      std::vector<double> trial = theta;
      bool accepted = false;
      double next = ch_nll[k];
      for (int h = 0; h < kMaxHalvings; ++h, lr[blk] *= 0.5) {
        for (std::size_t i = offset[blk]; i < offset[blk + 1]; ++i) {
          trial[i] = theta[i] - lr[blk] * grad[i];
        }
        assign_flat(candidate, trial);
        next = channel_total(candidate, k);
        if (std::isfinite(next) && next <= ch_nll[k]) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        lr[blk] = cfg.lr;
        assign_flat(candidate, theta);
        continue;
      }
      any_step = true;
      improvement += ch_nll[k] - next;
      ch_nll[k] = next;
      theta = std::move(trial);
      traj = candidate;
      lr[blk] = std::min(2.0 * lr[blk], cfg.lr);
    }
    result.iterations = iter + 1;
    current = 0.0;
    for (double v : ch_nll) current += v;
    if (!any_step || improvement < cfg.tol) {
      break;
    }
  }
  current = nll(traj, label, times);
  if (!std::isfinite(current)) {
    throw Error(ErrorCode::kNonFinite, "NLL diverged");
  }
  result.traj = std::move(traj);
  result.final_nll = current;
  return result;
}

enum class ResidualAxis { kAlong, kCross, kX, kY, kSin, kCos };

struct ResidualSample
{
  double residual = 0.0;
  double scale = 1.0;
};

/// Label-minus-mean residual on one axis with the matching Laplace scale.
/// Along/cross axes follow the predicted heading (cross = left normal); their
/// scale combines the per-axis scales as |n_x| b_x + |n_y| b_y.
inline ResidualSample residual_sample(
  const ProbPolyTraj & pred, const WaypointTrack & label, double t, ResidualAxis axis)
{
  const SE2Pose & truth = label.pose_at_stamp(t);
  const double T = pred.horizon_T;
  auto params = [&](Channel ch) { return channel_pdf_params(pred.channel(ch), T, t); };
  auto single = [&](Channel ch) {
    const auto p = params(ch);
    return ResidualSample{channel_value(truth, ch) - p.mu, p.b};
  };
  switch (axis) {
    case ResidualAxis::kX: return single(Channel::kX);
    case ResidualAxis::kY: return single(Channel::kY);
    case ResidualAxis::kSin:
    case ResidualAxis::kCos:
      if (!pred.has_heading || !label.has_heading()) {
        throw Error(ErrorCode::kHeadingUnavailable, "heading channel requested without heading");
      }
      return single(axis == ResidualAxis::kSin ? Channel::kSin : Channel::kCos);
    case ResidualAxis::kAlong:
    case ResidualAxis::kCross: break;
  }
  if (!pred.has_heading) {
    throw Error(ErrorCode::kHeadingUnavailable, "along/cross axes need a predicted heading");
  }
  const auto px = params(Channel::kX);
  const auto py = params(Channel::kY);
  const auto [s, c] = normalize_heading(params(Channel::kSin).mu, params(Channel::kCos).mu);
  const Vec2 dir = axis == ResidualAxis::kAlong ? Vec2{c, s} : Vec2{-s, c};
  const Vec2 d{truth.x - px.mu, truth.y - py.mu};
  return {dot(d, dir), std::abs(dir.x) * px.b + std::abs(dir.y) * py.b};
}

struct ReliabilityCurve
{
  std::vector<double> nominal;
  std::vector<double> empirical;
  std::size_t count = 0;
};

/// 19 nominal levels 0.05, 0.10, ..., 0.95.
inline std::vector<double> default_nominal_levels()
{
  std::vector<double> out;
  for (int k = 1; k <= 19; ++k) {
    out.push_back(static_cast<double>(k) / 20.0);
  }
  return out;
}

/// Half-width of the centered interval holding mass p under Laplace(0, b).
inline double laplace_half_width(double p, double b) { return -b * std::log1p(-p); }

inline ReliabilityCurve reliability_from_samples(
  std::span<const ResidualSample> samples, std::span<const double> nominal)
{
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no residuals for reliability curve");
  }
  ReliabilityCurve curve;
  curve.nominal.assign(nominal.begin(), nominal.end());
  curve.count = samples.size();
  for (double p : nominal) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw Error(ErrorCode::kInvalidInput, "nominal levels must lie in [0, 1)");
    }
    std::size_t inside = 0;
    for (const auto & smp : samples) {
      inside += std::abs(smp.residual) <= laplace_half_width(p, smp.scale) ? 1 : 0;
    }
    curve.empirical.push_back(static_cast<double>(inside) / static_cast<double>(samples.size()));
  }
  return curve;
}

inline ReliabilityCurve reliability_curve(
  std::span<const ProbPolyTraj> preds, std::span<const WaypointTrack> labels,
  std::span<const double> times, ResidualAxis axis,
  std::span<const double> nominal)
{
  if (preds.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidInput, "predictions and labels must pair up");
  }
  std::vector<ResidualSample> samples;
  samples.reserve(preds.size() * times.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (double t : times) {
      samples.push_back(residual_sample(preds[i], labels[i], t, axis));
    }
  }
  return reliability_from_samples(samples, nominal);
}

inline ReliabilityCurve reliability_curve(
  std::span<const ProbPolyTraj> preds, std::span<const WaypointTrack> labels,
  std::span<const double> times, ResidualAxis axis)
{
  const auto levels = default_nominal_levels();
  return reliability_curve(preds, labels, times, axis, levels);
}

}  // namespace polytraj

#endif  // POLYTRAJ_PROB_LAPLACE_HPP_
