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

// Benchmark studies behind the polytraj_bench subcommands. Every study is a
// pure function of its dataset records and config and returns the CSV
// tables it would write.

#ifndef POLYTRAJ_STUDIES_HPP_
#define POLYTRAJ_STUDIES_HPP_

#include "polytraj/error.hpp"
#include "polytraj/io.hpp"
#include "polytraj/kinematics.hpp"
#include "polytraj/metrics.hpp"
#include "polytraj/polyfit.hpp"
#include "polytraj/prob_laplace.hpp"
#include "polytraj/synthgen.hpp"
#include "polytraj/traj_core.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace polytraj::study
{

inline std::string rep_name(int degree) { return "P" + std::to_string(degree); }

// ---------------------------------------------------------------- synth

struct SynthConfig
{
  GenConfig gen;
  double sigma_pos = 0.0;
  double sigma_theta = 0.0;
};

inline std::vector<DatasetRecord> synthesize(const SynthConfig & cfg)
{
  const auto actors = generate(cfg.gen);
  const bool noisy = cfg.sigma_pos > 0.0 || cfg.sigma_theta > 0.0;
  std::vector<DatasetRecord> out;
  out.reserve(actors.size());
  for (const auto & a : actors) {
    std::optional<WaypointTrack> n;
    if (noisy) {
      n = add_observation_noise(a, cfg.sigma_pos, cfg.sigma_theta, cfg.gen.seed);
    }
    out.push_back(to_record(a, std::move(n)));
  }
  return out;
}

/// Noisy observations of a record: stored ones if present, else drawn now.
inline WaypointTrack observed_track(
  const DatasetRecord & rec, double sigma_pos, double sigma_theta, std::uint64_t seed)
{
  if (rec.noisy) {
    return *rec.noisy;
  }
  return add_observation_noise(rec.track, rec.id, sigma_pos, sigma_theta, seed);
}

inline double record_horizon(const DatasetRecord & rec)
{
  const double T = rec.track.end_time();
  if (!(T > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "record " + std::to_string(rec.id) + " spans no time");
  }
  return T;
}

// ------------------------------------------------------------ fit study

struct FitStudyConfig
{
  std::vector<int> degrees{2, 3, 4};
  // Cumulative table runs in 0.01 m steps up to max(2 m, largest error).
  double min_threshold_max = 2.0;
};

struct FitStudyResult
{
  CsvTable errors;
  CsvTable cumulative;
  std::vector<std::vector<double>> per_degree_errors;  // [degree index][record]
};

inline FitStudyResult run_fit_study(const std::vector<DatasetRecord> & records, const FitStudyConfig & cfg)
{
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "fit study needs at least one record");
  }
  if (cfg.degrees.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "fit study needs at least one degree");
  }
  FitStudyResult res;
  res.errors.kind = "fit_errors";
  res.errors.header = {"id", "class", "degree", "max_corner_error_m", "total_sq_corner_error_m2"};
  res.per_degree_errors.resize(cfg.degrees.size());
  double worst = 0.0;
  for (const auto & rec : records) {
    const double T = record_horizon(rec);
    for (std::size_t k = 0; k < cfg.degrees.size(); ++k) {
      const int d = cfg.degrees[k];
      const FitResult fit = fit_label(rec.track, rec.box, {d, d, T, 0.0});
      res.per_degree_errors[k].push_back(fit.max_corner_error);
      worst = std::max(worst, fit.max_corner_error);
      res.errors.rows.push_back({std::to_string(rec.id), std::string(to_string(rec.actor_class)),
        std::to_string(d), format_num(fit.max_corner_error), format_num(fit.total_sq_corner_error)});
    }
  }
  const auto steps = static_cast<std::int64_t>(
    std::max(std::round(cfg.min_threshold_max * 100.0), std::ceil(worst * 100.0)));
  std::vector<double> thresholds;
  for (std::int64_t k = 0; k <= steps; ++k) {
    thresholds.push_back(static_cast<double>(k) / 100.0);
  }
  res.cumulative.kind = "fit_cumulative";
  res.cumulative.header = {"threshold_m"};
  std::vector<std::vector<double>> curves;
  for (std::size_t k = 0; k < cfg.degrees.size(); ++k) {
    res.cumulative.header.push_back("fraction_" + rep_name(cfg.degrees[k]));
    curves.push_back(cumulative_error_curve(res.per_degree_errors[k], thresholds));
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    std::vector<std::string> row{format_num(thresholds[i])};
    for (const auto & c : curves) row.push_back(format_num(c[i]));
    res.cumulative.rows.push_back(std::move(row));
  }
  return res;
}

// --------------------------------------------------------- interp study

struct InterpStudyConfig
{
  double tau = 2.0;
  std::vector<double> eval_times{1.0, 2.0, 3.0, 4.0};
  int degree = 2;
  double sigma_pos = 0.0;
  double sigma_theta = 0.0;
  std::uint64_t seed = 0;
  double min_speed = kStaticSpeedThreshold;
};

struct InterpStudyResult
{
  CsvTable table;
  MetricReport wp;
  MetricReport poly;
  bool has_heading = true;
};

inline std::vector<double> supervision_times(double horizon, double tau)
{
  try {
    return uniform_times(horizon, tau);
  } catch (const Error &) {
    throw Error(ErrorCode::kInvalidConfig, "horizon must be an integer multiple of tau");
  }
}

/// WP: the noisy supervision waypoints, linearly interpolated. Pd: corner
/// fit on the same noisy supervision. Both scored against noise-free labels.
inline InterpStudyResult run_interp_study(
  const std::vector<DatasetRecord> & records, const InterpStudyConfig & cfg)
{
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "interp study needs at least one record");
  }
  std::vector<WaypointTrack> labels;
  std::vector<WaypointTrack> wps;
  std::vector<PolyTraj> polys;
  InterpStudyResult res;
  for (const auto & rec : records) {
    const double T = record_horizon(rec);
    const auto sup = supervision_times(T, cfg.tau);
    const WaypointTrack observed = observed_track(rec, cfg.sigma_pos, cfg.sigma_theta, cfg.seed);
    WaypointTrack wp = observed.subset(sup);
    polys.push_back(fit_label(wp, rec.box, {cfg.degree, cfg.degree, T, 0.0}).traj);
    wps.push_back(std::move(wp));
    labels.push_back(rec.track);
    res.has_heading = res.has_heading && rec.track.has_heading();
  }
  EvalSpec spec;
  spec.eval_times = cfg.eval_times;
  spec.min_speed_filter = cfg.min_speed;
  res.wp = evaluate_batch<WaypointTrack>(wps, labels, spec, "WP");
  res.poly = evaluate_batch<PolyTraj>(polys, labels, spec, rep_name(cfg.degree));

  res.table.kind = "interp";
  res.table.header = {"representation", "time_s", "count", "mean_de_m"};
  if (res.has_heading) res.table.header.push_back("mean_dtheta_deg");
  for (const MetricReport * rep : {&res.wp, &res.poly}) {
    for (std::size_t i = 0; i < rep->times.size(); ++i) {
      std::vector<std::string> row{rep->representation, format_num(rep->times[i]),
        std::to_string(rep->counts[i]), format_num(rep->de_per_time[i])};
      if (res.has_heading) row.push_back(format_num(rep->dtheta_per_time[i]));
      res.table.rows.push_back(std::move(row));
    }
  }
  return res;
}

// ------------------------------------------------------ calibrate study

struct CalibrateConfig
{
  std::vector<int> degrees_b{0, 1, 2};
  int degree_mu = 3;
  std::vector<double> eval_times{0.0, 2.0, 4.0};
  // Laplace observation noise on x and y with scale b0 + b1 * t / T.
  double noise_b0 = 0.1;
  double noise_b1 = 0.9;
  std::uint64_t seed = 0;
  double lr = 1e-2;
  int max_iters = 1000;
  double tol = 1e-9;
};

struct CalibrateResult
{
  CsvTable table;
  // [degree index][time index]
  std::vector<std::vector<ReliabilityCurve>> curves;
};

/// Draws Laplace position noise with time-growing scale.
inline WaypointTrack laplace_noisy_track(
  const WaypointTrack & truth, double b0, double b1, std::uint64_t seed, std::uint64_t stream,
  std::uint64_t tag)
{
  Rng rng(seed, stream, tag);
  const double T = truth.end_time();
  std::vector<SE2Pose> poses = truth.poses();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const double b = b0 + b1 * truth.times()[i] / T;
    poses[i].x += rng.laplace(b);
    poses[i].y += rng.laplace(b);
  }
  return WaypointTrack(truth.times(), std::move(poses), truth.has_heading());
}

/// Fits Pk(b) per actor on one noise draw and scores coverage on an
/// independent draw. Cross-track axis for actors with heading, x otherwise.
inline CalibrateResult run_calibrate(const std::vector<DatasetRecord> & records, const CalibrateConfig & cfg)
{
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "calibration needs at least one record");
  }
  constexpr std::uint64_t kFitTag = 0x666974ULL;
  constexpr std::uint64_t kEvalTag = 0x6576616cULL;
  const auto levels = default_nominal_levels();
  CalibrateResult res;
  res.table.kind = "calibration";
  res.table.header = {"degree_b", "time_s", "nominal", "empirical", "count"};
  std::vector<WaypointTrack> fit_tracks;
  std::vector<WaypointTrack> eval_tracks;
  for (const auto & rec : records) {
    record_horizon(rec);
    fit_tracks.push_back(laplace_noisy_track(rec.track, cfg.noise_b0, cfg.noise_b1, cfg.seed, rec.id, kFitTag));
    eval_tracks.push_back(laplace_noisy_track(rec.track, cfg.noise_b0, cfg.noise_b1, cfg.seed, rec.id, kEvalTag));
  }
  for (int kb : cfg.degrees_b) {
    std::vector<std::vector<ResidualSample>> samples(cfg.eval_times.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto & rec = records[i];
      ProbFitConfig pc;
      pc.degree_mu = cfg.degree_mu;
      pc.degree_b = kb;
      pc.horizon_T = rec.track.end_time();
      pc.lr = cfg.lr;
      pc.max_iters = cfg.max_iters;
      pc.tol = cfg.tol;
      pc.box = rec.box;
      const auto fit = fit_prob(fit_tracks[i], fit_tracks[i].times(), pc);
      const auto axis = rec.track.has_heading() ? ResidualAxis::kCross : ResidualAxis::kX;
      for (std::size_t k = 0; k < cfg.eval_times.size(); ++k) {
        samples[k].push_back(residual_sample(fit.traj, eval_tracks[i], cfg.eval_times[k], axis));
      }
    }
    std::vector<ReliabilityCurve> per_time;
    for (std::size_t k = 0; k < cfg.eval_times.size(); ++k) {
      per_time.push_back(reliability_from_samples(samples[k], levels));
      const auto & c = per_time.back();
      for (std::size_t j = 0; j < c.nominal.size(); ++j) {
        res.table.rows.push_back({std::to_string(kb), format_num(cfg.eval_times[k]),
          format_num(c.nominal[j]), format_num(c.empirical[j]), std::to_string(c.count)});
      }
    }
    res.curves.push_back(std::move(per_time));
  }
  return res;
}

// ---------------------------------------------------- feasibility study

struct FeasibilityStudyConfig
{
  std::vector<int> degrees{2, 3};
  double sigma_pos = 0.1;
  double sigma_theta = 0.0;
  std::uint64_t seed = 0;
  HistogramWidths widths;
  double static_threshold = kStaticSpeedThreshold;
  double acc_limit = 8.0;
};

struct FeasibilityStudyResult
{
  CsvTable hist;
  CsvTable summary;
  CsvTable noise;
  std::vector<std::string> representations;
  // Per representation, per record; is_static follows the label.
  std::map<std::string, std::vector<FeasibilityStats>> stats;
  double fd_noise_std = 0.0;
  double expected_fd_noise_std = 0.0;
};

inline double infeasible_fraction(const std::vector<FeasibilityStats> & stats, double limit)
{
  std::size_t n = 0;
  std::size_t bad = 0;
  for (const auto & s : stats) {
    if (s.is_static) continue;
    ++n;
    bad += (s.max_lon_acc > limit || s.min_lon_acc < -limit) ? 1 : 0;
  }
  return n > 0 ? static_cast<double>(bad) / static_cast<double>(n) : std::nan("");
}

/// Label and WP are differentiated by finite differences on their 0.1 s
/// samples, Pd analytically at the same stamps. Records without heading are
/// skipped; trajectories whose label is static are excluded everywhere.
inline FeasibilityStudyResult run_feasibility(
  const std::vector<DatasetRecord> & records, const FeasibilityStudyConfig & cfg)
{
  FeasibilityStudyResult res;
  res.representations = {"Label", "WP"};
  for (int d : cfg.degrees) res.representations.push_back(rep_name(d));

  double sq_sum = 0.0;
  std::size_t sq_n = 0;
  double dt = 0.0;
  for (const auto & rec : records) {
    if (!rec.track.has_heading()) continue;
    const double T = record_horizon(rec);
    dt = rec.dt;
    const WaypointTrack observed = observed_track(rec, cfg.sigma_pos, cfg.sigma_theta, cfg.seed);
    const auto label_k = track_derivatives(rec.track);
    const auto wp_k = track_derivatives(observed);
    const FeasibilityStats label_st = feasibility_stats(label_k, cfg.static_threshold);
    auto push = [&](const std::string & name, FeasibilityStats st) {
      st.is_static = label_st.is_static;
      res.stats[name].push_back(st);
    };
    push("Label", label_st);
    push("WP", feasibility_stats(wp_k, cfg.static_threshold));
    for (int d : cfg.degrees) {
      const auto fit = fit_label(observed, rec.box, {d, d, T, 0.0});
      push(rep_name(d), feasibility_stats(poly_kinematics(fit.traj, rec.track.times()), cfg.static_threshold));
    }
    for (std::size_t i = 0; i < wp_k.size(); ++i) {
      if (!wp_k[i].has_acceleration) continue;
      const Vec2 e = wp_k[i].a - label_k[i].a;
      sq_sum += e.x * e.x + e.y * e.y;
      sq_n += 2;
    }
  }
  if (res.stats.empty()) {
    throw Error(ErrorCode::kEmptyInput, "feasibility study needs records with heading");
  }

  res.hist.kind = "feasibility_hist";
  res.hist.header = {"representation", "quantity", "bin_lo", "bin_hi", "fraction"};
  const char * qnames[] = {"max_lon_acc", "min_lon_acc", "max_lat_acc", "max_lat_speed"};
  for (const auto & name : res.representations) {
    for (std::size_t q = 0; q < kAllQuantities.size(); ++q) {
      const double w = cfg.widths.width(kAllQuantities[q]);
      const auto h = feasibility_histogram(res.stats[name], kAllQuantities[q], w);
      for (const auto & b : h.bins) {
        res.hist.rows.push_back({name, qnames[q], format_num(static_cast<double>(b.index) * w),
          format_num(static_cast<double>(b.index + 1) * w), format_num(b.fraction)});
      }
    }
  }

  res.summary.kind = "feasibility_summary";
  res.summary.header = {"representation", "count", "frac_lon_acc_beyond_limit", "mean_max_lon_acc",
    "mean_min_lon_acc", "mean_max_lat_acc", "mean_max_lat_speed"};
  for (const auto & name : res.representations) {
    const auto & v = res.stats[name];
    double m[4] = {0, 0, 0, 0};
    std::size_t n = 0;
    for (const auto & s : v) {
      if (s.is_static) continue;
      ++n;
      for (std::size_t q = 0; q < 4; ++q) m[q] += quantity_value(s, kAllQuantities[q]);
    }
    std::vector<std::string> row{name, std::to_string(n), format_num(infeasible_fraction(v, cfg.acc_limit))};
    for (double x : m) row.push_back(format_num(n > 0 ? x / static_cast<double>(n) : std::nan("")));
    res.summary.rows.push_back(std::move(row));
  }

  res.fd_noise_std = sq_n > 0 ? std::sqrt(sq_sum / static_cast<double>(sq_n)) : 0.0;
  res.expected_fd_noise_std = cfg.sigma_pos * std::sqrt(6.0) / (dt * dt);
  res.noise.kind = "feasibility_noise";
  res.noise.header = {"sigma_pos_m", "dt_s", "measured_fd_acc_std", "expected_fd_acc_std"};
  res.noise.rows.push_back({format_num(cfg.sigma_pos), format_num(dt), format_num(res.fd_noise_std),
    format_num(res.expected_fd_noise_std)});
  return res;
}

// --------------------------------------------------------------- report

struct ReportResult
{
  std::string text;
  nlohmann::json json;
  int exit_code = 0;  // 0 ok, 2 missing/unreadable input, 3 failed self-check
};

namespace detail
{

struct CheckLog
{
  nlohmann::json checks = nlohmann::json::array();
  bool all_ok = true;

  void add(const std::string & name, bool ok, const std::string & detail = {})
  {
    checks.push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
    all_ok = all_ok && ok;
  }
};

inline std::string cell_where(const std::string & file, std::size_t row)
{
  // +3: schema line, header, 1-based numbering
  return file + ":" + std::to_string(row + 3);
}

}  // namespace detail

/// Consolidates study CSVs found in dir and runs consistency checks on them.
inline ReportResult build_report(const std::string & dir)
{
  namespace fs = std::filesystem;
  struct Study
  {
    std::string name;
    std::vector<std::string> files;
  };
  const std::vector<Study> studies{
    {"fit", {"fit_errors.csv", "fit_cumulative.csv"}},
    {"interp", {"interp.csv"}},
    {"calibration", {"calibration.csv"}},
    {"feasibility", {"feasibility_hist.csv", "feasibility_summary.csv", "feasibility_noise.csv"}},
  };
  ReportResult out;
  out.json = nlohmann::json::object();
  std::string text = "polytraj benchmark report\n";
  bool missing = false;
  bool checks_ok = true;
  for (const auto & st : studies) {
    nlohmann::json sj = nlohmann::json::object();
    text += "\n[" + st.name + "]\n";
    std::map<std::string, CsvTable> tables;
    try {
      for (const auto & f : st.files) {
        const auto path = (fs::path(dir) / f).string();
        if (!fs::exists(path)) {
          throw Error(ErrorCode::kIo, "missing " + path);
        }
        tables[f] = read_csv(path);
      }
    } catch (const Error & e) {
      missing = true;
      sj["status"] = e.code() == ErrorCode::kSchema ? "schema_error" : "missing";
      sj["error"] = e.what();
      text += std::string("  unavailable: ") + e.what() + "\n";
      out.json[st.name] = sj;
      continue;
    }
    detail::CheckLog log;
    try {
      if (st.name == "fit") {
        const auto & errs = tables["fit_errors.csv"];
        const auto ec = errs.column("max_corner_error_m");
        bool nonneg = true;
        for (std::size_t r = 0; r < errs.rows.size(); ++r) {
          nonneg = nonneg && parse_num(errs.rows[r][ec], detail::cell_where("fit_errors.csv", r)) >= 0.0;
        }
        log.add("errors_nonnegative", nonneg);
        const auto & cum = tables["fit_cumulative.csv"];
        const auto tc = cum.column("threshold_m");
        bool has_13 = false;
        std::size_t row_13 = 0;
        for (std::size_t r = 0; r < cum.rows.size(); ++r) {
          if (std::abs(parse_num(cum.rows[r][tc], detail::cell_where("fit_cumulative.csv", r)) - 1.3) < 1e-9) {
            has_13 = true;
            row_13 = r;
          }
        }
        log.add("threshold_1.3_present", has_13);
        for (std::size_t c = 0; c < cum.header.size(); ++c) {
          if (c == tc) continue;
          bool mono = true;
          double prev = 0.0;
          for (std::size_t r = 0; r < cum.rows.size(); ++r) {
            const double v = parse_num(cum.rows[r][c], detail::cell_where("fit_cumulative.csv", r));
            mono = mono && v >= prev && v <= 1.0;
            prev = v;
          }
          log.add(cum.header[c] + "_monotone", mono);
          if (has_13) {
            const double f = parse_num(cum.rows[row_13][c], "fit_cumulative.csv");
            sj["fraction_below_1.3m"][cum.header[c].substr(9)] = f;
            text += "  " + cum.header[c].substr(9) + ": " + format_num(f * 100.0) + "% below 1.3 m\n";
          }
        }
      } else if (st.name == "interp") {
        const auto & t = tables["interp.csv"];
        const auto rc = t.column("representation");
        const auto tcol = t.column("time_s");
        const auto cc = t.column("count");
        const auto dc = t.column("mean_de_m");
        bool ok = true;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          const auto where = detail::cell_where("interp.csv", r);
          const double cnt = parse_num(t.rows[r][cc], where);
          const double de = parse_num(t.rows[r][dc], where);
          ok = ok && cnt >= 0.0 && (cnt == 0.0 ? std::isnan(de) : de >= 0.0);
          sj["mean_de_m"][t.rows[r][rc]][t.rows[r][tcol]] = de;
          text += "  " + t.rows[r][rc] + " t=" + t.rows[r][tcol] + "s DE=" + t.rows[r][dc] + " m (n=" +
            t.rows[r][cc] + ")\n";
        }
        log.add("counts_and_errors_valid", ok);
      } else if (st.name == "calibration") {
        const auto & t = tables["calibration.csv"];
        const auto kc = t.column("degree_b");
        const auto tcol = t.column("time_s");
        const auto nc = t.column("nominal");
        const auto ec = t.column("empirical");
        bool range = true;
        bool mono = true;
        std::string last_key;
        double prev = 0.0;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          const auto where = detail::cell_where("calibration.csv", r);
          const double nom = parse_num(t.rows[r][nc], where);
          const double emp = parse_num(t.rows[r][ec], where);
          const std::string key = t.rows[r][kc] + "@" + t.rows[r][tcol];
          if (key != last_key) prev = 0.0;
          range = range && emp >= 0.0 && emp <= 1.0;
          mono = mono && emp >= prev;
          prev = emp;
          last_key = key;
          if (std::abs(nom - 0.5) < 1e-12) {
            sj["empirical_at_0.5"]["P" + t.rows[r][kc] + "(b)"][t.rows[r][tcol]] = emp;
            text += "  P" + t.rows[r][kc] + "(b) t=" + t.rows[r][tcol] + "s coverage@0.5=" + t.rows[r][ec] + "\n";
          }
        }
        log.add("empirical_in_unit_interval", range);
        log.add("empirical_monotone_in_nominal", mono);
      } else if (st.name == "feasibility") {
        const auto & h = tables["feasibility_hist.csv"];
        const auto rc = h.column("representation");
        const auto qc = h.column("quantity");
        const auto fc = h.column("fraction");
        std::map<std::string, double> sums;
        for (std::size_t r = 0; r < h.rows.size(); ++r) {
          sums[h.rows[r][rc] + "/" + h.rows[r][qc]] +=
            parse_num(h.rows[r][fc], detail::cell_where("feasibility_hist.csv", r));
        }
        bool sum_ok = !sums.empty();
        for (const auto & [k, v] : sums) sum_ok = sum_ok && std::abs(v - 1.0) < 1e-9;
        log.add("histograms_sum_to_one", sum_ok);
        const auto & s = tables["feasibility_summary.csv"];
        const auto src = s.column("representation");
        const auto sfc = s.column("frac_lon_acc_beyond_limit");
        for (std::size_t r = 0; r < s.rows.size(); ++r) {
          const double f = parse_num(s.rows[r][sfc], detail::cell_where("feasibility_summary.csv", r));
          sj["frac_lon_acc_beyond_limit"][s.rows[r][src]] = f;
          text += "  " + s.rows[r][src] + ": " + format_num(f * 100.0) + "% beyond the acceleration limit\n";
        }
        const auto & n = tables["feasibility_noise.csv"];
        if (!n.rows.empty()) {
          const double meas = parse_num(n.rows[0][n.column("measured_fd_acc_std")], "feasibility_noise.csv:3");
          const double expct = parse_num(n.rows[0][n.column("expected_fd_acc_std")], "feasibility_noise.csv:3");
          sj["fd_noise_std"] = {{"measured", meas}, {"expected", expct}};
          text += "  FD acceleration noise std " + format_num(meas) + " (expected " + format_num(expct) + ")\n";
        }
      }
    } catch (const Error & e) {
      missing = true;
      sj["status"] = "schema_error";
      sj["error"] = e.what();
      text += std::string("  unreadable: ") + e.what() + "\n";
      out.json[st.name] = sj;
      continue;
    }
    sj["status"] = log.all_ok ? "ok" : "check_failed";
    sj["checks"] = log.checks;
    for (const auto & c : log.checks) {
      text += std::string("  check ") + c["name"].get<std::string>() + ": " +
        (c["ok"].get<bool>() ? "pass" : "FAIL") + "\n";
    }
    checks_ok = checks_ok && log.all_ok;
    out.json[st.name] = sj;
  }
  out.exit_code = missing ? 2 : (checks_ok ? 0 : 3);
  out.json["complete"] = !missing;
  out.json["all_checks_passed"] = checks_ok && !missing;
  text += std::string("\nstatus: ") + (out.exit_code == 0 ? "complete, all checks passed" :
    missing ? "partial report" : "self-check failure") + "\n";
  out.text = std::move(text);
  return out;
}

}  // namespace polytraj::study

#endif  // POLYTRAJ_STUDIES_HPP_
