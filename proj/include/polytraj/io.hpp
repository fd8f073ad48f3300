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

// JSONL datasets and versioned CSV tables.
//
// Dataset lines look like
//   {"id":0,"class":"vehicle","has_heading":true,"seed":7,
//    "box":{"length":4.6,"width":2},"dt":0.1,
//    "states":[[x,y,sin,cos],...],"noisy_states":[[...],...]}
// where waypoint i is stamped i * dt and "noisy_states" is optional. Floats
// are written with 17 significant digits.
//
// CSV files start with "# polytraj-csv schema=1 kind=<kind>", then a header
// row; fields are comma separated, '.' decimal, LF line endings.

#ifndef POLYTRAJ_IO_HPP_
#define POLYTRAJ_IO_HPP_

#include "polytraj/error.hpp"
#include "polytraj/synthgen.hpp"
#include "polytraj/traj_core.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace polytraj
{

struct DatasetRecord
{
  std::uint64_t id = 0;
  ActorClass actor_class = ActorClass::kVehicle;
  std::uint64_t seed = 0;
  OrientedBox box;
  double dt = 0.1;
  WaypointTrack track{{0.0}, {SE2Pose{}}};
  std::optional<WaypointTrack> noisy;
};

inline DatasetRecord to_record(const LabeledActor & actor, std::optional<WaypointTrack> noisy = {})
{
  return {actor.id, actor.actor_class, actor.seed, actor.box, actor.dt, actor.track, std::move(noisy)};
}

/// %.17g rendering; non-finite values are rejected.
inline std::string format_double17(double v)
{
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFinite, "cannot serialize a non-finite value");
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail
{

inline void append_states(std::string & out, const WaypointTrack & track)
{
  out += '[';
  for (std::size_t i = 0; i < track.size(); ++i) {
    const SE2Pose & p = track.poses()[i];
    if (i > 0) out += ',';
    out += '[';
    out += format_double17(p.x);
    out += ',';
    out += format_double17(p.y);
    out += ',';
    out += format_double17(p.s);
    out += ',';
    out += format_double17(p.c);
    out += ']';
  }
  out += ']';
}

}  // namespace detail

inline std::string format_record(const DatasetRecord & rec)
{
  std::string out = "{\"id\":" + std::to_string(rec.id);
  out += ",\"class\":\"";
  out += to_string(rec.actor_class);
  out += "\",\"has_heading\":";
  out += rec.track.has_heading() ? "true" : "false";
  out += ",\"seed\":" + std::to_string(rec.seed);
  out += ",\"box\":{\"length\":" + format_double17(rec.box.length) + ",\"width\":" +
    format_double17(rec.box.width) + "}";
  out += ",\"dt\":" + format_double17(rec.dt);
  out += ",\"states\":";
  detail::append_states(out, rec.track);
  if (rec.noisy) {
    out += ",\"noisy_states\":";
    detail::append_states(out, *rec.noisy);
  }
  out += '}';
  return out;
}

inline void write_dataset(const std::string & path, const std::vector<DatasetRecord> & records)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  }
  for (const auto & rec : records) {
    os << format_record(rec) << '\n';
  }
  if (!os) {
    throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
  }
}

namespace detail
{

inline WaypointTrack parse_states(const nlohmann::json & arr, double dt, bool heading)
{
  if (!arr.is_array() || arr.empty()) {
    throw std::runtime_error("states must be a non-empty array");
  }
  std::vector<double> times;
  std::vector<SE2Pose> poses;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto & row = arr[i];
    if (!row.is_array() || row.size() != 4) {
      throw std::runtime_error("each state must be [x, y, sin, cos]");
    }
    for (const auto & v : row) {
      if (!v.is_number()) {
        throw std::runtime_error("state entries must be numbers");
      }
    }
    times.push_back(static_cast<double>(i) * dt);
    poses.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>()});
  }
  return WaypointTrack(std::move(times), std::move(poses), heading);
}

}  // namespace detail

inline DatasetRecord parse_record(std::string_view line)
{
  const auto j = nlohmann::json::parse(line);
  DatasetRecord rec;
  rec.id = j.at("id").get<std::uint64_t>();
  rec.actor_class = parse_actor_class(j.at("class").get<std::string>());
  rec.seed = j.value("seed", std::uint64_t{0});
  rec.box = {j.at("box").at("length").get<double>(), j.at("box").at("width").get<double>()};
  rec.box.validate();
  rec.dt = j.at("dt").get<double>();
  if (!(rec.dt > 0.0)) {
    throw std::runtime_error("dt must be positive");
  }
  const bool heading =
    j.value("has_heading", rec.actor_class != ActorClass::kPedestrian);
  rec.track = detail::parse_states(j.at("states"), rec.dt, heading);
  if (j.contains("noisy_states")) {
    rec.noisy = detail::parse_states(j.at("noisy_states"), rec.dt, heading);
    if (rec.noisy->size() != rec.track.size()) {
      throw std::runtime_error("noisy_states length differs from states");
    }
  }
  return rec;
}

/// Reads a JSONL dataset; malformed lines raise a Schema error naming file
/// and line.
inline std::vector<DatasetRecord> read_dataset(const std::string & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::kIo, "cannot open dataset '" + path + "'");
  }
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(parse_record(line));
    } catch (const std::exception & e) {
      throw Error(ErrorCode::kSchema, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline constexpr int kCsvSchemaVersion = 1;

struct CsvTable
{
  std::string kind;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const
  {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorCode::kSchema, "table '" + kind + "' has no column '" + std::string(name) + "'");
  }
};

/// Fixed 12-significant-digit rendering used in CSV output.
inline std::string format_num(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string render_csv(const CsvTable & t)
{
  std::ostringstream os;
  os << "# polytraj-csv schema=" << kCsvSchemaVersion << " kind=" << t.kind << '\n';
  auto emit = [&](const std::vector<std::string> & row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) os << ',';
      os << row[i];
    }
    os << '\n';
  };
  emit(t.header);
  for (const auto & r : t.rows) emit(r);
  return os.str();
}

inline void write_csv(const std::string & path, const CsvTable & t)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  }
  os << render_csv(t);
  if (!os) {
    throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
  }
}

inline CsvTable parse_csv(std::string_view text, const std::string & name)
{
  auto fail = [&](std::size_t line, const std::string & msg) -> void {
    throw Error(ErrorCode::kSchema, name + ":" + std::to_string(line) + ": " + msg);
  };
  CsvTable t;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string & out) {
    if (pos >= text.size()) return false;
    const auto nl = text.find('\n', pos);
    out = std::string(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    return true;
  };
  auto split = [](const std::string & s) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto c = s.find(',', start);
      f.push_back(s.substr(start, c == std::string::npos ? std::string::npos : c - start));
      if (c == std::string::npos) break;
      start = c + 1;
    }
    return f;
  };
  std::string line;
  if (!next_line(line)) fail(1, "empty file");
  const std::string prefix = "# polytraj-csv schema=";
  if (line.rfind(prefix, 0) != 0) fail(lineno, "missing schema comment line");
  {
    std::istringstream is(line.substr(prefix.size()));
    int version = 0;
    std::string kind_tok;
    if (!(is >> version) || !(is >> kind_tok) || kind_tok.rfind("kind=", 0) != 0) {
      fail(lineno, "malformed schema comment line");
    }
    if (version != kCsvSchemaVersion) {
      fail(lineno, "unsupported schema version " + std::to_string(version));
    }
    t.kind = kind_tok.substr(5);
  }
  if (!next_line(line) || line.empty()) fail(lineno, "missing header row");
  t.header = split(line);
  while (next_line(line)) {
    if (line.empty()) {
      fail(lineno, "empty row");
    }
    auto f = split(line);
    if (f.size() != t.header.size()) {
      fail(lineno, "expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(f.size()));
    }
    t.rows.push_back(std::move(f));
  }
  return t;
}

inline CsvTable read_csv(const std::string & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_csv(ss.str(), path);
}

/// Parses a numeric CSV cell ("nan" allowed); Schema error otherwise.
inline double parse_num(const std::string & cell, const std::string & where)
{
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw Error(ErrorCode::kSchema, where + ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace polytraj

#endif  // POLYTRAJ_IO_HPP_
