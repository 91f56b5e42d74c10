// Copyright 2026 The rs2ad Authors
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

#include "rs2ad/lidar_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rs2ad/errors.hpp"

namespace rs2ad {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
// Slack applied when binning so a direction generated from a ray center (or
// sitting exactly on a bin edge) lands deterministically despite rounding.
constexpr double kBinSlack = 1e-12;

double deg2rad(double deg) { return deg * kDegToRad; }

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

SectorIndex sector_of(RayIndex idx, std::array<int, 2> shape) {
  if (shape[0] <= 0 || shape[1] <= 0) {
    throw Error("sector shape entries must be positive");
  }
  return {idx.beam / shape[0], idx.azimuth_step / shape[1]};
}

LidarModel::LidarModel(LidarConfig config) : config_(std::move(config)) {
  const auto& c = config_;
  if (c.vertical_fov_deg[0] >= c.vertical_fov_deg[1]) {
    throw Error("vertical FOV must satisfy min < max");
  }
  if (c.elevation_table_deg.empty()) {
    throw Error("elevation table must not be empty");
  }
  const double lo = c.vertical_fov_deg[0] - 1e-9;
  const double hi = c.vertical_fov_deg[1] + 1e-9;
  for (std::size_t j = 0; j < c.elevation_table_deg.size(); ++j) {
    const double e = c.elevation_table_deg[j];
    if (e < lo || e > hi) {
      throw Error("beam " + std::to_string(j) + " elevation " + shortest(e) +
                  " deg lies outside the vertical FOV");
    }
    if (j > 0 && e <= c.elevation_table_deg[j - 1]) {
      throw Error("elevation table must be strictly ascending (beam " +
                  std::to_string(j) + ")");
    }
  }
  if (!(c.azimuth_resolution_deg > 0.0)) {
    throw Error("azimuth resolution must be positive");
  }
  if (!(c.horizontal_fov_deg > 0.0) || c.horizontal_fov_deg > 360.0) {
    throw Error("horizontal FOV must lie in (0, 360] degrees");
  }
  const double steps = c.horizontal_fov_deg / c.azimuth_resolution_deg;
  azimuth_steps_ = static_cast<int>(std::lround(steps));
  if (azimuth_steps_ < 1 || std::abs(steps - azimuth_steps_) > 1e-6) {
    throw Error("horizontal FOV must be an integer multiple of the azimuth resolution");
  }
  if (!(c.range_m[0] >= 0.0) || !(c.range_m[0] < c.range_m[1])) {
    throw Error("range limits must satisfy 0 <= min < max");
  }
  if (!c.mount_pose.is_rigid()) {
    throw NonOrthonormalInput("mount pose rotation is not orthonormal");
  }

  full_circle_ = std::abs(c.horizontal_fov_deg - 360.0) < 1e-9;
  horizontal_fov_rad_ = deg2rad(c.horizontal_fov_deg);
  azimuth_resolution_rad_ = deg2rad(c.azimuth_resolution_deg);

  const int k = beam_count();
  beam_polar_.resize(k);
  for (int j = 0; j < k; ++j) {
    beam_polar_[j] = kPi / 2.0 - deg2rad(c.elevation_table_deg[j]);
  }
  // Ascending polar edges: the FOV top, then every beam polar angle except
  // the last in descending beam order, then the FOV bottom.
  polar_edges_.resize(k + 1);
  polar_edges_[0] = kPi / 2.0 - deg2rad(c.vertical_fov_deg[1]);
  for (int s = 1; s < k; ++s) {
    polar_edges_[s] = beam_polar_[k - 1 - s];
  }
  polar_edges_[k] = kPi / 2.0 - deg2rad(c.vertical_fov_deg[0]);

  mount_ = invert(config_.mount_pose);
  mount_.from = Frame::vehicle;
  mount_.to = Frame::lidar;
}

double LidarModel::beam_elevation_deg(int beam) const {
  if (beam < 0 || beam >= beam_count()) {
    throw IndexOutOfRange("beam index " + std::to_string(beam) + " out of range");
  }
  return config_.elevation_table_deg[beam];
}

double LidarModel::beam_polar(int beam) const {
  if (beam < 0 || beam >= beam_count()) {
    throw IndexOutOfRange("beam index " + std::to_string(beam) + " out of range");
  }
  return beam_polar_[beam];
}

double LidarModel::step_azimuth(int step) const {
  if (step < 0 || step >= azimuth_steps_) {
    throw IndexOutOfRange("azimuth step " + std::to_string(step) + " out of range");
  }
  return step * azimuth_resolution_rad_;
}

Eigen::Vector3d LidarModel::ray_direction(RayIndex idx) const {
  const double theta = beam_polar(idx.beam);
  const double phi = step_azimuth(idx.azimuth_step);
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

std::optional<RayIndex> LidarModel::bin(const SphericalCoord& s) const {
  const int k = beam_count();
  const double theta_top = polar_edges_[0];
  const double theta_bottom = polar_edges_[k];
  if (s.polar < theta_top - kBinSlack || s.polar > theta_bottom + kBinSlack) {
    return std::nullopt;
  }
  const double theta = std::clamp(s.polar, theta_top, theta_bottom);
  auto it = std::upper_bound(polar_edges_.begin(), polar_edges_.end(),
                             theta + kBinSlack);
  int slot = static_cast<int>(it - polar_edges_.begin()) - 1;
  if (slot >= k) slot = k - 1;  // exactly on the bottom FOV edge
  const int beam = k - 1 - slot;

  double phi = s.azimuth;
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi -= 2.0 * kPi;
  if (!full_circle_ && phi >= horizontal_fov_rad_ + kBinSlack) {
    return std::nullopt;
  }
  int step = static_cast<int>(std::floor((phi + kBinSlack) / azimuth_resolution_rad_));
  if (step >= azimuth_steps_) {
    step = full_circle_ ? 0 : azimuth_steps_ - 1;
  }
  return RayIndex{step, beam};
}

int LidarModel::sector_rows(std::array<int, 2> shape) const {
  if (shape[0] <= 0) throw Error("sector shape entries must be positive");
  return (beam_count() + shape[0] - 1) / shape[0];
}

int LidarModel::sector_cols(std::array<int, 2> shape) const {
  if (shape[1] <= 0) throw Error("sector shape entries must be positive");
  return (azimuth_steps_ + shape[1] - 1) / shape[1];
}

std::vector<double> pandar64_elevation_table() {
  // Synthetic 64-beam layout: coarse coverage toward both FOV limits and
  // roughly doubled density across [-6, 2] deg where traffic sits.
  std::vector<double> table;
  table.reserve(64);
  for (int i = 0; i < 24; ++i) {
    table.push_back(-25.0 + i * (19.0 / 24.0));
  }
  for (int i = 0; i < 21; ++i) {
    table.push_back(-6.0 + i * 0.4);
  }
  for (int i = 1; i <= 19; ++i) {
    table.push_back(2.0 + i * (13.0 / 19.0));
  }
  return table;
}

LidarModel LidarModel::pandar64() {
  LidarConfig cfg;
  cfg.vertical_fov_deg = {-25.0, 15.0};
  cfg.horizontal_fov_deg = 360.0;
  cfg.elevation_table_deg = pandar64_elevation_table();
  cfg.azimuth_resolution_deg = 0.2;
  cfg.range_m = {0.5, 200.0};
  cfg.mount_pose = RigidTransform::pure_translation({0.0, 0.0, 0.25});
  return LidarModel(std::move(cfg));
}

namespace {

// --- key-value config format ------------------------------------------------
//
//   # comment
//   vertical_fov_deg = [-25, 15]
//   horizontal_fov_deg = 360
//   beam_count = 64
//   elevation_table_deg = [-25, ..., 15]
//   azimuth_resolution_deg = 0.2
//   range_m = [0.5, 200]
//   mount = {rotation_vector_rad = [0, 0, 0], translation_m = [0, 0, 0.25]}

struct RawValue {
  std::string text;
  int line = 0;
};

[[noreturn]] void fail(const std::string& source, int line, const std::string& key,
                       const std::string& what) {
  throw ConfigParseError(source + ":" + std::to_string(line) + ": key '" + key +
                         "': " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& source, int line, const std::string& key,
                    const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    fail(source, line, key, "expected a number, got '" + t + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& source, int line,
                               const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    fail(source, line, key, "expected a [..] list, got '" + t + "'");
  }
  std::vector<double> out;
  std::string body = t.substr(1, t.size() - 2);
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string item = trim(comma == std::string::npos
                                ? body.substr(start)
                                : body.substr(start, comma - start));
    if (!item.empty()) {
      out.push_back(parse_number(source, line, key, item));
    } else if (comma != std::string::npos || !out.empty()) {
      fail(source, line, key, "empty list element");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> expect_list(const std::string& source, const RawValue& raw,
                                const std::string& key, std::size_t n) {
  auto v = parse_list(source, raw.line, key, raw.text);
  if (v.size() != n) {
    fail(source, raw.line, key,
         "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  }
  return v;
}

// Splits the body of a {..} map at top-level commas (commas inside [] nest).
std::map<std::string, std::string> parse_map(const std::string& source, int line,
                                             const std::string& key,
                                             const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '{' || t.back() != '}') {
    fail(source, line, key, "expected a {..} map, got '" + t + "'");
  }
  std::map<std::string, std::string> out;
  std::string body = t.substr(1, t.size() - 2);
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    const bool at_end = i == body.size();
    const char ch = at_end ? ',' : body[i];
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      std::string entry = trim(body.substr(start, i - start));
      start = i + 1;
      if (entry.empty()) continue;
      const auto eq = entry.find('=');
      if (eq == std::string::npos) {
        fail(source, line, key, "map entry '" + entry + "' is missing '='");
      }
      std::string inner = trim(entry.substr(0, eq));
      if (inner.empty()) fail(source, line, key, "map entry with empty name");
      if (!out.emplace(inner, trim(entry.substr(eq + 1))).second) {
        fail(source, line, key, "duplicate map entry '" + inner + "'");
      }
    }
  }
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += shortest(v[i]);
  }
  out += "]";
  return out;
}

}  // namespace

LidarConfig parse_lidar_config(std::istream& in, const std::string& source_name) {
  std::map<std::string, RawValue> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError(source_name + ":" + std::to_string(line_no) +
                             ": expected 'key = value', got '" + stripped + "'");
    }
    std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw ConfigParseError(source_name + ":" + std::to_string(line_no) +
                             ": missing key before '='");
    }
    if (!raw.emplace(key, RawValue{trim(stripped.substr(eq + 1)), line_no}).second) {
      fail(source_name, line_no, key, "duplicate key");
    }
  }

  static const std::array<std::string, 7> known = {
      "vertical_fov_deg",  "horizontal_fov_deg",     "beam_count",
      "elevation_table_deg", "azimuth_resolution_deg", "range_m",
      "mount"};
  for (const auto& [key, value] : raw) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(source_name, value.line, key, "unknown key");
    }
  }
  auto require = [&](const std::string& key) -> const RawValue& {
    auto it = raw.find(key);
    if (it == raw.end()) {
      throw ConfigParseError(source_name + ": key '" + key + "': missing");
    }
    return it->second;
  };

  LidarConfig cfg;
  {
    auto fov = expect_list(source_name, require("vertical_fov_deg"), "vertical_fov_deg", 2);
    cfg.vertical_fov_deg = {fov[0], fov[1]};
  }
  {
    const auto& r = require("horizontal_fov_deg");
    cfg.horizontal_fov_deg = parse_number(source_name, r.line, "horizontal_fov_deg", r.text);
  }
  {
    const auto& r = require("elevation_table_deg");
    cfg.elevation_table_deg = parse_list(source_name, r.line, "elevation_table_deg", r.text);
  }
  {
    const auto& r = require("beam_count");
    const double n = parse_number(source_name, r.line, "beam_count", r.text);
    if (n != std::floor(n) || n < 1) {
      fail(source_name, r.line, "beam_count", "expected a positive integer");
    }
    if (static_cast<std::size_t>(n) != cfg.elevation_table_deg.size()) {
      fail(source_name, r.line, "beam_count",
           "declares " + shortest(n) + " beams but the elevation table has " +
               std::to_string(cfg.elevation_table_deg.size()) + " entries");
    }
  }
  {
    const auto& r = require("azimuth_resolution_deg");
    cfg.azimuth_resolution_deg =
        parse_number(source_name, r.line, "azimuth_resolution_deg", r.text);
  }
  {
    auto range = expect_list(source_name, require("range_m"), "range_m", 2);
    cfg.range_m = {range[0], range[1]};
  }
  if (auto it = raw.find("mount"); it != raw.end()) {
    auto entries = parse_map(source_name, it->second.line, "mount", it->second.text);
    RotationVector rot{0.0, 0.0, 0.0};
    Eigen::Vector3d trans{0.0, 0.0, 0.0};
    for (const auto& [name, text] : entries) {
      RawValue inner{text, it->second.line};
      if (name == "rotation_vector_rad") {
        auto v = expect_list(source_name, inner, "mount.rotation_vector_rad", 3);
        rot = {v[0], v[1], v[2]};
      } else if (name == "translation_m") {
        auto v = expect_list(source_name, inner, "mount.translation_m", 3);
        trans = {v[0], v[1], v[2]};
      } else {
        fail(source_name, it->second.line, "mount", "unknown map entry '" + name + "'");
      }
    }
    cfg.mount_pose.rotation = to_rotation_matrix(rot);
    cfg.mount_pose.translation = trans;
  } else {
    cfg.mount_pose = RigidTransform::pure_translation({0.0, 0.0, 0.25});
  }
  return cfg;
}

LidarConfig load_lidar_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoFailure("cannot open sensor config '" + path.string() + "'");
  }
  return parse_lidar_config(in, path.string());
}

std::string format_lidar_config(const LidarConfig& config) {
  std::ostringstream out;
  out << "# rs2ad virtual sensor configuration\n";
  out << "vertical_fov_deg = "
      << format_list({config.vertical_fov_deg[0], config.vertical_fov_deg[1]}) << "\n";
  out << "horizontal_fov_deg = " << shortest(config.horizontal_fov_deg) << "\n";
  out << "beam_count = " << config.elevation_table_deg.size() << "\n";
  out << "elevation_table_deg = " << format_list(config.elevation_table_deg) << "\n";
  out << "azimuth_resolution_deg = " << shortest(config.azimuth_resolution_deg) << "\n";
  out << "range_m = " << format_list({config.range_m[0], config.range_m[1]}) << "\n";
  const RotationVector rot = to_rotation_vector(config.mount_pose.rotation);
  const Eigen::Vector3d& t = config.mount_pose.translation;
  out << "mount = {rotation_vector_rad = " << format_list({rot.x(), rot.y(), rot.z()})
      << ", translation_m = " << format_list({t.x(), t.y(), t.z()}) << "}\n";
  return out.str();
}

void save_lidar_config(const std::filesystem::path& path, const LidarConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoFailure("cannot write sensor config '" + path.string() + "'");
  }
  out << format_lidar_config(config);
  if (!out) {
    throw IoFailure("failed writing sensor config '" + path.string() + "'");
  }
}

}  // namespace rs2ad
