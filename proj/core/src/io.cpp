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

#include "rs2ad/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rs2ad/errors.hpp"

namespace rs2ad {
namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoFailure("failed reading '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write '" + path.string() + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoFailure("failed writing '" + path.string() + "'");
}

float decode_f32le(const std::uint8_t* b) {
  const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                          (static_cast<std::uint32_t>(b[1]) << 8) |
                          (static_cast<std::uint32_t>(b[2]) << 16) |
                          (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(u);
}

void encode_f32le(float v, std::uint8_t* b) {
  const auto u = std::bit_cast<std::uint32_t>(v);
  b[0] = static_cast<std::uint8_t>(u & 0xFF);
  b[1] = static_cast<std::uint8_t>((u >> 8) & 0xFF);
  b[2] = static_cast<std::uint8_t>((u >> 16) & 0xFF);
  b[3] = static_cast<std::uint8_t>((u >> 24) & 0xFF);
}

// Nine significant digits, widened per value when that would lose more than
// 1e-9 so label round-trips stay within tolerance.
std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  if (std::abs(std::strtod(buf, nullptr) - v) <= 1e-9) return buf;
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_string(const std::string& s) { return ordered_json(s).dump(); }

std::string format_vec3(const Eigen::Vector3d& v) {
  return "[" + format_number(v.x()) + ", " + format_number(v.y()) + ", " +
         format_number(v.z()) + "]";
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

Eigen::Vector3d expect_vec3(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) schema_fail(path, "expected 3 numbers");
  Eigen::Vector3d out;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      schema_fail(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    out[static_cast<int>(i)] = j[i].get<double>();
  }
  return out;
}

const ordered_json& expect_field(const ordered_json& obj, const std::string& path,
                                 const std::string& name) {
  if (!obj.contains(name)) schema_fail(path + "." + name, "missing");
  return obj.at(name);
}

}  // namespace

PointCloud read_cloud(const std::filesystem::path& path, Frame frame) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 16 != 0) {
    throw TruncatedFile("'" + path.string() + "': length " +
                        std::to_string(bytes.size()) +
                        " is not a multiple of 16 bytes");
  }
  PointCloud cloud;
  cloud.frame = frame;
  cloud.points.resize(bytes.size() / 16);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const std::uint8_t* rec = bytes.data() + i * 16;
    cloud.points[i].position = {decode_f32le(rec), decode_f32le(rec + 4),
                                decode_f32le(rec + 8)};
    cloud.points[i].intensity = decode_f32le(rec + 12);
  }
  return cloud;
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  std::vector<std::uint8_t> bytes(cloud.size() * 16);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::uint8_t* rec = bytes.data() + i * 16;
    const LidarPoint& p = cloud.points[i];
    encode_f32le(static_cast<float>(p.position.x()), rec);
    encode_f32le(static_cast<float>(p.position.y()), rec + 4);
    encode_f32le(static_cast<float>(p.position.z()), rec + 8);
    encode_f32le(static_cast<float>(p.intensity), rec + 12);
  }
  write_file_bytes(path, bytes.data(), bytes.size());
}

std::vector<ObjectLabel> parse_labels(const std::string& text,
                                      const std::string& source_name,
                                      RotationFormat format) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw SchemaError(source_name + ": invalid JSON: " + e.what());
  }
  if (!root.is_array()) schema_fail(source_name, "expected a top-level array");

  std::vector<ObjectLabel> labels;
  labels.reserve(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string path = source_name + "[" + std::to_string(i) + "]";
    const ordered_json& obj = root[i];
    if (!obj.is_object()) schema_fail(path, "expected an object");
    ObjectLabel label;

    const ordered_json& id = expect_field(obj, path, "id");
    if (id.is_string()) {
      label.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      label.id = std::to_string(id.get<long long>());
    } else {
      schema_fail(path + ".id", "expected a string or integer");
    }
    const ordered_json& category = expect_field(obj, path, "category");
    if (!category.is_string()) schema_fail(path + ".category", "expected a string");
    label.category = category.get<std::string>();

    label.center = expect_vec3(expect_field(obj, path, "center"), path + ".center");
    label.size = expect_vec3(expect_field(obj, path, "size"), path + ".size");
    const ordered_json& rot = expect_field(obj, path, "rotation");
    if (format == RotationFormat::yaw_only) {
      if (!rot.is_number()) schema_fail(path + ".rotation", "expected a yaw number");
      label.rotation = {0.0, 0.0, rot.get<double>()};
    } else {
      label.rotation = expect_vec3(rot, path + ".rotation");
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

std::vector<ObjectLabel> read_labels(const std::filesystem::path& path,
                                     RotationFormat format) {
  const auto bytes = read_file_bytes(path);
  return parse_labels(std::string(bytes.begin(), bytes.end()), path.string(), format);
}

std::string format_labels(const std::vector<ObjectLabel>& labels) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ObjectLabel& label = labels[i];
    validate(label);
    out << (i ? ",\n " : "\n ");
    out << "{\"id\": " << json_string(label.id)
        << ", \"category\": " << json_string(label.category)
        << ", \"center\": " << format_vec3(label.center)
        << ", \"size\": " << format_vec3(label.size)
        << ", \"rotation\": " << format_vec3(label.rotation) << "}";
  }
  out << (labels.empty() ? "]\n" : "\n]\n");
  return out.str();
}

void write_labels(const std::filesystem::path& path,
                  const std::vector<ObjectLabel>& labels) {
  const std::string text = format_labels(labels);
  write_file_bytes(path, text.data(), text.size());
}

std::string format_ego_labels(const std::vector<EgoLabel>& labels) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const EgoLabel& label = labels[i];
    out << (i ? ",\n " : "\n ");
    out << "{\"id\": " << json_string(label.id)
        << ", \"category\": " << json_string(label.category)
        << ", \"center\": " << format_vec3(label.center)
        << ", \"size\": " << format_vec3(label.size)
        << ", \"rotation\": " << format_vec3(label.rotation)
        << ", \"is_ego\": " << (label.is_ego ? "true" : "false") << "}";
  }
  out << (labels.empty() ? "]\n" : "\n]\n");
  return out.str();
}

void write_ego_labels(const std::filesystem::path& path,
                      const std::vector<EgoLabel>& labels) {
  const std::string text = format_ego_labels(labels);
  write_file_bytes(path, text.data(), text.size());
}

std::vector<std::uint8_t> read_mask(const std::filesystem::path& path,
                                    std::size_t expected_points) {
  auto bytes = read_file_bytes(path);
  if (bytes.size() != expected_points) {
    throw LengthMismatch("mask '" + path.string() + "' has " +
                         std::to_string(bytes.size()) + " bytes for " +
                         std::to_string(expected_points) + " points");
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] > 1) {
      throw SchemaError("mask '" + path.string() + "' byte " + std::to_string(i) +
                        ": expected 0 or 1, got " + std::to_string(bytes[i]));
    }
  }
  return bytes;
}

void write_mask(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& mask) {
  write_file_bytes(path, mask.data(), mask.size());
}

ClassHistogram read_histogram(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::string source = path.string();
  ordered_json root;
  try {
    root = ordered_json::parse(bytes);
  } catch (const ordered_json::parse_error& e) {
    throw SchemaError(source + ": invalid JSON: " + e.what());
  }
  if (!root.is_object()) schema_fail(source, "expected a top-level object");
  const ordered_json& classes = expect_field(root, source, "classes");
  const ordered_json& weights = expect_field(root, source, "weights");
  if (!classes.is_array()) schema_fail(source + ".classes", "expected an array");
  if (!weights.is_array()) schema_fail(source + ".weights", "expected an array");
  ClassHistogram h;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!classes[i].is_string()) {
      schema_fail(source + ".classes[" + std::to_string(i) + "]",
                  "expected a string");
    }
    h.classes.push_back(classes[i].get<std::string>());
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!weights[i].is_number()) {
      schema_fail(source + ".weights[" + std::to_string(i) + "]",
                  "expected a number");
    }
    h.weights.push_back(weights[i].get<double>());
  }
  if (h.classes.size() != h.weights.size()) {
    throw SchemaError(source + ": classes and weights differ in length");
  }
  return h;
}

void write_histogram(const std::filesystem::path& path, const ClassHistogram& h) {
  ordered_json root;
  root["classes"] = h.classes;
  root["weights"] = h.weights;
  const std::string text = root.dump(2) + "\n";
  write_file_bytes(path, text.data(), text.size());
}

std::string format_metric_report(double js, double cosine) {
  return std::string("{\"js_distance\": ") + format_number(js) +
         ", \"cosine_similarity\": " + format_number(cosine) + "}\n";
}

void write_metric_report(const std::filesystem::path& path, double js, double cosine) {
  const std::string text = format_metric_report(js, cosine);
  write_file_bytes(path, text.data(), text.size());
}

std::vector<FrameBundle> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open manifest '" + path.string() + "'");
  const std::filesystem::path base = path.parent_path();
  std::vector<FrameBundle> bundles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 2 or 3 tab-separated paths, got " +
                        std::to_string(fields.size()));
    }
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    FrameBundle bundle;
    bundle.cloud = resolve(fields[0]);
    bundle.labels = resolve(fields[1]);
    if (fields.size() == 3 && !fields[2].empty()) {
      bundle.ground_mask = resolve(fields[2]);
    }
    bundle.frame_id = bundle.cloud.stem().string();
    auto check = [&](const std::filesystem::path& fp, const char* role) {
      if (!std::filesystem::exists(fp)) {
        throw IoFailure(path.string() + ":" + std::to_string(line_no) + ": " + role +
                        " file '" + fp.string() + "' does not exist");
      }
    };
    check(bundle.cloud, "cloud");
    check(bundle.labels, "labels");
    if (bundle.ground_mask) check(*bundle.ground_mask, "mask");
    bundles.push_back(std::move(bundle));
  }
  return bundles;
}

std::string format_cloud_stats(const CloudStats& stats) {
  ordered_json root;
  root["count"] = stats.count;
  root["range_bin_width_m"] = stats.range_bin_width;
  root["range_histogram"] = stats.range_histogram;
  root["intensity"] = {{"min", stats.intensity_min},
                       {"mean", stats.intensity_mean},
                       {"max", stats.intensity_max}};
  if (!stats.beam_counts.empty()) {
    root["beam_counts"] = stats.beam_counts;
    root["out_of_fov"] = stats.out_of_fov;
  }
  return root.dump(2) + "\n";
}

}  // namespace rs2ad
