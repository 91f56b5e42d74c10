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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rs2ad/alignment.hpp"
#include "rs2ad/geometry.hpp"
#include "rs2ad/labels.hpp"
#include "rs2ad/metrics.hpp"

namespace rs2ad {

/// One input frame: cloud and labels, optionally a ground mask, all existing
/// on disk (checked when the manifest is loaded).
struct FrameBundle {
  std::filesystem::path cloud;
  std::filesystem::path labels;
  std::string frame_id;
  std::optional<std::filesystem::path> ground_mask;
};

/// Binary cloud format: consecutive little-endian float32 records of
/// (x, y, z, intensity), no header. Throws TruncatedFile when the length is
/// not a multiple of 16 bytes, IoFailure on unreadable paths.
PointCloud read_cloud(const std::filesystem::path& path, Frame frame = Frame::world);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);

/// How the `rotation` field of a label is encoded on disk.
enum class RotationFormat {
  axis_angle,  // [rx, ry, rz] radians
  yaw_only,    // single scalar, promoted to (0, 0, yaw)
};

/// JSON label array: [{"id", "category", "center", "size", "rotation"}, ...].
/// Numbers are written with 9 significant digits, widened per value when
/// needed so every field round-trips within 1e-9. Schema violations throw
/// SchemaError naming the offending field path.
std::vector<ObjectLabel> read_labels(const std::filesystem::path& path,
                                     RotationFormat format = RotationFormat::axis_angle);
void write_labels(const std::filesystem::path& path,
                  const std::vector<ObjectLabel>& labels);
std::vector<ObjectLabel> parse_labels(const std::string& text,
                                      const std::string& source_name = "<labels>",
                                      RotationFormat format = RotationFormat::axis_angle);
std::string format_labels(const std::vector<ObjectLabel>& labels);

/// Generated-label output: the same schema as input labels plus an "is_ego"
/// flag on each entry.
void write_ego_labels(const std::filesystem::path& path,
                      const std::vector<EgoLabel>& labels);
std::string format_ego_labels(const std::vector<EgoLabel>& labels);

/// Ground-mask format: one raw byte per point, 0 = non-ground, 1 = ground.
/// `expected_points` is checked against the file length (LengthMismatch);
/// any byte other than 0/1 is a SchemaError.
std::vector<std::uint8_t> read_mask(const std::filesystem::path& path,
                                    std::size_t expected_points);
void write_mask(const std::filesystem::path& path, const std::vector<std::uint8_t>& mask);

/// Histogram JSON: {"classes": [...], "weights": [...]}.
ClassHistogram read_histogram(const std::filesystem::path& path);
void write_histogram(const std::filesystem::path& path, const ClassHistogram& h);

/// Metric report JSON: {"js_distance": x, "cosine_similarity": y}.
void write_metric_report(const std::filesystem::path& path, double js, double cosine);
std::string format_metric_report(double js, double cosine);

/// Manifest: one frame per line, tab-separated cloud, labels, and optional
/// mask paths. Relative paths resolve against the manifest's directory; the
/// frame id is the cloud file's stem. Missing referenced files are an
/// IoFailure naming the line.
std::vector<FrameBundle> read_manifest(const std::filesystem::path& path);

/// Stats JSON used by the CLI `stats` subcommand.
std::string format_cloud_stats(const CloudStats& stats);

}  // namespace rs2ad
