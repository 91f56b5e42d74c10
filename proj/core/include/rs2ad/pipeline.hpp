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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rs2ad/ground_seg.hpp"
#include "rs2ad/io.hpp"
#include "rs2ad/lidar_model.hpp"
#include "rs2ad/resample.hpp"

namespace rs2ad {

/// Which annotated objects anchor virtual sensors in a run: either one label
/// id, or every label whose category names a vehicle.
struct TargetSelection {
  bool all_vehicles = false;
  std::string id;
};

/// Categories treated as vehicles by the all-vehicles selection mode.
bool is_vehicle_category(const std::string& category);

struct RunConfig {
  /// Sensor description; empty means the built-in 64-beam default.
  std::optional<std::filesystem::path> lidar_config;
  TargetSelection target;
  std::filesystem::path out_dir;
  bool ego_cull = false;
  RotationFormat rotation_format = RotationFormat::axis_angle;
  SegParams seg;
  ResampleParams resample;
};

/// Per-stage bookkeeping; input_points = retained + range_dropped +
/// ego_culled exactly.
struct StageCounts {
  std::size_t input_points = 0;
  std::size_t range_dropped = 0;
  std::size_t ego_culled = 0;
  std::size_t retained = 0;
  std::size_t ground_points = 0;
  std::size_t nonground_points = 0;
  std::size_t dropped_out_of_fov = 0;
  std::size_t degenerate_buckets = 0;
  std::size_t blocked_sectors = 0;
  std::size_t nonground_returns = 0;
  std::size_t ground_returns = 0;
  std::size_t generated_points = 0;
  double runtime_ms = 0.0;
};

/// Files produced for one target.
struct TargetOutput {
  std::string target_id;
  std::filesystem::path cloud;
  std::filesystem::path labels;
  std::filesystem::path diagnostics;
  StageCounts counts;
};

/// Runs the full generation pipeline for every selected target of a frame:
/// alignment, range filter, optional ego cull, ground segmentation (external
/// mask when the bundle carries one), non-ground and ground resampling,
/// fusion, label mapping, and file output under cfg.out_dir. Deterministic
/// for fixed inputs. Throws TargetNotFound for an absent id; on any failure
/// every file already written by this call is removed before rethrowing.
std::vector<TargetOutput> generate(const FrameBundle& frame, const RunConfig& cfg);

}  // namespace rs2ad
