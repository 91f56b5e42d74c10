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

#include "rs2ad/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "rs2ad/errors.hpp"
#include "rs2ad/labels.hpp"
#include "rs2ad/log.hpp"

namespace rs2ad {
namespace {

using ordered_json = nlohmann::ordered_json;

void validate(const TargetSelection& target) {
  if (target.all_vehicles == !target.id.empty()) {
    throw Error("target selection: choose exactly one of --target-id or --all-vehicles");
  }
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) c = '_';
  }
  return out.empty() ? std::string("_") : out;
}

template <typename T>
std::vector<T> slice(const std::vector<T>& values,
                     const std::vector<std::size_t>& indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(values[i]);
  return out;
}

std::string diagnostics_json(const std::string& frame_id, const std::string& target_id,
                             const StageCounts& c) {
  ordered_json root;
  root["frame"] = frame_id;
  root["target"] = target_id;
  root["input_points"] = c.input_points;
  root["range_dropped"] = c.range_dropped;
  root["ego_culled"] = c.ego_culled;
  root["retained"] = c.retained;
  root["ground_points"] = c.ground_points;
  root["nonground_points"] = c.nonground_points;
  root["dropped_out_of_fov"] = c.dropped_out_of_fov;
  root["degenerate_buckets"] = c.degenerate_buckets;
  root["blocked_sectors"] = c.blocked_sectors;
  root["nonground_returns"] = c.nonground_returns;
  root["ground_returns"] = c.ground_returns;
  root["generated_points"] = c.generated_points;
  root["runtime_ms"] = c.runtime_ms;
  return root.dump(2) + "\n";
}

}  // namespace

bool is_vehicle_category(const std::string& category) {
  static const std::array<const char*, 5> kVehicles = {
      "car", "truck", "bus", "trailer", "construction_vehicle"};
  return std::find(kVehicles.begin(), kVehicles.end(), category) != kVehicles.end();
}

std::vector<TargetOutput> generate(const FrameBundle& frame, const RunConfig& cfg) {
  validate(cfg.target);
  const LidarModel model = cfg.lidar_config
                               ? LidarModel(load_lidar_config(*cfg.lidar_config))
                               : LidarModel::pandar64();

  const PointCloud world_cloud = read_cloud(frame.cloud, Frame::world);
  const std::vector<ObjectLabel> labels =
      read_labels(frame.labels, cfg.rotation_format);
  std::vector<std::uint8_t> mask;
  if (frame.ground_mask) mask = read_mask(*frame.ground_mask, world_cloud.size());

  std::vector<const ObjectLabel*> targets;
  if (cfg.target.all_vehicles) {
    for (const ObjectLabel& label : labels) {
      if (is_vehicle_category(label.category)) targets.push_back(&label);
    }
  } else {
    for (const ObjectLabel& label : labels) {
      if (label.id == cfg.target.id) targets.push_back(&label);
    }
    if (targets.empty()) {
      throw TargetNotFound("frame '" + frame.frame_id + "' has no label with id '" +
                           cfg.target.id + "'");
    }
    targets.resize(1);
  }
  log::info("frame " + frame.frame_id + ": " + std::to_string(targets.size()) +
            " target(s), " + std::to_string(world_cloud.size()) + " input points");

  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::filesystem::path> written;
  std::vector<TargetOutput> outputs;
  try {
    for (const ObjectLabel* target : targets) {
      const auto start = std::chrono::steady_clock::now();
      StageCounts counts;
      counts.input_points = world_cloud.size();

      const RigidTransform t_lw = world_to_lidar(*target, model);
      const PointCloud lidar_cloud = apply(t_lw, world_cloud);

      const std::vector<std::size_t> in_range =
          range_filter_indices(lidar_cloud, model);
      counts.range_dropped = lidar_cloud.size() - in_range.size();
      PointCloud working;
      working.frame = Frame::lidar;
      working.points = slice(lidar_cloud.points, in_range);
      std::vector<std::uint8_t> working_mask;
      if (!mask.empty()) working_mask = slice(mask, in_range);

      if (cfg.ego_cull) {
        const std::vector<std::size_t> keep =
            ego_cull_indices(working, *target, t_lw);
        counts.ego_culled = working.size() - keep.size();
        working.points = slice(working.points, keep);
        if (!working_mask.empty()) working_mask = slice(working_mask, keep);
      }
      counts.retained = working.size();

      const GroundSplit split = mask.empty() ? segment(working, cfg.seg)
                                             : import_mask(working, working_mask);
      counts.ground_points = split.ground.size();
      counts.nonground_points = split.nonground.size();

      const NonGroundResult vn = resample_nonground(split.nonground, model, cfg.resample);
      const PlaneModel ground_plane = fit_ground_plane(split.ground);
      const GeneratedCloud vg =
          resample_ground(ground_plane, split.ground, model, vn.blocked_sectors,
                          vn.occupied_rays, cfg.resample);
      const GeneratedCloud fused = fuse(vn.cloud, vg);

      counts.dropped_out_of_fov = fused.dropped_out_of_fov;
      counts.degenerate_buckets = fused.degenerate_buckets;
      counts.blocked_sectors = fused.blocked_sectors;
      counts.nonground_returns = vn.cloud.size();
      counts.ground_returns = vg.size();
      counts.generated_points = fused.size();

      const std::vector<EgoLabel> ego_labels = map_labels(labels, t_lw, target->id);
      counts.runtime_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();

      const std::string stem =
          sanitize(frame.frame_id) + "_" + sanitize(target->id);
      TargetOutput out;
      out.target_id = target->id;
      out.cloud = cfg.out_dir / (stem + ".bin");
      out.labels = cfg.out_dir / (stem + "_labels.json");
      out.diagnostics = cfg.out_dir / (stem + "_diag.json");
      out.counts = counts;

      write_cloud(out.cloud, to_point_cloud(fused));
      written.push_back(out.cloud);
      write_ego_labels(out.labels, ego_labels);
      written.push_back(out.labels);
      {
        const std::string diag = diagnostics_json(frame.frame_id, target->id, counts);
        std::ofstream f(out.diagnostics, std::ios::binary | std::ios::trunc);
        if (!f) throw IoFailure("cannot write '" + out.diagnostics.string() + "'");
        f << diag;
        if (!f) throw IoFailure("failed writing '" + out.diagnostics.string() + "'");
      }
      written.push_back(out.diagnostics);
      log::debug("target " + target->id + ": " +
                 std::to_string(counts.generated_points) + " generated points in " +
                 std::to_string(counts.runtime_ms) + " ms");
      outputs.push_back(std::move(out));
    }
  } catch (...) {
    // All-or-nothing: a failed run leaves no partial artifacts behind.
    for (const auto& path : written) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
    throw;
  }
  return outputs;
}

}  // namespace rs2ad
