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
#include <string>
#include <vector>

#include "rs2ad/alignment.hpp"
#include "rs2ad/geometry.hpp"
#include "rs2ad/lidar_model.hpp"
#include "rs2ad/resample.hpp"

namespace rs2ad {

/// Axis-aligned-in-local-frame box occluder: center, full size (x, y, z
/// extents before rotation), yaw about z.
struct SceneBox {
  Point3 center{0.0, 0.0, 0.0};
  Eigen::Vector3d size{1.0, 1.0, 1.0};
  double yaw = 0.0;
};

/// Vertical rectangular wall: segment (p0 -> p1) in the xy plane extruded
/// over [z0, z1].
struct SceneWall {
  Eigen::Vector2d p0{0.0, 0.0};
  Eigen::Vector2d p1{1.0, 0.0};
  double z0 = 0.0;
  double z1 = 1.0;
};

/// World-frame analytic test scene. The ground plane is infinite for ray
/// casting but sampled only within `ground_extent_m` of the origin.
/// `vehicles` hold target poses for the pipeline; they contribute no surface
/// geometry of their own.
struct AnalyticScene {
  PlaneModel ground;  // z-form
  std::vector<SceneBox> boxes;
  std::vector<SceneWall> walls;
  double density = 10.0;      // surface samples per square meter
  double noise_sigma = 0.0;   // Gaussian perpendicular jitter, meters
  double ground_extent_m = 100.0;
  std::vector<ObjectLabel> vehicles;
};

/// Truth tag carried per sampled point: ground flag plus the occluder index
/// (boxes first, then walls; -1 for ground).
struct TruthTag {
  bool ground = false;
  int object_id = -1;
};

struct SampledScene {
  PointCloud cloud;  // world frame
  std::vector<TruthTag> tags;
};

/// Deterministic stratified surface sampling: each rectangular face gets a
/// round(edge * sqrt(density)) per-axis grid with seeded in-cell jitter, so
/// per-face counts are an exact function of geometry and density. Intensities
/// are constant per surface (ground 10, box i 100+i, wall j 200+j).
SampledScene sample_scene(const AnalyticScene& scene, std::uint64_t seed);

/// Independent brute-force reference: casts every ray of the model (posed by
/// the world->lidar transform) against the analytic surfaces and keeps the
/// nearest hit within the sensor's range limits. No sampling or fitting is
/// involved; returned points are in the lidar frame with ground/non-ground
/// origin tags.
GeneratedCloud oracle_cast(const AnalyticScene& scene, const RigidTransform& world_to_lidar,
                           const LidarModel& model);

/// Scene JSON round-trip, mirroring the AnalyticScene fields.
AnalyticScene parse_scene(const std::string& text,
                          const std::string& source_name = "<scene>");
AnalyticScene load_scene(const std::filesystem::path& path);
std::string format_scene(const AnalyticScene& scene);
void save_scene(const std::filesystem::path& path, const AnalyticScene& scene);

}  // namespace rs2ad
