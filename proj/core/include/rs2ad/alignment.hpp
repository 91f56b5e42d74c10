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

#include <string>
#include <vector>

#include "rs2ad/geometry.hpp"
#include "rs2ad/lidar_model.hpp"

namespace rs2ad {

/// A world-frame annotation from the roadside sensor: box pose plus identity.
/// `size` is (length, width, height) along the box's local x/y/z axes and
/// `rotation` is an axis-angle vector in radians.
struct ObjectLabel {
  std::string id;
  std::string category;
  Eigen::Vector3d size{0.0, 0.0, 0.0};
  Point3 center{0.0, 0.0, 0.0};
  RotationVector rotation{0.0, 0.0, 0.0};
};

/// Throws Error when a label has a non-positive size component or a
/// non-finite pose.
void validate(const ObjectLabel& label);

/// Vehicle->world pose of the labeled box: rotation from the label's
/// axis-angle vector, translation from its center.
RigidTransform vehicle_to_world(const ObjectLabel& label);

/// World->lidar chain for a virtual sensor anchored on `label`:
/// compose(model.mount(), invert(vehicle_to_world(label))).
RigidTransform world_to_lidar(const ObjectLabel& label, const LidarModel& model);

/// Indices of points whose range lies in the closed interval
/// [min_range, max_range] of the model. Cloud must be in the lidar frame.
std::vector<std::size_t> range_filter_indices(const PointCloud& cloud,
                                              const LidarModel& model);

/// Keeps exactly the points selected by range_filter_indices, order preserved.
PointCloud range_filter(const PointCloud& cloud, const LidarModel& model);

/// Default inflation applied to the target's own box when culling self-points.
inline constexpr double kEgoCullInflation = 0.2;

/// Indices of lidar-frame points lying outside the selected label's own box
/// (inflated by `inflation` meters on every side). The box pose is taken
/// through `world_to_lidar`, i.e. the same chain the cloud went through.
std::vector<std::size_t> ego_cull_indices(const PointCloud& cloud,
                                          const ObjectLabel& label,
                                          const RigidTransform& world_to_lidar,
                                          double inflation = kEgoCullInflation);

/// Keeps exactly the points selected by ego_cull_indices, order preserved.
PointCloud ego_cull(const PointCloud& cloud, const ObjectLabel& label,
                    const RigidTransform& world_to_lidar,
                    double inflation = kEgoCullInflation);

}  // namespace rs2ad
