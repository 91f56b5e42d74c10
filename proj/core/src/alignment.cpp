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

#include "rs2ad/alignment.hpp"

#include <cmath>

#include "rs2ad/errors.hpp"

namespace rs2ad {

void validate(const ObjectLabel& label) {
  for (int i = 0; i < 3; ++i) {
    if (!(label.size[i] > 0.0) || !std::isfinite(label.size[i])) {
      throw Error("label '" + label.id + "': size components must be positive");
    }
    if (!std::isfinite(label.center[i]) || !std::isfinite(label.rotation[i])) {
      throw Error("label '" + label.id + "': pose must be finite");
    }
  }
}

RigidTransform vehicle_to_world(const ObjectLabel& label) {
  validate(label);
  RigidTransform t;
  t.rotation = to_rotation_matrix(label.rotation);
  t.translation = label.center;
  t.from = Frame::vehicle;
  t.to = Frame::world;
  return t;
}

RigidTransform world_to_lidar(const ObjectLabel& label, const LidarModel& model) {
  return compose(model.mount(), invert(vehicle_to_world(label)));
}

std::vector<std::size_t> range_filter_indices(const PointCloud& cloud,
                                              const LidarModel& model) {
  if (cloud.frame != Frame::lidar) {
    throw FrameMismatch("range_filter expects a lidar-frame cloud");
  }
  const double lo2 = model.min_range() * model.min_range();
  const double hi2 = model.max_range() * model.max_range();
  std::vector<std::size_t> kept;
  kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double r2 = cloud.points[i].position.squaredNorm();
    if (r2 >= lo2 && r2 <= hi2) kept.push_back(i);
  }
  return kept;
}

namespace {

PointCloud select(const PointCloud& cloud, const std::vector<std::size_t>& indices) {
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(cloud.points[i]);
  return out;
}

}  // namespace

PointCloud range_filter(const PointCloud& cloud, const LidarModel& model) {
  return select(cloud, range_filter_indices(cloud, model));
}

std::vector<std::size_t> ego_cull_indices(const PointCloud& cloud,
                                          const ObjectLabel& label,
                                          const RigidTransform& world_to_lidar,
                                          double inflation) {
  if (cloud.frame != Frame::lidar) {
    throw FrameMismatch("ego_cull expects a lidar-frame cloud");
  }
  validate(label);
  // Box pose in the lidar frame, then point-in-box in box-local coordinates.
  const Eigen::Matrix3d box_rot =
      world_to_lidar.rotation * to_rotation_matrix(label.rotation);
  const Point3 box_center = apply(world_to_lidar, label.center);
  const Eigen::Vector3d half = label.size * 0.5 +
                               Eigen::Vector3d::Constant(inflation);
  std::vector<std::size_t> kept;
  kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d local =
        box_rot.transpose() * (cloud.points[i].position - box_center);
    const bool inside = std::abs(local.x()) <= half.x() &&
                        std::abs(local.y()) <= half.y() &&
                        std::abs(local.z()) <= half.z();
    if (!inside) kept.push_back(i);
  }
  return kept;
}

PointCloud ego_cull(const PointCloud& cloud, const ObjectLabel& label,
                    const RigidTransform& world_to_lidar, double inflation) {
  return select(cloud, ego_cull_indices(cloud, label, world_to_lidar, inflation));
}

}  // namespace rs2ad
