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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rs2ad/alignment.hpp"
#include "rs2ad/geometry.hpp"

namespace rs2ad {

/// An ObjectLabel re-expressed in the virtual sensor's frame. Category, size,
/// and id are copied verbatim; `is_ego` marks the label anchoring the sensor.
struct EgoLabel {
  std::string id;
  std::string category;
  Eigen::Vector3d size{0.0, 0.0, 0.0};
  Point3 center{0.0, 0.0, 0.0};
  RotationVector rotation{0.0, 0.0, 0.0};
  bool is_ego = false;
};

/// Rotated rectangle in the xy plane: center, half extents (l/2, w/2), yaw.
struct BevBox {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d half_extents{0.0, 0.0};
  double yaw = 0.0;
};

/// Maps world-frame labels through T_lw: centers by the full transform,
/// rotations by converting R_lw * rodrigues(rotation) back to axis-angle.
/// The label whose id equals `ego_id` (if any) is flagged as ego.
std::vector<EgoLabel> map_labels(const std::vector<ObjectLabel>& labels,
                                 const RigidTransform& t_lw,
                                 const std::optional<std::string>& ego_id = std::nullopt);

/// The eight corners of an oriented box, in the frame of `center`/`rotation`.
/// Corner order: all sign combinations of (±l/2, ±w/2, ±h/2) with x varying
/// slowest.
std::array<Point3, 8> box_corners(const Point3& center, const Eigen::Vector3d& size,
                                  const RotationVector& rotation);
std::array<Point3, 8> box_corners(const ObjectLabel& label);
std::array<Point3, 8> box_corners(const EgoLabel& label);

/// Top-down footprint of a label: xy center, (l/2, w/2) extents, yaw from the
/// ZYX Euler decomposition of its rotation.
BevBox to_bev(const ObjectLabel& label);
BevBox to_bev(const EgoLabel& label);

/// Intersection-over-union of two rotated rectangles via convex polygon
/// clipping. Symmetric; 0 for disjoint boxes; throws Error for non-positive
/// extents.
double bev_iou(const BevBox& a, const BevBox& b);

}  // namespace rs2ad
