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

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <vector>

#include "rs2ad/errors.hpp"

namespace rs2ad {

using Point3 = Eigen::Vector3d;

/// Axis-angle rotation: direction is the axis, magnitude the angle in radians.
using RotationVector = Eigen::Vector3d;

/// Coordinate frame a cloud (or transform endpoint) lives in.
enum class Frame { world, vehicle, lidar };

const char* to_string(Frame frame);

/// One LiDAR return: position in some frame plus reflectance in [0, 255].
struct LidarPoint {
  Point3 position{0.0, 0.0, 0.0};
  double intensity = 0.0;
};

/// Ordered point sequence tagged with the frame its coordinates are expressed in.
struct PointCloud {
  std::vector<LidarPoint> points;
  Frame frame = Frame::world;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Spherical triplet: range (m), azimuth from +x in (-pi, pi], polar angle from +z in [0, pi].
struct SphericalCoord {
  double range = 0.0;
  double azimuth = 0.0;
  double polar = 0.0;
};

/// Rigid transform p' = R p + t. The optional frame tags let the pipeline
/// catch wiring bugs; untagged transforms skip the check.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::optional<Frame> from{};
  std::optional<Frame> to{};

  static RigidTransform identity() { return {}; }
  static RigidTransform pure_translation(const Eigen::Vector3d& t) {
    RigidTransform out;
    out.translation = t;
    return out;
  }

  /// True when R is orthonormal with determinant +1 within `tol`.
  bool is_rigid(double tol = 1e-9) const;
};

/// Maps a Cartesian point to (range, azimuth, polar). The origin maps to
/// (0, 0, 0) so the function is total; origin points never bin to a ray.
SphericalCoord to_spherical(const Point3& p);

/// Inverse of to_spherical for range > 0.
Point3 from_spherical(const SphericalCoord& s);

/// Rotation matrix of an axis-angle vector. Magnitudes below 1e-8 rad take a
/// series-expanded branch so the zero vector yields the identity exactly.
Eigen::Matrix3d to_rotation_matrix(const RotationVector& rotation);

/// Axis-angle vector of a rotation matrix, with magnitude in [0, pi]. At the
/// angle-pi sign ambiguity the axis whose first nonzero component is positive
/// is returned. Throws NonOrthonormalInput if R is not a rotation within
/// `orthonormal_tol`.
RotationVector to_rotation_vector(const Eigen::Matrix3d& rotation,
                                  double orthonormal_tol = 1e-6);

/// ZYX (yaw-pitch-roll) Euler angles of a rotation matrix, for export to
/// consumers that expect Euler conventions. Returned as (roll, pitch, yaw).
Eigen::Vector3d to_euler_zyx(const Eigen::Matrix3d& rotation);

/// Composition: the result applies `second` first, then `first`
/// (left-multiplication column-vector convention).
RigidTransform compose(const RigidTransform& first, const RigidTransform& second);

/// Inverse transform: R' = R^T, t' = -R^T t.
RigidTransform invert(const RigidTransform& t);

Point3 apply(const RigidTransform& t, const Point3& p);

/// Transforms every point, preserving intensity and order, and retags the
/// frame. Throws FrameMismatch when the transform carries a source tag that
/// does not match the cloud.
PointCloud apply(const RigidTransform& t, const PointCloud& cloud);

}  // namespace rs2ad
