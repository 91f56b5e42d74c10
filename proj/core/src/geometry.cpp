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

#include "rs2ad/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rs2ad {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

constexpr double kSmallAngle = 1e-8;

}  // namespace

const char* to_string(Frame frame) {
  switch (frame) {
    case Frame::world:
      return "world";
    case Frame::vehicle:
      return "vehicle";
    case Frame::lidar:
      return "lidar";
  }
  return "?";
}

bool RigidTransform::is_rigid(double tol) const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  return (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

SphericalCoord to_spherical(const Point3& p) {
  const double r = p.norm();
  if (r == 0.0) {
    return {0.0, 0.0, 0.0};
  }
  return {r, std::atan2(p.y(), p.x()),
          std::acos(std::clamp(p.z() / r, -1.0, 1.0))};
}

Point3 from_spherical(const SphericalCoord& s) {
  const double sin_polar = std::sin(s.polar);
  return {s.range * sin_polar * std::cos(s.azimuth),
          s.range * sin_polar * std::sin(s.azimuth),
          s.range * std::cos(s.polar)};
}

Eigen::Matrix3d to_rotation_matrix(const RotationVector& rotation) {
  const double angle = rotation.norm();
  if (angle < kSmallAngle) {
    // Second-order series; the truncation error is O(angle^3).
    const Eigen::Matrix3d k = skew(rotation);
    return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
  }
  return Eigen::AngleAxisd(angle, rotation / angle).toRotationMatrix();
}

RotationVector to_rotation_vector(const Eigen::Matrix3d& rotation,
                                  double orthonormal_tol) {
  RigidTransform probe;
  probe.rotation = rotation;
  if (!probe.is_rigid(orthonormal_tol)) {
    throw NonOrthonormalInput(
        "to_rotation_vector: input is not a rotation matrix");
  }
  // Quaternion conversion is stable across the whole angle range, including
  // near pi where the skew part of R vanishes.
  const Eigen::AngleAxisd aa(Eigen::Quaterniond(rotation).normalized());
  double angle = aa.angle();
  Eigen::Vector3d axis = aa.axis();
  if (angle > M_PI) {  // representative with magnitude in [0, pi]
    angle = 2.0 * M_PI - angle;
    axis = -axis;
  }
  // Sign convention at the pi ambiguity: first nonzero axis component positive.
  if (angle > M_PI - 1e-9) {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return axis * angle;
}

Eigen::Vector3d to_euler_zyx(const Eigen::Matrix3d& rotation) {
  // R = Rz(yaw) * Ry(pitch) * Rx(roll)
  const double pitch = std::asin(std::clamp(-rotation(2, 0), -1.0, 1.0));
  double roll;
  double yaw;
  if (std::abs(rotation(2, 0)) < 1.0 - 1e-12) {
    roll = std::atan2(rotation(2, 1), rotation(2, 2));
    yaw = std::atan2(rotation(1, 0), rotation(0, 0));
  } else {
    // Gimbal lock: fold everything into roll.
    roll = std::atan2(-rotation(1, 2), rotation(1, 1));
    yaw = 0.0;
  }
  return {roll, pitch, yaw};
}

RigidTransform compose(const RigidTransform& first, const RigidTransform& second) {
  if (first.from && second.to && *first.from != *second.to) {
    throw FrameMismatch(std::string("compose: inner frames disagree (") +
                        to_string(*second.to) + " vs " + to_string(*first.from) +
                        ")");
  }
  RigidTransform out;
  out.rotation = first.rotation * second.rotation;
  out.translation = first.rotation * second.translation + first.translation;
  out.from = second.from;
  out.to = first.to;
  return out;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform out;
  out.rotation = t.rotation.transpose();
  out.translation = -(t.rotation.transpose() * t.translation);
  out.from = t.to;
  out.to = t.from;
  return out;
}

Point3 apply(const RigidTransform& t, const Point3& p) {
  return t.rotation * p + t.translation;
}

PointCloud apply(const RigidTransform& t, const PointCloud& cloud) {
  if (t.from && cloud.frame != *t.from) {
    throw FrameMismatch(std::string("apply: cloud is in frame '") +
                        to_string(cloud.frame) + "' but the transform expects '" +
                        to_string(*t.from) + "'");
  }
  PointCloud out;
  out.frame = t.to.value_or(cloud.frame);
  out.points.reserve(cloud.points.size());
  for (const LidarPoint& lp : cloud.points) {
    out.points.push_back({apply(t, lp.position), lp.intensity});
  }
  return out;
}

}  // namespace rs2ad
