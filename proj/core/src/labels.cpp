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

#include "rs2ad/labels.hpp"

#include <algorithm>
#include <cmath>

#include "rs2ad/errors.hpp"

namespace rs2ad {

std::vector<EgoLabel> map_labels(const std::vector<ObjectLabel>& labels,
                                 const RigidTransform& t_lw,
                                 const std::optional<std::string>& ego_id) {
  std::vector<EgoLabel> out;
  out.reserve(labels.size());
  for (const ObjectLabel& label : labels) {
    validate(label);
    EgoLabel mapped;
    mapped.id = label.id;
    mapped.category = label.category;
    mapped.size = label.size;
    mapped.center = apply(t_lw, label.center);
    mapped.rotation =
        to_rotation_vector(t_lw.rotation * to_rotation_matrix(label.rotation));
    mapped.is_ego = ego_id && label.id == *ego_id;
    out.push_back(std::move(mapped));
  }
  return out;
}

std::array<Point3, 8> box_corners(const Point3& center, const Eigen::Vector3d& size,
                                  const RotationVector& rotation) {
  const Eigen::Matrix3d rot = to_rotation_matrix(rotation);
  const Eigen::Vector3d half = size * 0.5;
  std::array<Point3, 8> corners;
  int k = 0;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (int sz : {-1, 1}) {
        corners[k++] =
            center + rot * Eigen::Vector3d(sx * half.x(), sy * half.y(), sz * half.z());
      }
    }
  }
  return corners;
}

std::array<Point3, 8> box_corners(const ObjectLabel& label) {
  return box_corners(label.center, label.size, label.rotation);
}

std::array<Point3, 8> box_corners(const EgoLabel& label) {
  return box_corners(label.center, label.size, label.rotation);
}

namespace {

BevBox bev_of(const Point3& center, const Eigen::Vector3d& size,
              const RotationVector& rotation) {
  BevBox box;
  box.center = center.head<2>();
  box.half_extents = {size.x() * 0.5, size.y() * 0.5};
  box.yaw = to_euler_zyx(to_rotation_matrix(rotation))[2];
  return box;
}

using Polygon = std::vector<Eigen::Vector2d>;

Polygon corners_of(const BevBox& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Eigen::Vector2d ex{c, s};
  const Eigen::Vector2d ey{-s, c};
  const Eigen::Vector2d hx = box.half_extents.x() * ex;
  const Eigen::Vector2d hy = box.half_extents.y() * ey;
  // Counter-clockwise.
  return {box.center - hx - hy, box.center + hx - hy, box.center + hx + hy,
          box.center - hx + hy};
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(twice) * 0.5;
}

// Sutherland-Hodgman: clip `subject` against the half-plane left of the
// directed edge a->b.
Polygon clip_edge(const Polygon& subject, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
  Polygon out;
  const Eigen::Vector2d edge = b - a;
  auto side = [&](const Eigen::Vector2d& p) {
    return edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x());
  };
  for (std::size_t i = 0; i < subject.size(); ++i) {
    const Eigen::Vector2d& cur = subject[i];
    const Eigen::Vector2d& prev = subject[(i + subject.size() - 1) % subject.size()];
    const double sc = side(cur);
    const double sp = side(prev);
    if (sc >= 0.0) {
      if (sp < 0.0) {
        const double t = sp / (sp - sc);
        out.push_back(prev + t * (cur - prev));
      }
      out.push_back(cur);
    } else if (sp >= 0.0) {
      const double t = sp / (sp - sc);
      out.push_back(prev + t * (cur - prev));
    }
  }
  return out;
}

}  // namespace

BevBox to_bev(const ObjectLabel& label) {
  return bev_of(label.center, label.size, label.rotation);
}

BevBox to_bev(const EgoLabel& label) {
  return bev_of(label.center, label.size, label.rotation);
}

double bev_iou(const BevBox& a, const BevBox& b) {
  if (!(a.half_extents.x() > 0.0) || !(a.half_extents.y() > 0.0) ||
      !(b.half_extents.x() > 0.0) || !(b.half_extents.y() > 0.0)) {
    throw Error("bev_iou: box extents must be positive");
  }
  const Polygon pa = corners_of(a);
  const Polygon pb = corners_of(b);
  Polygon inter = pa;
  for (std::size_t i = 0; i < pb.size() && !inter.empty(); ++i) {
    inter = clip_edge(inter, pb[i], pb[(i + 1) % pb.size()]);
  }
  const double inter_area = inter.size() >= 3 ? polygon_area(inter) : 0.0;
  const double union_area = polygon_area(pa) + polygon_area(pb) - inter_area;
  if (!(union_area > 0.0)) return 0.0;
  const double iou = inter_area / union_area;
  return std::clamp(iou, 0.0, 1.0);
}

}  // namespace rs2ad
