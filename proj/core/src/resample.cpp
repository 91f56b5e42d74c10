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

#include "rs2ad/resample.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "rs2ad/errors.hpp"

namespace rs2ad {
namespace {

// Surfaces steeper than this (unit-normal |n_z|) leave the z-functional form
// and are fitted with the dependent axis swapped to their dominant normal
// component.
constexpr double kWallNormalZ = 0.05;
// Normal-equation matrices above this condition number are treated as
// degenerate (collinear neighborhoods).
constexpr double kMaxCondition = 1e8;

void validate(const ResampleParams& p) {
  if (!(p.neighborhood_radius > 0.0)) {
    throw Error("resample params: neighborhood radius must be positive");
  }
  if (p.min_fit_points < 3) {
    throw Error("resample params: min_fit_points must be at least 3");
  }
  if (!(p.parallel_eps > 0.0)) {
    throw Error("resample params: parallel_eps must be positive");
  }
  if (p.sector_shape[0] < 1 || p.sector_shape[1] < 1) {
    throw Error("resample params: sector shape entries must be positive");
  }
}

std::size_t min_range_index(const PointCloud& cloud,
                            const std::vector<std::size_t>& indices) {
  std::size_t best = indices.front();
  double best_r2 = cloud.points[best].position.squaredNorm();
  for (std::size_t i : indices) {
    const double r2 = cloud.points[i].position.squaredNorm();
    if (r2 < best_r2 || (r2 == best_r2 && i < best)) {
      best = i;
      best_r2 = r2;
    }
  }
  return best;
}

// Reads a point's coordinates in (u, v, w) order for the given form, where w
// is the dependent axis.
void form_coords(const Point3& p, PlaneModel::Axis axis, double& u, double& v,
                 double& w) {
  switch (axis) {
    case PlaneModel::Axis::z:
      u = p.x(); v = p.y(); w = p.z();
      return;
    case PlaneModel::Axis::x:
      u = p.y(); v = p.z(); w = p.x();
      return;
    case PlaneModel::Axis::y:
      u = p.x(); v = p.z(); w = p.y();
      return;
  }
  u = v = w = 0.0;
}

// Unweighted least squares w = a u + b v + c over the gathered neighborhood,
// solved by 3x3 normal equations. Coordinates are centered on `origin` first
// so the condition check reflects the neighborhood's shape rather than its
// distance from the sensor; the exact minimizer is unchanged.
std::optional<PlaneModel> solve_form(const PointCloud& cloud,
                                     const std::vector<std::size_t>& indices,
                                     PlaneModel::Axis axis, const Point3& origin) {
  double u0 = 0.0, v0 = 0.0, w0 = 0.0;
  form_coords(origin, axis, u0, v0, w0);
  Eigen::Matrix3d a_mat = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b_vec = Eigen::Vector3d::Zero();
  for (std::size_t i : indices) {
    double u = 0.0, v = 0.0, w = 0.0;
    form_coords(cloud.points[i].position, axis, u, v, w);
    const Eigen::Vector3d row{u - u0, v - v0, 1.0};
    a_mat += row * row.transpose();
    b_vec += (w - w0) * row;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(a_mat);
  const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
  if (!(evals[0] > 0.0) || evals[2] / evals[0] > kMaxCondition) {
    return std::nullopt;
  }
  const Eigen::Vector3d sol =
      eig.eigenvectors() *
      (eig.eigenvectors().transpose() * b_vec).cwiseQuotient(evals).eval();
  PlaneModel plane;
  plane.axis = axis;
  plane.a = sol[0];
  plane.b = sol[1];
  plane.c = w0 - sol[0] * u0 - sol[1] * v0 + sol[2];
  return plane;
}

}  // namespace

Eigen::Vector3d PlaneModel::normal() const {
  switch (axis) {
    case Axis::z:
      return {a, b, -1.0};
    case Axis::x:
      return {-1.0, a, b};
    case Axis::y:
      return {a, -1.0, b};
  }
  return {0.0, 0.0, -1.0};
}

PointCloud to_point_cloud(const GeneratedCloud& cloud) {
  PointCloud out;
  out.frame = Frame::lidar;
  out.points.reserve(cloud.points.size());
  for (const GeneratedPoint& p : cloud.points) {
    out.points.push_back({p.position, p.intensity});
  }
  return out;
}

BucketSet bucket_nonground(const PointCloud& nonground, const LidarModel& model) {
  if (nonground.frame != Frame::lidar) {
    throw FrameMismatch("bucket_nonground expects a lidar-frame cloud");
  }
  BucketSet out;
  std::map<std::size_t, RayBucket> by_ordinal;
  for (std::size_t i = 0; i < nonground.size(); ++i) {
    const auto idx = model.bin(to_spherical(nonground.points[i].position));
    if (!idx) {
      ++out.dropped_out_of_fov;
      continue;
    }
    auto [it, inserted] = by_ordinal.try_emplace(model.ray_ordinal(*idx));
    if (inserted) it->second.ray = *idx;
    it->second.member_indices.push_back(i);
  }
  out.buckets.reserve(by_ordinal.size());
  for (auto& [ordinal, bucket] : by_ordinal) {
    out.buckets.push_back(std::move(bucket));
  }
  return out;
}

std::optional<PlaneModel> fit_local_plane(const RayBucket& bucket,
                                          const PointCloud& all_nonground,
                                          const VoxelGrid& grid,
                                          const ResampleParams& params) {
  validate(params);
  if (bucket.member_indices.empty()) {
    throw Error("fit_local_plane: bucket has no members");
  }
  const std::size_t p_min_idx = min_range_index(all_nonground, bucket.member_indices);
  const Point3& p_min = all_nonground.points[p_min_idx].position;
  const std::vector<std::size_t> nearby =
      grid.query_radius(p_min, params.neighborhood_radius);
  if (nearby.size() < static_cast<std::size_t>(params.min_fit_points)) {
    return std::nullopt;
  }

  // Principal normal of the neighborhood decides the functional form: near
  // vertical surfaces (small |n_z|) swap the dependent axis to the dominant
  // normal component so the fit stays well-posed.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (std::size_t i : nearby) centroid += all_nonground.points[i].position;
  centroid /= static_cast<double>(nearby.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : nearby) {
    const Eigen::Vector3d d = all_nonground.points[i].position - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d n = eig.eigenvectors().col(0).normalized();
  PlaneModel::Axis axis = PlaneModel::Axis::z;
  if (std::abs(n.z()) < kWallNormalZ) {
    axis = std::abs(n.x()) >= std::abs(n.y()) ? PlaneModel::Axis::x
                                              : PlaneModel::Axis::y;
  }
  return solve_form(all_nonground, nearby, axis, p_min);
}

std::optional<PlaneModel> fit_local_plane(const RayBucket& bucket,
                                          const PointCloud& all_nonground,
                                          const ResampleParams& params) {
  const VoxelGrid grid(all_nonground, params.neighborhood_radius);
  return fit_local_plane(bucket, all_nonground, grid, params);
}

std::optional<RayHit> intersect(const PlaneModel& plane, const Eigen::Vector3d& ray_dir,
                                double parallel_eps) {
  const Eigen::Vector3d n = plane.normal();
  const double denom = n.dot(ray_dir);
  if (std::abs(denom) < parallel_eps) return std::nullopt;
  const double t0 = -plane.c / denom;
  if (!(t0 > 0.0)) return std::nullopt;
  return RayHit{t0, t0 * ray_dir};
}

NonGroundResult resample_nonground(const PointCloud& nonground, const LidarModel& model,
                                   const ResampleParams& params) {
  validate(params);
  NonGroundResult out;
  out.occupied_rays.assign(model.ray_count(), 0);
  const int sector_cols = model.sector_cols(params.sector_shape);
  out.blocked_sectors.assign(
      static_cast<std::size_t>(model.sector_rows(params.sector_shape)) * sector_cols, 0);

  const BucketSet buckets = bucket_nonground(nonground, model);
  out.cloud.dropped_out_of_fov = buckets.dropped_out_of_fov;
  if (buckets.buckets.empty()) return out;

  const VoxelGrid grid(nonground, params.neighborhood_radius);
  for (const RayBucket& bucket : buckets.buckets) {
    const std::size_t p_min_idx = min_range_index(nonground, bucket.member_indices);
    const LidarPoint& p_min = nonground.points[p_min_idx];
    const Eigen::Vector3d dir = model.ray_direction(bucket.ray);

    GeneratedPoint gen;
    gen.ray = bucket.ray;
    gen.origin = GeneratedPoint::Origin::nonground;
    gen.intensity = p_min.intensity;
    bool emit = false;
    if (const auto plane = fit_local_plane(bucket, nonground, grid, params)) {
      if (const auto hit = intersect(*plane, dir, params.parallel_eps)) {
        if (hit->t0 >= model.min_range() && hit->t0 <= model.max_range()) {
          gen.position = hit->point;
          emit = true;
        }
      }
    } else {
      // Degenerate neighborhood: pass p_min through at its range, snapped
      // onto the ray so the on-ray invariant still holds.
      ++out.cloud.degenerate_buckets;
      const double r = p_min.position.norm();
      if (r >= model.min_range() && r <= model.max_range()) {
        gen.position = r * dir;
        gen.fallback = true;
        emit = true;
      }
    }
    if (emit) {
      out.cloud.points.push_back(gen);
      out.occupied_rays[model.ray_ordinal(bucket.ray)] = 1;
      const SectorIndex sec = sector_of(bucket.ray, params.sector_shape);
      out.blocked_sectors[static_cast<std::size_t>(sec.beam_group) * sector_cols +
                          sec.azimuth_group] = 1;
    }
  }
  return out;
}

PlaneModel fit_ground_plane(const PointCloud& ground) {
  if (ground.size() < 3) {
    throw DegenerateGround("fit_ground_plane: need at least 3 ground points, have " +
                           std::to_string(ground.size()));
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const LidarPoint& p : ground.points) centroid += p.position;
  centroid /= static_cast<double>(ground.size());
  std::vector<std::size_t> all(ground.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto plane = solve_form(ground, all, PlaneModel::Axis::z, centroid);
  if (!plane) {
    throw DegenerateGround("fit_ground_plane: ground points are xy-collinear");
  }
  return *plane;
}

GeneratedCloud resample_ground(const PlaneModel& plane, const PointCloud& ground,
                               const LidarModel& model,
                               const std::vector<std::uint8_t>& blocked_sectors,
                               const std::vector<std::uint8_t>& occupied_rays,
                               const ResampleParams& params) {
  validate(params);
  const int sector_cols = model.sector_cols(params.sector_shape);
  const std::size_t sector_count =
      static_cast<std::size_t>(model.sector_rows(params.sector_shape)) * sector_cols;
  if (blocked_sectors.size() != sector_count) {
    throw LengthMismatch("resample_ground: blocked-sector flags sized " +
                         std::to_string(blocked_sectors.size()) + ", expected " +
                         std::to_string(sector_count));
  }
  if (occupied_rays.size() != model.ray_count()) {
    throw LengthMismatch("resample_ground: occupied-ray flags sized " +
                         std::to_string(occupied_rays.size()) + ", expected " +
                         std::to_string(model.ray_count()));
  }

  GeneratedCloud out;
  for (std::uint8_t f : blocked_sectors) out.blocked_sectors += f ? 1 : 0;

  std::optional<VoxelGrid> grid;
  if (!ground.empty()) grid.emplace(ground, params.neighborhood_radius);

  for (std::size_t ordinal = 0; ordinal < model.ray_count(); ++ordinal) {
    if (occupied_rays[ordinal]) continue;
    const RayIndex ray = model.ray_from_ordinal(ordinal);
    const SectorIndex sec = sector_of(ray, params.sector_shape);
    if (blocked_sectors[static_cast<std::size_t>(sec.beam_group) * sector_cols +
                        sec.azimuth_group]) {
      continue;
    }
    const auto hit = intersect(plane, model.ray_direction(ray), params.parallel_eps);
    if (!hit || hit->t0 < model.min_range() || hit->t0 > model.max_range()) continue;

    GeneratedPoint gen;
    gen.position = hit->point;
    gen.ray = ray;
    gen.origin = GeneratedPoint::Origin::ground;
    if (grid) {
      const auto nearby = grid->query_radius(hit->point, params.neighborhood_radius);
      std::optional<std::size_t> pick;
      if (!nearby.empty()) {
        pick = nearby.front();
        double best = (ground.points[*pick].position - hit->point).squaredNorm();
        for (std::size_t i : nearby) {
          const double d2 = (ground.points[i].position - hit->point).squaredNorm();
          if (d2 < best) {
            best = d2;
            pick = i;
          }
        }
      } else {
        pick = grid->nearest(hit->point);
      }
      if (pick) gen.intensity = ground.points[*pick].intensity;
    }
    out.points.push_back(gen);
  }
  return out;
}

GeneratedCloud fuse(const GeneratedCloud& vn, const GeneratedCloud& vg) {
  GeneratedCloud out;
  out.points.reserve(vn.points.size() + vg.points.size());
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(out.points.capacity());
  auto add = [&](const GeneratedPoint& p) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.ray.azimuth_step))
         << 32) |
        static_cast<std::uint32_t>(p.ray.beam);
    if (!seen.insert(key).second) {
      throw DuplicateRay("fuse: ray (step " + std::to_string(p.ray.azimuth_step) +
                         ", beam " + std::to_string(p.ray.beam) +
                         ") carries two returns");
    }
    out.points.push_back(p);
  };
  for (const GeneratedPoint& p : vn.points) add(p);
  for (const GeneratedPoint& p : vg.points) add(p);
  out.dropped_out_of_fov = vn.dropped_out_of_fov + vg.dropped_out_of_fov;
  out.degenerate_buckets = vn.degenerate_buckets + vg.degenerate_buckets;
  out.blocked_sectors = vn.blocked_sectors + vg.blocked_sectors;
  return out;
}

}  // namespace rs2ad
