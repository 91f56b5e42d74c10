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
#include <optional>
#include <vector>

#include "rs2ad/geometry.hpp"
#include "rs2ad/lidar_model.hpp"
#include "rs2ad/voxel_grid.hpp"

namespace rs2ad {

/// Local surface model expressed with one coordinate as a function of the
/// other two. The canonical form is z = a x + b y + c with (unnormalized)
/// normal (a, b, -1); near-vertical surfaces use an axis-swapped form with
/// the same coefficients read against a different dependent axis.
struct PlaneModel {
  /// Which coordinate the plane solves for.
  enum class Axis : std::uint8_t { z, x, y };
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Axis axis = Axis::z;

  /// Unnormalized normal: z-form (a, b, -1), x-form (-1, a, b),
  /// y-form (a, -1, b). In every form, points p on the plane satisfy
  /// normal . p = -c.
  Eigen::Vector3d normal() const;
};

/// Non-ground points binned to one virtual ray; indices refer to the cloud
/// the bucket was built from.
struct RayBucket {
  RayIndex ray;
  std::vector<std::size_t> member_indices;
};

/// All buckets of a cloud, in ascending ray-ordinal order, plus the count of
/// points that fell outside the sensor's angular FOV.
struct BucketSet {
  std::vector<RayBucket> buckets;
  std::size_t dropped_out_of_fov = 0;
};

struct ResampleParams {
  double neighborhood_radius = 1.0;  // sigma, meters
  int min_fit_points = 3;
  double parallel_eps = 1e-6;  // minimum |normal . direction|
  std::array<int, 2> sector_shape = kDefaultSectorShape;
};

/// One synthesized return.
struct GeneratedPoint {
  Point3 position{0.0, 0.0, 0.0};
  double intensity = 0.0;
  RayIndex ray;
  enum class Origin : std::uint8_t { nonground, ground } origin = Origin::nonground;
  bool fallback = false;  // degenerate-fit passthrough rather than a plane hit
};

/// A synthesized cloud (lidar frame) with its diagnostics counters. The
/// per-ray uniqueness invariant — at most one return per RayIndex — holds for
/// every cloud this module produces.
struct GeneratedCloud {
  std::vector<GeneratedPoint> points;
  std::size_t dropped_out_of_fov = 0;
  std::size_t degenerate_buckets = 0;
  std::size_t blocked_sectors = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Flattens generated points into a lidar-frame PointCloud, dropping ray and
/// origin annotations.
PointCloud to_point_cloud(const GeneratedCloud& cloud);

/// Occupancy produced by non-ground resampling: one flag per ray ordinal and
/// one per sector (row-major, sector_rows x sector_cols of the model).
struct NonGroundResult {
  GeneratedCloud cloud;
  std::vector<std::uint8_t> occupied_rays;
  std::vector<std::uint8_t> blocked_sectors;
};

/// Assigns each non-ground point to the virtual ray whose angular bin
/// contains it; out-of-FOV points are dropped and counted.
BucketSet bucket_nonground(const PointCloud& nonground, const LidarModel& model);

/// Least-squares local plane around the bucket's closest-to-origin member
/// p_min. Neighbors are gathered from the full non-ground cloud (via `grid`,
/// which must index exactly that cloud's positions) within the sigma radius.
/// Returns nullopt when the neighborhood is too small or too ill-conditioned
/// to support a plane.
std::optional<PlaneModel> fit_local_plane(const RayBucket& bucket,
                                          const PointCloud& all_nonground,
                                          const VoxelGrid& grid,
                                          const ResampleParams& params = {});

/// Convenience overload that builds a one-shot voxel grid.
std::optional<PlaneModel> fit_local_plane(const RayBucket& bucket,
                                          const PointCloud& all_nonground,
                                          const ResampleParams& params = {});

struct RayHit {
  double t0 = 0.0;
  Point3 point{0.0, 0.0, 0.0};
};

/// Ray-plane intersection from the sensor origin along unit direction d:
/// t0 = -c / (normal . d), hit = t0 * d. Returns nullopt when the ray runs
/// parallel to the plane (|normal . d| < parallel_eps) or hits behind the
/// sensor (t0 <= 0).
std::optional<RayHit> intersect(const PlaneModel& plane, const Eigen::Vector3d& ray_dir,
                                double parallel_eps = 1e-6);

/// Resamples the non-ground cloud: per bucket, fit a local plane and
/// intersect the bucket's exact ray; keep hits inside [r_min, r_max] with the
/// intensity of the bucket member closest to the origin. Degenerate buckets
/// fall back to emitting that member's range along the ray (flagged).
NonGroundResult resample_nonground(const PointCloud& nonground, const LidarModel& model,
                                   const ResampleParams& params = {});

/// Global least-squares ground plane z = a x + b y + c over all ground
/// points. Throws DegenerateGround when fewer than three points or an
/// xy-collinear set makes the fit meaningless.
PlaneModel fit_ground_plane(const PointCloud& ground);

/// Resamples the ground: every ray not in a blocked sector and not already
/// occupied by a non-ground return is intersected with the global ground
/// plane; hits inside [r_min, r_max] are kept with the intensity of the
/// nearest original ground point within sigma of the hit (global nearest as
/// fallback). Flag vectors must be sized ray_count and
/// sector_rows * sector_cols respectively.
GeneratedCloud resample_ground(const PlaneModel& plane, const PointCloud& ground,
                               const LidarModel& model,
                               const std::vector<std::uint8_t>& blocked_sectors,
                               const std::vector<std::uint8_t>& occupied_rays,
                               const ResampleParams& params = {});

/// Concatenates V_n and V_g and sums their diagnostics. Throws DuplicateRay
/// if any ray would carry two returns.
GeneratedCloud fuse(const GeneratedCloud& vn, const GeneratedCloud& vg);

}  // namespace rs2ad
