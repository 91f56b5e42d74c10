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

#include "rs2ad/ground_seg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rs2ad/errors.hpp"

namespace rs2ad {
namespace {

constexpr double kTwoPi = 6.283185307179586476925;

struct PatchPlane {
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  double offset = 0.0;  // plane is normal . p = offset
  bool valid = false;
};

void validate(const SegParams& p) {
  if (p.ring_radii_m.empty() || p.ring_radii_m.size() != p.azimuth_bins.size()) {
    throw Error("seg params: ring radii and azimuth bins must be non-empty and matched");
  }
  double prev = 0.0;
  for (double r : p.ring_radii_m) {
    if (!(r > prev)) throw Error("seg params: ring radii must be positive ascending");
    prev = r;
  }
  for (int b : p.azimuth_bins) {
    if (b < 1) throw Error("seg params: azimuth bin counts must be positive");
  }
  if (!(p.seed_height_band_m > 0.0) || !(p.plane_dist_threshold_m > 0.0)) {
    throw Error("seg params: height band and distance threshold must be positive");
  }
  if (!(p.normal_z_min > 0.0) || p.normal_z_min > 1.0) {
    throw Error("seg params: normal_z_min must lie in (0, 1]");
  }
  if (p.min_patch_points < 1) {
    throw Error("seg params: min_patch_points must be positive");
  }
}

// PCA plane over the seed subset: centroid plus smallest-eigenvalue direction.
// Invalid when the seeds are rank-deficient (collinear) or the normal is not
// vertical enough.
PatchPlane fit_patch_plane(const PointCloud& cloud,
                           const std::vector<std::size_t>& seeds,
                           double normal_z_min) {
  PatchPlane plane;
  if (seeds.size() < 3) return plane;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (std::size_t i : seeds) centroid += cloud.points[i].position;
  centroid /= static_cast<double>(seeds.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : seeds) {
    const Eigen::Vector3d d = cloud.points[i].position - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
  if (!(evals[2] > 0.0) || evals[1] <= 1e-10 * evals[2]) {
    return plane;  // seeds collinear or coincident
  }
  Eigen::Vector3d n = eig.eigenvectors().col(0).normalized();
  if (n.z() < 0.0) n = -n;
  if (n.z() < normal_z_min) return plane;
  plane.normal = n;
  plane.offset = n.dot(centroid);
  plane.valid = true;
  return plane;
}

GroundSplit build_split(const PointCloud& cloud,
                        const std::vector<char>& is_ground) {
  GroundSplit out;
  out.ground.frame = cloud.frame;
  out.nonground.frame = cloud.frame;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (is_ground[i]) {
      out.ground_indices.push_back(i);
      out.ground.points.push_back(cloud.points[i]);
    } else {
      out.nonground_indices.push_back(i);
      out.nonground.points.push_back(cloud.points[i]);
    }
  }
  return out;
}

}  // namespace

GroundSplit segment(const PointCloud& cloud, const SegParams& params) {
  if (cloud.empty()) throw EmptyCloud("segment: empty cloud");
  validate(params);

  const int rings = static_cast<int>(params.ring_radii_m.size());
  std::vector<int> patch_offset(rings + 1, 0);
  for (int r = 0; r < rings; ++r) {
    patch_offset[r + 1] = patch_offset[r] + params.azimuth_bins[r];
  }
  const int patch_count = patch_offset[rings];

  // Assign every point to a (ring, azimuth-bin) patch.
  std::vector<int> patch_of(cloud.size());
  std::vector<std::vector<std::size_t>> members(patch_count);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i].position;
    const double rho = std::hypot(p.x(), p.y());
    int ring = rings - 1;
    for (int r = 0; r < rings; ++r) {
      if (rho <= params.ring_radii_m[r]) {
        ring = r;
        break;
      }
    }
    double phi = std::atan2(p.y(), p.x());
    if (phi < 0.0) phi += kTwoPi;
    const int bins = params.azimuth_bins[ring];
    int bin = static_cast<int>(phi / (kTwoPi / bins));
    bin = std::clamp(bin, 0, bins - 1);
    const int patch = patch_offset[ring] + bin;
    patch_of[i] = patch;
    members[patch].push_back(i);
  }

  // Fit a plane per sufficiently populated patch from its low seed band.
  const int eff_min = std::max(params.min_patch_points, 3);
  std::vector<PatchPlane> planes(patch_count);
  for (int patch = 0; patch < patch_count; ++patch) {
    const auto& idx = members[patch];
    if (static_cast<int>(idx.size()) < eff_min) continue;
    double min_z = cloud.points[idx.front()].position.z();
    for (std::size_t i : idx) min_z = std::min(min_z, cloud.points[i].position.z());
    std::vector<std::size_t> seeds;
    for (std::size_t i : idx) {
      if (cloud.points[i].position.z() <= min_z + params.seed_height_band_m) {
        seeds.push_back(i);
      }
    }
    if (seeds.size() < 3) {
      // Degenerate band: fall back to the three lowest points.
      seeds = idx;
      std::sort(seeds.begin(), seeds.end(), [&](std::size_t a, std::size_t b) {
        const double za = cloud.points[a].position.z();
        const double zb = cloud.points[b].position.z();
        return za != zb ? za < zb : a < b;
      });
      seeds.resize(3);
    }
    planes[patch] = fit_patch_plane(cloud, seeds, params.normal_z_min);
  }

  // Sparse or failed patches inherit the nearest valid plane, preferring
  // inner rings, then the own ring, then outer rings; within a ring the
  // azimuthally closest valid patch wins.
  auto bin_center = [&](int ring, int bin) {
    return (bin + 0.5) * (kTwoPi / params.azimuth_bins[ring]);
  };
  auto ang_dist = [](double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, kTwoPi - d);
  };
  std::vector<PatchPlane> resolved = planes;
  for (int ring = 0; ring < rings; ++ring) {
    for (int bin = 0; bin < params.azimuth_bins[ring]; ++bin) {
      const int patch = patch_offset[ring] + bin;
      if (resolved[patch].valid || members[patch].empty()) continue;
      const double center = bin_center(ring, bin);
      std::vector<int> ring_order;
      for (int r = ring - 1; r >= 0; --r) ring_order.push_back(r);
      ring_order.push_back(ring);
      for (int r = ring + 1; r < rings; ++r) ring_order.push_back(r);
      for (int r : ring_order) {
        int best = -1;
        double best_d = 0.0;
        for (int b2 = 0; b2 < params.azimuth_bins[r]; ++b2) {
          const int cand = patch_offset[r] + b2;
          if (!planes[cand].valid) continue;
          const double d = ang_dist(center, bin_center(r, b2));
          if (best < 0 || d < best_d) {
            best = cand;
            best_d = d;
          }
        }
        if (best >= 0) {
          resolved[patch] = planes[best];
          break;
        }
      }
    }
  }

  // Classify against the patch plane.
  std::vector<char> is_ground(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const PatchPlane& plane = resolved[patch_of[i]];
    if (!plane.valid) continue;
    const double dist =
        std::abs(plane.normal.dot(cloud.points[i].position) - plane.offset);
    if (dist <= params.plane_dist_threshold_m) is_ground[i] = 1;
  }
  return build_split(cloud, is_ground);
}

GroundSplit import_mask(const PointCloud& cloud, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != cloud.size()) {
    throw LengthMismatch("import_mask: mask has " + std::to_string(mask.size()) +
                         " entries for " + std::to_string(cloud.size()) + " points");
  }
  std::vector<char> is_ground(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) is_ground[i] = mask[i] ? 1 : 0;
  return build_split(cloud, is_ground);
}

}  // namespace rs2ad
