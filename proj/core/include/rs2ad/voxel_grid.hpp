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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rs2ad/errors.hpp"
#include "rs2ad/geometry.hpp"

namespace rs2ad {

/// Uniform voxel hash over a fixed point set. Supports exact radius queries
/// and exact nearest-neighbor lookup (expanding-shell search). Positions are
/// copied at construction; returned values are indices into that point set.
class VoxelGrid {
 public:
  VoxelGrid(std::vector<Point3> points, double cell_size)
      : points_(std::move(points)), cell_(cell_size) {
    if (!(cell_ > 0.0)) throw Error("voxel cell size must be positive");
    cells_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      cells_[key_of(points_[i])].push_back(i);
    }
  }

  VoxelGrid(const PointCloud& cloud, double cell_size)
      : VoxelGrid(positions_of(cloud), cell_size) {}

  std::size_t size() const { return points_.size(); }
  const Point3& point(std::size_t i) const { return points_[i]; }

  /// Indices of all points with ‖p − center‖ ≤ radius, ascending.
  std::vector<std::size_t> query_radius(const Point3& center, double radius) const {
    std::vector<std::size_t> out;
    if (!(radius >= 0.0) || points_.empty()) return out;
    const double r2 = radius * radius;
    const Coord lo = coord_of(center - Eigen::Vector3d::Constant(radius));
    const Coord hi = coord_of(center + Eigen::Vector3d::Constant(radius));
    for (std::int64_t x = lo.x; x <= hi.x; ++x) {
      for (std::int64_t y = lo.y; y <= hi.y; ++y) {
        for (std::int64_t z = lo.z; z <= hi.z; ++z) {
          auto it = cells_.find(pack(Coord{x, y, z}));
          if (it == cells_.end()) continue;
          for (std::size_t i : it->second) {
            if ((points_[i] - center).squaredNorm() <= r2) out.push_back(i);
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Exact nearest point to `center` (ties resolved to the lowest index),
  /// or nullopt for an empty grid.
  std::optional<std::size_t> nearest(const Point3& center) const {
    if (points_.empty()) return std::nullopt;
    ensure_bounds();
    const Coord c0 = coord_of(center);
    std::size_t best_idx = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    auto scan_cell = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
      auto it = cells_.find(pack(Coord{x, y, z}));
      if (it == cells_.end()) return;
      for (std::size_t i : it->second) {
        const double d2 = (points_[i] - center).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && i < best_idx)) {
          best_d2 = d2;
          best_idx = i;
        }
      }
    };
    // Expand cube shells around the center cell, restricted to the populated
    // bounding box so that empty space costs nothing. Every cell at Chebyshev
    // cell distance s holds points no closer than (s - 1) * cell, which gives
    // the termination bound once a candidate exists.
    const std::int64_t first = chebyshev_to_bounds(c0);
    const std::int64_t last = chebyshev_across_bounds(c0);
    for (std::int64_t shell = first; shell <= last; ++shell) {
      if (std::isfinite(best_d2)) {
        const double safe = (static_cast<double>(shell) - 1.0) * cell_;
        if (safe > 0.0 && safe * safe > best_d2) break;
      }
      if (shell == 0) {
        scan_cell(c0.x, c0.y, c0.z);
        continue;
      }
      const std::int64_t xa = std::max(c0.x - shell, bounds_lo_.x);
      const std::int64_t xb = std::min(c0.x + shell, bounds_hi_.x);
      const std::int64_t ya = std::max(c0.y - shell, bounds_lo_.y);
      const std::int64_t yb = std::min(c0.y + shell, bounds_hi_.y);
      const std::int64_t za = std::max(c0.z - shell, bounds_lo_.z);
      const std::int64_t zb = std::min(c0.z + shell, bounds_hi_.z);
      // Two x faces (full y/z extent), then y faces, then z faces with the
      // already-covered rows excluded. Clamping may drop a face entirely.
      for (const std::int64_t x : {c0.x - shell, c0.x + shell}) {
        if (x < bounds_lo_.x || x > bounds_hi_.x) continue;
        for (std::int64_t y = ya; y <= yb; ++y) {
          for (std::int64_t z = za; z <= zb; ++z) scan_cell(x, y, z);
        }
      }
      const std::int64_t xi = std::max(c0.x - shell + 1, bounds_lo_.x);
      const std::int64_t xj = std::min(c0.x + shell - 1, bounds_hi_.x);
      for (const std::int64_t y : {c0.y - shell, c0.y + shell}) {
        if (y < bounds_lo_.y || y > bounds_hi_.y) continue;
        for (std::int64_t x = xi; x <= xj; ++x) {
          for (std::int64_t z = za; z <= zb; ++z) scan_cell(x, y, z);
        }
      }
      const std::int64_t yi = std::max(c0.y - shell + 1, bounds_lo_.y);
      const std::int64_t yj = std::min(c0.y + shell - 1, bounds_hi_.y);
      for (const std::int64_t z : {c0.z - shell, c0.z + shell}) {
        if (z < bounds_lo_.z || z > bounds_hi_.z) continue;
        for (std::int64_t x = xi; x <= xj; ++x) {
          for (std::int64_t y = yi; y <= yj; ++y) scan_cell(x, y, z);
        }
      }
    }
    return best_idx;
  }

 private:
  struct Coord {
    std::int64_t x = 0, y = 0, z = 0;
  };

  static std::vector<Point3> positions_of(const PointCloud& cloud) {
    std::vector<Point3> out;
    out.reserve(cloud.size());
    for (const LidarPoint& p : cloud.points) out.push_back(p.position);
    return out;
  }

  Coord coord_of(const Point3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  std::uint64_t key_of(const Point3& p) const { return pack(coord_of(p)); }

  // 21 bits per axis with an offset: supports coordinates within +/-2^20
  // cells of the origin, ample for any physically plausible scene.
  static std::uint64_t pack(const Coord& c) {
    const std::uint64_t bias = 1u << 20;
    return ((static_cast<std::uint64_t>(c.x + bias) & 0x1FFFFF) << 42) |
           ((static_cast<std::uint64_t>(c.y + bias) & 0x1FFFFF) << 21) |
           (static_cast<std::uint64_t>(c.z + bias) & 0x1FFFFF);
  }

  void ensure_bounds() const {
    if (have_bounds_) return;
    // Lazily cache the populated cell bounding box.
    Coord lo{std::numeric_limits<std::int64_t>::max(),
             std::numeric_limits<std::int64_t>::max(),
             std::numeric_limits<std::int64_t>::max()};
    Coord hi{std::numeric_limits<std::int64_t>::min(),
             std::numeric_limits<std::int64_t>::min(),
             std::numeric_limits<std::int64_t>::min()};
    for (const Point3& p : points_) {
      const Coord c = coord_of(p);
      lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
      hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
    }
    bounds_lo_ = lo;
    bounds_hi_ = hi;
    have_bounds_ = true;
  }

  /// Chebyshev cell distance from c0 to the closest populated-bounds cell
  /// (zero when c0 lies inside the bounds).
  std::int64_t chebyshev_to_bounds(const Coord& c0) const {
    auto axis = [](std::int64_t v, std::int64_t lo, std::int64_t hi) {
      if (v < lo) return lo - v;
      if (v > hi) return v - hi;
      return std::int64_t{0};
    };
    return std::max({axis(c0.x, bounds_lo_.x, bounds_hi_.x),
                     axis(c0.y, bounds_lo_.y, bounds_hi_.y),
                     axis(c0.z, bounds_lo_.z, bounds_hi_.z)});
  }

  /// Chebyshev cell distance from c0 to the farthest populated-bounds cell;
  /// shells beyond this cannot contain any point.
  std::int64_t chebyshev_across_bounds(const Coord& c0) const {
    return std::max({std::max(std::llabs(c0.x - bounds_lo_.x), std::llabs(bounds_hi_.x - c0.x)),
                     std::max(std::llabs(c0.y - bounds_lo_.y), std::llabs(bounds_hi_.y - c0.y)),
                     std::max(std::llabs(c0.z - bounds_lo_.z), std::llabs(bounds_hi_.z - c0.z))});
  }

  std::vector<Point3> points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
  mutable Coord bounds_lo_{}, bounds_hi_{};
  mutable bool have_bounds_ = false;
};

}  // namespace rs2ad
