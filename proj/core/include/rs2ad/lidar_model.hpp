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
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rs2ad/geometry.hpp"

namespace rs2ad {

/// User-facing description of a virtual spinning LiDAR. Angles are degrees,
/// distances meters. `mount_pose` is the sensor's pose in the vehicle frame
/// (so a sensor 0.25 m above the box center has translation (0, 0, 0.25));
/// the vehicle->lidar extrinsic is its inverse and is derived by LidarModel.
struct LidarConfig {
  std::array<double, 2> vertical_fov_deg{-25.0, 15.0};
  double horizontal_fov_deg = 360.0;
  std::vector<double> elevation_table_deg;  // one entry per beam, ascending
  double azimuth_resolution_deg = 0.2;
  std::array<double, 2> range_m{0.5, 200.0};
  RigidTransform mount_pose;
};

/// One virtual ray: horizontal step in [0, m), beam in [0, k).
struct RayIndex {
  int azimuth_step = 0;
  int beam = 0;
  bool operator==(const RayIndex&) const = default;
};

/// Occlusion sector: beams grouped in pairs, azimuth steps in groups of 25
/// (by default; see sector_of overloads).
struct SectorIndex {
  int beam_group = 0;
  int azimuth_group = 0;
  bool operator==(const SectorIndex&) const = default;
};

/// Default sector shape: 2 adjacent beams x 25 adjacent azimuth steps.
inline constexpr std::array<int, 2> kDefaultSectorShape{2, 25};

SectorIndex sector_of(RayIndex idx,
                      std::array<int, 2> shape = kDefaultSectorShape);

/// Immutable virtual sensor. Validates the config on construction and
/// precomputes the polar-angle bin edges used by bin().
class LidarModel {
 public:
  explicit LidarModel(LidarConfig config);

  /// Factory for the bundled 64-beam default: vertical FOV [-25, 15] deg,
  /// 360 deg horizontal at 0.2 deg resolution, range [0.5, 200] m, sensor
  /// mounted 0.25 m above the vehicle box center. The elevation table is a
  /// synthetic 64-entry layout with doubled beam density in [-6, 2] deg.
  static LidarModel pandar64();

  const LidarConfig& config() const { return config_; }

  int beam_count() const { return static_cast<int>(config_.elevation_table_deg.size()); }
  int azimuth_steps() const { return azimuth_steps_; }
  std::size_t ray_count() const {
    return static_cast<std::size_t>(beam_count()) * azimuth_steps_;
  }

  double min_range() const { return config_.range_m[0]; }
  double max_range() const { return config_.range_m[1]; }

  /// Vehicle->lidar extrinsic (inverse of the configured sensor pose),
  /// tagged with its frames.
  const RigidTransform& mount() const { return mount_; }

  double beam_elevation_deg(int beam) const;
  /// Polar angle of a beam in radians; decreases as the beam index rises.
  double beam_polar(int beam) const;
  /// Azimuth of a horizontal step in radians, step * resolution.
  double step_azimuth(int step) const;

  /// Unit direction of a ray. Throws IndexOutOfRange for indices off the grid.
  Eigen::Vector3d ray_direction(RayIndex idx) const;

  /// Maps a spherical coordinate to the ray bin containing it, or nullopt
  /// when the direction is outside the vertical or horizontal FOV. Bins are
  /// half-open toward rising polar angle; the topmost and bottommost bins
  /// extend to the FOV limits, and the bottom FOV edge itself is included so
  /// a beam sitting exactly at the limit round-trips.
  std::optional<RayIndex> bin(const SphericalCoord& s) const;

  /// Flat ray ordinal in [0, ray_count): azimuth_step * beam_count + beam.
  std::size_t ray_ordinal(RayIndex idx) const {
    return static_cast<std::size_t>(idx.azimuth_step) * beam_count() + idx.beam;
  }
  RayIndex ray_from_ordinal(std::size_t ordinal) const {
    return {static_cast<int>(ordinal / beam_count()),
            static_cast<int>(ordinal % beam_count())};
  }

  int sector_rows(std::array<int, 2> shape = kDefaultSectorShape) const;
  int sector_cols(std::array<int, 2> shape = kDefaultSectorShape) const;

 private:
  LidarConfig config_;
  int azimuth_steps_ = 0;
  bool full_circle_ = true;
  double horizontal_fov_rad_ = 0.0;
  double azimuth_resolution_rad_ = 0.0;
  std::vector<double> beam_polar_;     // per beam, decreasing
  std::vector<double> polar_edges_;    // ascending, size k+1
  RigidTransform mount_;
};

/// The synthetic 64-entry elevation table used by LidarModel::pandar64().
std::vector<double> pandar64_elevation_table();

/// Parses the key-value sensor config format. Errors name the key and line.
LidarConfig parse_lidar_config(std::istream& in, const std::string& source_name = "<config>");
LidarConfig load_lidar_config(const std::filesystem::path& path);
std::string format_lidar_config(const LidarConfig& config);
void save_lidar_config(const std::filesystem::path& path, const LidarConfig& config);

}  // namespace rs2ad
