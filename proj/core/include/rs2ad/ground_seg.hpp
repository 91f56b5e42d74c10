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
#include <vector>

#include "rs2ad/geometry.hpp"

namespace rs2ad {

/// Exact partition of a cloud into ground and non-ground subsets. The index
/// vectors refer to the input cloud and witness the partition invariant:
/// together they cover every input index exactly once, each in ascending
/// order, and points are copied in that order.
struct GroundSplit {
  PointCloud ground;
  PointCloud nonground;
  std::vector<std::size_t> ground_indices;
  std::vector<std::size_t> nonground_indices;
};

/// Tuning for the polar-grid plane-consistency segmenter. Rings are annuli
/// around the sensor (outer radii in meters, ascending); each ring is split
/// into its own number of azimuth bins; points beyond the last radius fall
/// into the last ring. Patch planes come from a PCA fit over seed points
/// within `seed_height_band_m` of the patch's lowest point.
struct SegParams {
  std::vector<double> ring_radii_m{10.0, 25.0, 50.0, 100.0};
  std::vector<int> azimuth_bins{16, 32, 54, 32};
  double seed_height_band_m = 0.4;
  double plane_dist_threshold_m = 0.15;
  double normal_z_min = 0.96592582628906829;  // cos 15 deg
  int min_patch_points = 10;
};

/// Splits a lidar-frame, range-filtered cloud into ground and non-ground.
/// Each sufficiently populated polar patch gets a local plane estimate from
/// its low-band seed points; points within the distance threshold of a valid
/// (near-vertical-normal) patch plane are ground. Sparse patches inherit the
/// nearest valid patch plane, preferring inner rings. Throws EmptyCloud for
/// an empty input and Error for invalid parameters.
GroundSplit segment(const PointCloud& cloud, const SegParams& params = {});

/// Splits by an externally supplied mask (nonzero byte = ground), preserving
/// order. Throws LengthMismatch when sizes differ.
GroundSplit import_mask(const PointCloud& cloud, const std::vector<std::uint8_t>& mask);

}  // namespace rs2ad
