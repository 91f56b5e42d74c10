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

#include <string>
#include <vector>

#include "rs2ad/geometry.hpp"
#include "rs2ad/lidar_model.hpp"

namespace rs2ad {

/// Named class weights (counts or percentages; any nonnegative scale).
struct ClassHistogram {
  std::vector<std::string> classes;
  std::vector<double> weights;
};

/// Weights divided by their total, summing to 1. Throws LengthMismatch for
/// mismatched names/weights, Error for negative weights, ZeroTotal when the
/// total is not positive.
std::vector<double> normalize(const ClassHistogram& h);

/// Jensen-Shannon distance sqrt(0.5 KL(p||m) + 0.5 KL(q||m)) with
/// m = (p+q)/2 and base-2 logarithms, so the value lies in [0, 1]. Inputs
/// must be matched-length probability vectors; zero bins contribute nothing.
double js_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Cosine of the angle between two weight vectors. Throws ZeroVector when
/// either has zero norm.
double cosine_similarity(const std::vector<double>& p, const std::vector<double>& q);

/// Basic descriptive statistics of a cloud. Range bins are 10 m wide
/// starting at 0; `beam_counts` is filled only by the model-aware overload
/// and counts points whose direction bins to each beam.
struct CloudStats {
  std::size_t count = 0;
  std::vector<std::size_t> range_histogram;
  double range_bin_width = 10.0;
  double intensity_min = 0.0;
  double intensity_mean = 0.0;
  double intensity_max = 0.0;
  std::vector<std::size_t> beam_counts;
  std::size_t out_of_fov = 0;
};

CloudStats cloud_stats(const PointCloud& cloud);
CloudStats cloud_stats(const PointCloud& cloud, const LidarModel& model);

}  // namespace rs2ad
