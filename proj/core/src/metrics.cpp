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

#include "rs2ad/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rs2ad/errors.hpp"

namespace rs2ad {

std::vector<double> normalize(const ClassHistogram& h) {
  if (h.classes.size() != h.weights.size()) {
    throw LengthMismatch("normalize: " + std::to_string(h.classes.size()) +
                         " classes vs " + std::to_string(h.weights.size()) +
                         " weights");
  }
  double total = 0.0;
  for (double w : h.weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw Error("normalize: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ZeroTotal("normalize: total weight is zero");
  std::vector<double> out(h.weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h.weights[i] / total;
  return out;
}

namespace {

// One half of the JS sum: sum_i p_i * log2(p_i / m_i), with 0 log 0 := 0.
double kl_to_mix(const std::vector<double>& p, const std::vector<double>& q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double m = 0.5 * (p[i] + q[i]);
    sum += p[i] * std::log2(p[i] / m);
  }
  return sum;
}

}  // namespace

double js_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("js_distance: vectors sized " + std::to_string(p.size()) +
                         " and " + std::to_string(q.size()));
  }
  const double div = 0.5 * kl_to_mix(p, q) + 0.5 * kl_to_mix(q, p);
  // Rounding can push an exact-zero divergence a hair negative.
  return std::sqrt(std::max(div, 0.0));
}

double cosine_similarity(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("cosine_similarity: vectors sized " +
                         std::to_string(p.size()) + " and " +
                         std::to_string(q.size()));
  }
  double dot = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * q[i];
    np += p[i] * p[i];
    nq += q[i] * q[i];
  }
  if (!(np > 0.0) || !(nq > 0.0)) {
    throw ZeroVector("cosine_similarity: zero-norm input");
  }
  return dot / (std::sqrt(np) * std::sqrt(nq));
}

namespace {

CloudStats stats_impl(const PointCloud& cloud, const LidarModel* model) {
  CloudStats s;
  s.count = cloud.size();
  if (model) {
    s.range_histogram.assign(
        static_cast<std::size_t>(std::ceil(model->max_range() / s.range_bin_width)),
        0);
    s.beam_counts.assign(model->beam_count(), 0);
  }
  if (cloud.empty()) return s;

  double imin = cloud.points.front().intensity;
  double imax = imin;
  double isum = 0.0;
  for (const LidarPoint& p : cloud.points) {
    const double r = p.position.norm();
    const auto bin = static_cast<std::size_t>(r / s.range_bin_width);
    if (bin >= s.range_histogram.size()) s.range_histogram.resize(bin + 1, 0);
    ++s.range_histogram[bin];
    imin = std::min(imin, p.intensity);
    imax = std::max(imax, p.intensity);
    isum += p.intensity;
    if (model) {
      if (const auto idx = model->bin(to_spherical(p.position))) {
        ++s.beam_counts[idx->beam];
      } else {
        ++s.out_of_fov;
      }
    }
  }
  s.intensity_min = imin;
  s.intensity_max = imax;
  s.intensity_mean = isum / static_cast<double>(cloud.size());
  return s;
}

}  // namespace

CloudStats cloud_stats(const PointCloud& cloud) { return stats_impl(cloud, nullptr); }

CloudStats cloud_stats(const PointCloud& cloud, const LidarModel& model) {
  return stats_impl(cloud, &model);
}

}  // namespace rs2ad
