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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "rs2ad/errors.hpp"
#include "rs2ad/resample.hpp"
#include "rs2ad/voxel_grid.hpp"

namespace {

using rs2ad::Point3;

constexpr double kDeg = std::numbers::pi / 180.0;

rs2ad::PointCloud lidar_cloud(std::vector<rs2ad::LidarPoint> pts) {
  rs2ad::PointCloud cloud;
  cloud.frame = rs2ad::Frame::lidar;
  cloud.points = std::move(pts);
  return cloud;
}

// Small-matrix least squares oracle: solves the z-form normal equations with
// Cramer's rule over raw (uncentered) coordinates. Only used on benign,
// well-scaled fixtures where the naive approach is stable.
std::array<double, 3> cramer_plane_z(const std::vector<Point3>& pts) {
  double sxx = 0, sxy = 0, sx = 0, syy = 0, sy = 0, s1 = 0;
  double bx = 0, by = 0, bz = 0;
  for (const Point3& p : pts) {
    sxx += p.x() * p.x();
    sxy += p.x() * p.y();
    sx += p.x();
    syy += p.y() * p.y();
    sy += p.y();
    s1 += 1.0;
    bx += p.x() * p.z();
    by += p.y() * p.z();
    bz += p.z();
  }
  Eigen::Matrix3d m;
  m << sxx, sxy, sx, sxy, syy, sy, sx, sy, s1;
  const Eigen::Vector3d rhs(bx, by, bz);
  const Eigen::Vector3d sol = m.fullPivLu().solve(rhs);
  return {sol.x(), sol.y(), sol.z()};
}

// Evaluates |normal . p + c| / |normal| for a point.
double plane_point_dist(const rs2ad::PlaneModel& plane, const Point3& p) {
  const Eigen::Vector3d n = plane.normal();
  return std::abs(n.dot(p) + plane.c) / n.norm();
}

}  // namespace

TEST_SUITE("resample") {

TEST_CASE("plane normals follow the three axis forms") {
  rs2ad::PlaneModel z{1.5, -2.0, 3.0, rs2ad::PlaneModel::Axis::z};
  CHECK((z.normal() - Eigen::Vector3d(1.5, -2.0, -1.0)).norm() == 0.0);
  rs2ad::PlaneModel x{1.5, -2.0, 3.0, rs2ad::PlaneModel::Axis::x};
  CHECK((x.normal() - Eigen::Vector3d(-1.0, 1.5, -2.0)).norm() == 0.0);
  rs2ad::PlaneModel y{1.5, -2.0, 3.0, rs2ad::PlaneModel::Axis::y};
  CHECK((y.normal() - Eigen::Vector3d(1.5, -1.0, -2.0)).norm() == 0.0);

  // Every form satisfies normal . p = -c for points on the plane.
  const Point3 on_z(2.0, 1.0, 1.5 * 2.0 - 2.0 * 1.0 + 3.0);
  CHECK(std::abs(z.normal().dot(on_z) + z.c) < 1e-12);
  const Point3 on_x(1.5 * 2.0 - 2.0 * 1.0 + 3.0, 2.0, 1.0);
  CHECK(std::abs(x.normal().dot(on_x) + x.c) < 1e-12);
  const Point3 on_y(2.0, 1.5 * 2.0 - 2.0 * 1.0 + 3.0, 1.0);
  CHECK(std::abs(y.normal().dot(on_y) + y.c) < 1e-12);
}

TEST_CASE("bucketing drops out-of-FOV points and orders buckets by ordinal") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  auto cloud = lidar_cloud({
      {Point3(10.0, 0.0, 0.0), 1.0},                   // beam at 0 deg elevation
      {Point3(10.0, 0.0, 10.0), 2.0},                  // 45 deg up: outside FOV
      {Point3(0.0, 10.0, 0.0), 3.0},                   // azimuth 90 deg
      {Point3(10.0, 0.0, -0.001), 4.0},                // just below 0 deg: same bin as the first
      {Point3(-10.0, 0.0, -10.0), 5.0},                // 45 deg down: outside FOV
  });
  const rs2ad::BucketSet set = rs2ad::bucket_nonground(cloud, model);
  CHECK(set.dropped_out_of_fov == 2);
  REQUIRE(set.buckets.size() == 2);
  // Ascending ordinal order and correct membership.
  CHECK(model.ray_ordinal(set.buckets[0].ray) < model.ray_ordinal(set.buckets[1].ray));
  CHECK(set.buckets[0].member_indices == std::vector<std::size_t>{0, 3});
  CHECK(set.buckets[1].member_indices == std::vector<std::size_t>{2});
  CHECK(set.buckets[0].ray.azimuth_step == 0);
  CHECK(set.buckets[1].ray.azimuth_step == 450);  // 90 deg / 0.2 deg

  rs2ad::PointCloud world = cloud;
  world.frame = rs2ad::Frame::world;
  CHECK_THROWS_AS(rs2ad::bucket_nonground(world, model), rs2ad::FrameMismatch);
}

TEST_CASE("every non-ground point lands in the bucket its direction bins to") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> coord(-40.0, 40.0);
  std::uniform_real_distribution<double> height(-3.0, 8.0);
  std::vector<rs2ad::LidarPoint> pts;
  for (int i = 0; i < 5000; ++i) {
    pts.push_back({Point3(coord(rng), coord(rng), height(rng)), 1.0});
  }
  auto cloud = lidar_cloud(std::move(pts));
  const rs2ad::BucketSet set = rs2ad::bucket_nonground(cloud, model);

  std::size_t members = 0;
  for (const rs2ad::RayBucket& bucket : set.buckets) {
    CHECK_FALSE(bucket.member_indices.empty());
    for (std::size_t i : bucket.member_indices) {
      const auto bin = model.bin(rs2ad::to_spherical(cloud.points[i].position));
      REQUIRE(bin.has_value());
      CHECK(*bin == bucket.ray);
      ++members;
    }
  }
  CHECK(members + set.dropped_out_of_fov == cloud.size());
}

TEST_CASE("local plane fits recover exact planes and match least squares") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::mt19937 rng(52);
  // Spread small enough that the whole patch sits inside the sigma = 1 m
  // neighborhood of its closest member, making the oracle's point set equal.
  std::uniform_real_distribution<double> off(-0.3, 0.3);

  // A gently inclined surface patch around (10, 0, 0.5).
  std::vector<rs2ad::LidarPoint> pts;
  std::vector<Point3> raw;
  for (int i = 0; i < 40; ++i) {
    const double x = 10.0 + off(rng);
    const double y = off(rng);
    const double z = 0.5 + 0.08 * (x - 10.0) - 0.03 * y + 0.002 * off(rng);
    pts.push_back({Point3(x, y, z), 7.0});
    raw.emplace_back(x, y, z);
  }
  auto cloud = lidar_cloud(std::move(pts));

  rs2ad::RayBucket bucket;
  bucket.ray = *model.bin(rs2ad::to_spherical(cloud.points[0].position));
  for (std::size_t i = 0; i < cloud.size(); ++i) bucket.member_indices.push_back(i);

  const auto plane = rs2ad::fit_local_plane(bucket, cloud);
  REQUIRE(plane.has_value());
  CHECK(plane->axis == rs2ad::PlaneModel::Axis::z);

  const auto want = cramer_plane_z(raw);
  CHECK(plane->a == doctest::Approx(want[0]).epsilon(1e-6));
  CHECK(plane->b == doctest::Approx(want[1]).epsilon(1e-6));
  CHECK(plane->c == doctest::Approx(want[2]).epsilon(1e-4));
}

TEST_CASE("an exactly planar patch is reproduced to machine precision") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::vector<rs2ad::LidarPoint> pts;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double x = 8.0 + 0.1 * i;
      const double y = -0.2 + 0.1 * j;
      pts.push_back({Point3(x, y, 0.25 * x - 0.5 * y + 1.0), 1.0});
    }
  }
  auto cloud = lidar_cloud(std::move(pts));
  rs2ad::RayBucket bucket;
  bucket.ray = *model.bin(rs2ad::to_spherical(cloud.points[0].position));
  for (std::size_t i = 0; i < cloud.size(); ++i) bucket.member_indices.push_back(i);

  const auto plane = rs2ad::fit_local_plane(bucket, cloud);
  REQUIRE(plane.has_value());
  CHECK(plane->a == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(plane->b == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(plane->c == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("vertical surfaces switch to an axis-swapped form") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> off(-0.4, 0.4);
  // A wall patch at x = 10 (normal along x): the z-form would be unusable.
  std::vector<rs2ad::LidarPoint> pts;
  for (int i = 0; i < 40; ++i) {
    pts.push_back({Point3(10.0, off(rng), off(rng)), 1.0});
  }
  auto cloud = lidar_cloud(std::move(pts));
  rs2ad::RayBucket bucket;
  bucket.ray = *model.bin(rs2ad::to_spherical(Point3(10.0, 0.0, 0.0)));
  for (std::size_t i = 0; i < cloud.size(); ++i) bucket.member_indices.push_back(i);

  const auto plane = rs2ad::fit_local_plane(bucket, cloud);
  REQUIRE(plane.has_value());
  CHECK(plane->axis == rs2ad::PlaneModel::Axis::x);
  // The recovered plane is x = 10: normalized normal along x, offset 10.
  const Eigen::Vector3d n = plane->normal().normalized();
  CHECK(std::abs(std::abs(n.x()) - 1.0) < 1e-9);
  for (const auto& p : cloud.points) {
    CHECK(plane_point_dist(*plane, p.position) < 1e-9);
  }
}

TEST_CASE("undersized or collinear neighborhoods refuse to fit") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  // Two points cannot support a plane.
  auto tiny = lidar_cloud({{Point3(10.0, 0.0, 0.0), 1.0},
                           {Point3(10.1, 0.0, 0.0), 1.0}});
  rs2ad::RayBucket bucket;
  bucket.ray = *model.bin(rs2ad::to_spherical(tiny.points[0].position));
  bucket.member_indices = {0, 1};
  CHECK_FALSE(rs2ad::fit_local_plane(bucket, tiny).has_value());

  // Collinear points along a line: rank-deficient normal equations.
  std::vector<rs2ad::LidarPoint> line;
  for (int i = 0; i < 30; ++i) {
    line.push_back({Point3(10.0 + 0.01 * i, 0.02 * i, 0.005 * i), 1.0});
  }
  auto col = lidar_cloud(std::move(line));
  rs2ad::RayBucket lb;
  lb.ray = *model.bin(rs2ad::to_spherical(col.points[0].position));
  for (std::size_t i = 0; i < col.size(); ++i) lb.member_indices.push_back(i);
  CHECK_FALSE(rs2ad::fit_local_plane(lb, col).has_value());
}

TEST_CASE("the fit gathers neighbors beyond the bucket itself") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  // One lone bucket member, but the surrounding cloud (same surface, other
  // buckets) provides the support points within the sigma radius.
  std::vector<rs2ad::LidarPoint> pts;
  pts.push_back({Point3(10.0, 0.0, 0.0), 1.0});  // the bucket member
  std::mt19937 rng(54);
  std::uniform_real_distribution<double> off(-0.8, 0.8);
  for (int i = 0; i < 60; ++i) {
    const double y = off(rng), z = off(rng);
    pts.push_back({Point3(10.0, y, z), 1.0});  // wall x = 10
  }
  auto cloud = lidar_cloud(std::move(pts));
  rs2ad::RayBucket bucket;
  bucket.ray = *model.bin(rs2ad::to_spherical(cloud.points[0].position));
  bucket.member_indices = {0};

  const auto plane = rs2ad::fit_local_plane(bucket, cloud);
  REQUIRE(plane.has_value());
  CHECK(plane_point_dist(*plane, Point3(10.0, 0.3, -0.2)) < 1e-9);
}

TEST_CASE("ray-plane intersection has closed-form answers") {
  // Horizontal plane z = -2 hit by a downward diagonal ray.
  rs2ad::PlaneModel ground{0.0, 0.0, -2.0, rs2ad::PlaneModel::Axis::z};
  const Eigen::Vector3d down(std::cos(-30.0 * kDeg), 0.0, std::sin(-30.0 * kDeg));
  const auto hit = rs2ad::intersect(ground, down);
  REQUIRE(hit.has_value());
  CHECK(hit->t0 == doctest::Approx(4.0).epsilon(1e-12));  // 2 / sin(30 deg)
  CHECK((hit->point - Point3(4.0 * std::cos(-30.0 * kDeg), 0.0, -2.0)).norm() < 1e-12);

  // Wall x = 5 hit head-on.
  rs2ad::PlaneModel wall{0.0, 0.0, 5.0, rs2ad::PlaneModel::Axis::x};
  const auto head_on = rs2ad::intersect(wall, Eigen::Vector3d::UnitX());
  REQUIRE(head_on.has_value());
  CHECK(head_on->t0 == doctest::Approx(5.0));
  CHECK((head_on->point - Point3(5.0, 0.0, 0.0)).norm() < 1e-12);

  // Parallel ray: no hit.
  CHECK_FALSE(rs2ad::intersect(ground, Eigen::Vector3d::UnitX()).has_value());
  // Plane behind the sensor: no hit.
  CHECK_FALSE(rs2ad::intersect(wall, -Eigen::Vector3d::UnitX()).has_value());
}

TEST_CASE("non-ground resampling hits a wall within centimeters") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::uniform_real_distribution<double> spread(-3.0, 3.0);

  // A noisy wall at x = 10 spanning enough beams and azimuths.
  std::vector<rs2ad::LidarPoint> pts;
  for (int i = 0; i < 4000; ++i) {
    pts.push_back({Point3(10.0 + jitter(rng), spread(rng), spread(rng) * 0.5), 42.0});
  }
  auto wall = lidar_cloud(std::move(pts));

  const rs2ad::NonGroundResult result = rs2ad::resample_nonground(wall, model);
  REQUIRE_FALSE(result.cloud.empty());
  std::size_t checked = 0;
  for (const rs2ad::GeneratedPoint& g : result.cloud.points) {
    if (g.fallback) continue;
    // Each return lies exactly on its ray...
    const Eigen::Vector3d dir = model.ray_direction(g.ray);
    const double t = g.position.norm();
    CHECK((g.position - t * dir).norm() < 1e-6 * std::max(1.0, t));
    // ...and near the true wall plane despite the noise.
    CHECK(std::abs(g.position.x() - 10.0) < 0.03);
    CHECK(g.intensity == 42.0);
    ++checked;
  }
  CHECK(checked > 100);
  // Occupancy flags agree with the emitted returns.
  std::size_t occupied = std::count(result.occupied_rays.begin(),
                                    result.occupied_rays.end(), std::uint8_t{1});
  CHECK(occupied == result.cloud.size());
}

TEST_CASE("flat ground resampling reproduces the ring radius closed form") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::mt19937 rng(56);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Dense flat ground at z = -1.9 (sensor height of a typical mount).
  std::vector<rs2ad::LidarPoint> pts;
  for (int i = 0; i < 30000; ++i) {
    const double rho = 60.0 * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    pts.push_back({Point3(rho * std::cos(phi), rho * std::sin(phi), -1.9), 9.0});
  }
  auto ground = lidar_cloud(std::move(pts));

  const rs2ad::PlaneModel plane = rs2ad::fit_ground_plane(ground);
  CHECK(plane.axis == rs2ad::PlaneModel::Axis::z);
  CHECK(plane.a == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(plane.c == doctest::Approx(-1.9).epsilon(1e-9));

  const std::vector<std::uint8_t> no_sectors(
      static_cast<std::size_t>(model.sector_rows()) * model.sector_cols(), 0);
  const std::vector<std::uint8_t> no_rays(model.ray_count(), 0);
  const rs2ad::GeneratedCloud out =
      rs2ad::resample_ground(plane, ground, model, no_sectors, no_rays);
  REQUIRE_FALSE(out.empty());

  for (std::size_t i = 0; i < out.points.size(); i += 97) {
    const rs2ad::GeneratedPoint& g = out.points[i];
    const double elev = model.beam_elevation_deg(g.ray.beam) * kDeg;
    REQUIRE(elev < 0.0);  // only downward beams can hit the ground
    // Closed-form slant range to a plane 1.9 m below the sensor.
    const double want_t = 1.9 / std::sin(-elev);
    CHECK(g.position.norm() == doctest::Approx(want_t).epsilon(1e-9));
    CHECK(g.position.z() == doctest::Approx(-1.9).epsilon(1e-9));
    CHECK(g.intensity == 9.0);
    CHECK(g.origin == rs2ad::GeneratedPoint::Origin::ground);
  }

  // Downward beams within range produce a full ring of 1800 azimuth steps.
  std::vector<int> per_beam(64, 0);
  for (const auto& g : out.points) per_beam[g.ray.beam]++;
  for (int b = 0; b < 64; ++b) {
    const double elev = model.beam_elevation_deg(b) * kDeg;
    if (elev >= 0.0) {
      CHECK(per_beam[b] == 0);
    } else {
      const double t = 1.9 / std::sin(-elev);
      if (t >= model.min_range() && t <= model.max_range()) {
        CHECK(per_beam[b] == 1800);
      } else {
        CHECK(per_beam[b] == 0);
      }
    }
  }
}

TEST_CASE("ground resampling skips occupied rays and blocked sectors") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  auto ground = lidar_cloud({{Point3(5.0, 0.0, -1.5), 1.0},
                             {Point3(-5.0, 0.0, -1.5), 1.0},
                             {Point3(0.0, 5.0, -1.5), 1.0},
                             {Point3(0.0, -5.0, -1.5), 1.0}});
  const rs2ad::PlaneModel plane{0.0, 0.0, -1.5, rs2ad::PlaneModel::Axis::z};

  std::vector<std::uint8_t> sectors(
      static_cast<std::size_t>(model.sector_rows()) * model.sector_cols(), 0);
  std::vector<std::uint8_t> rays(model.ray_count(), 0);

  const std::size_t baseline =
      rs2ad::resample_ground(plane, ground, model, sectors, rays).size();

  // Occupy one specific ray that is known to hit (downward beam 0 at step 0).
  rays[model.ray_ordinal({0, 0})] = 1;
  const rs2ad::GeneratedCloud skip_one =
      rs2ad::resample_ground(plane, ground, model, sectors, rays);
  CHECK(skip_one.size() == baseline - 1);
  for (const auto& g : skip_one.points) {
    CHECK_FALSE((g.ray == rs2ad::RayIndex{0, 0}));
  }
  rays[model.ray_ordinal({0, 0})] = 0;

  // Block one sector: all of its up-to-50 rays disappear together.
  sectors[0] = 1;  // beams 0..1, steps 0..24
  const rs2ad::GeneratedCloud blocked =
      rs2ad::resample_ground(plane, ground, model, sectors, rays);
  CHECK(blocked.blocked_sectors == 1);
  for (const auto& g : blocked.points) {
    const rs2ad::SectorIndex s = rs2ad::sector_of(g.ray);
    CHECK_FALSE((s == rs2ad::SectorIndex{0, 0}));
  }
  CHECK(baseline - blocked.size() == 50);  // both beams of the sector hit

  // Mis-sized flag vectors are rejected.
  std::vector<std::uint8_t> short_rays(10, 0);
  CHECK_THROWS_AS(
      rs2ad::resample_ground(plane, ground, model, sectors, short_rays),
      rs2ad::LengthMismatch);
}

TEST_CASE("degenerate buckets fall back to the closest member on the ray") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  // Two isolated points in one bin, nothing else within sigma: the fit must
  // fail and the fallback emits at the member range along the exact ray.
  auto cloud = lidar_cloud({{Point3(20.0, 0.01, 0.0), 3.0},
                            {Point3(21.0, 0.01, 0.0), 4.0}});
  const rs2ad::NonGroundResult result = rs2ad::resample_nonground(cloud, model);
  CHECK(result.cloud.degenerate_buckets > 0);
  REQUIRE_FALSE(result.cloud.empty());
  for (const rs2ad::GeneratedPoint& g : result.cloud.points) {
    CHECK(g.fallback);
    const Eigen::Vector3d dir = model.ray_direction(g.ray);
    const double t = g.position.norm();
    CHECK((g.position - t * dir).norm() < 1e-9);
  }
  // The nearest member's range and intensity survive.
  const auto& g0 = result.cloud.points.front();
  CHECK(g0.position.norm() == doctest::Approx(Point3(20.0, 0.01, 0.0).norm()));
  CHECK(g0.intensity == 3.0);
}

TEST_CASE("ground plane fitting needs three spanning points") {
  auto too_few = lidar_cloud({{Point3(1.0, 0.0, 0.0), 1.0},
                              {Point3(2.0, 0.0, 0.0), 1.0}});
  CHECK_THROWS_AS(rs2ad::fit_ground_plane(too_few), rs2ad::DegenerateGround);

  auto collinear = lidar_cloud({{Point3(1.0, 1.0, 0.0), 1.0},
                                {Point3(2.0, 2.0, 0.0), 1.0},
                                {Point3(3.0, 3.0, 0.0), 1.0},
                                {Point3(4.0, 4.0, 0.0), 1.0}});
  CHECK_THROWS_AS(rs2ad::fit_ground_plane(collinear), rs2ad::DegenerateGround);

  auto fine = lidar_cloud({{Point3(1.0, 0.0, -1.0), 1.0},
                           {Point3(0.0, 1.0, -1.0), 1.0},
                           {Point3(-1.0, -1.0, -1.0), 1.0}});
  const rs2ad::PlaneModel plane = rs2ad::fit_ground_plane(fine);
  CHECK(plane.a == doctest::Approx(0.0));
  CHECK(plane.b == doctest::Approx(0.0));
  CHECK(plane.c == doctest::Approx(-1.0));
}

TEST_CASE("fuse concatenates, sums diagnostics, and rejects duplicates") {
  rs2ad::GeneratedCloud vn;
  vn.points.push_back({Point3(5.0, 0.0, 0.0), 1.0, {0, 32},
                       rs2ad::GeneratedPoint::Origin::nonground, false});
  vn.dropped_out_of_fov = 3;
  vn.degenerate_buckets = 1;

  rs2ad::GeneratedCloud vg;
  vg.points.push_back({Point3(8.0, 0.0, -1.5), 2.0, {0, 5},
                       rs2ad::GeneratedPoint::Origin::ground, false});
  vg.points.push_back({Point3(8.1, 0.1, -1.5), 2.0, {1, 5},
                       rs2ad::GeneratedPoint::Origin::ground, false});
  vg.blocked_sectors = 4;

  const rs2ad::GeneratedCloud fused = rs2ad::fuse(vn, vg);
  CHECK(fused.size() == 3);
  CHECK(fused.dropped_out_of_fov == 3);
  CHECK(fused.degenerate_buckets == 1);
  CHECK(fused.blocked_sectors == 4);
  // Non-ground first, order preserved.
  CHECK(fused.points[0].origin == rs2ad::GeneratedPoint::Origin::nonground);
  CHECK((fused.points[1].ray == rs2ad::RayIndex{0, 5}));

  rs2ad::GeneratedCloud clash;
  clash.points.push_back({Point3(9.0, 0.0, 0.0), 1.0, {0, 32},
                          rs2ad::GeneratedPoint::Origin::ground, false});
  CHECK_THROWS_AS(rs2ad::fuse(vn, clash), rs2ad::DuplicateRay);
}

TEST_CASE("full resampling preserves the one-return-per-ray invariant") {
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  std::mt19937 rng(57);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> spread(-2.0, 2.0);

  std::vector<rs2ad::LidarPoint> ground_pts, object_pts;
  for (int i = 0; i < 20000; ++i) {
    const double rho = 50.0 * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    ground_pts.push_back({Point3(rho * std::cos(phi), rho * std::sin(phi), -1.8), 5.0});
  }
  for (int i = 0; i < 3000; ++i) {
    object_pts.push_back(
        {Point3(12.0 + 0.1 * unit(rng), spread(rng), spread(rng) * 0.4), 77.0});
  }
  auto ground = lidar_cloud(std::move(ground_pts));
  auto objects = lidar_cloud(std::move(object_pts));

  const rs2ad::NonGroundResult vn = rs2ad::resample_nonground(objects, model);
  const rs2ad::PlaneModel plane = rs2ad::fit_ground_plane(ground);
  const rs2ad::GeneratedCloud vg = rs2ad::resample_ground(
      plane, ground, model, vn.blocked_sectors, vn.occupied_rays);
  const rs2ad::GeneratedCloud fused = rs2ad::fuse(vn.cloud, vg);

  std::set<std::size_t> rays;
  for (const rs2ad::GeneratedPoint& g : fused.points) {
    CHECK(rays.insert(model.ray_ordinal(g.ray)).second);
    const double t = g.position.norm();
    CHECK(t >= model.min_range());
    CHECK(t <= model.max_range());
    const Eigen::Vector3d dir = model.ray_direction(g.ray);
    CHECK((g.position - t * dir).norm() <= 1e-6 * std::max(1.0, t));
  }
  CHECK(fused.size() > 40000);
}

}  // TEST_SUITE
