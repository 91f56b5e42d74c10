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

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "rs2ad/errors.hpp"
#include "rs2ad/io.hpp"
#include "rs2ad/pipeline.hpp"
#include "rs2ad/synth.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rs2ad_pipeline_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Writes a small synthetic frame (cloud + labels + truth mask) to disk and
// returns the bundle describing it.
rs2ad::FrameBundle make_frame(const fs::path& dir, bool with_mask) {
  rs2ad::AnalyticScene scene;
  scene.ground = {0.0, 0.0, 0.0, rs2ad::PlaneModel::Axis::z};
  scene.density = 6.0;
  scene.ground_extent_m = 40.0;
  scene.boxes.push_back({rs2ad::Point3(10.0, 4.0, 1.0), {3.0, 2.0, 2.0}, 0.2});
  scene.walls.push_back({{18.0, -12.0}, {18.0, 12.0}, 0.0, 4.0});

  rs2ad::ObjectLabel car;
  car.id = "car_1";
  car.category = "car";
  car.size = {4.5, 1.9, 1.6};
  car.center = rs2ad::Point3(2.0, -3.0, 0.8);
  car.rotation = Eigen::Vector3d(0.0, 0.0, 0.5);
  scene.vehicles.push_back(car);

  rs2ad::ObjectLabel truck = car;
  truck.id = "truck_2";
  truck.category = "truck";
  truck.size = {8.0, 3.0, 3.0};
  truck.center = rs2ad::Point3(-6.0, 6.0, 1.5);
  scene.vehicles.push_back(truck);

  rs2ad::ObjectLabel cone = car;
  cone.id = "cone_3";
  cone.category = "traffic_cone";
  cone.size = {0.3, 0.3, 0.7};
  cone.center = rs2ad::Point3(5.0, 5.0, 0.35);
  scene.vehicles.push_back(cone);

  const rs2ad::SampledScene sampled = rs2ad::sample_scene(scene, 2024);
  rs2ad::FrameBundle frame;
  frame.cloud = dir / "frame.bin";
  frame.labels = dir / "frame_labels.json";
  frame.frame_id = "frame";
  rs2ad::write_cloud(frame.cloud, sampled.cloud);
  rs2ad::write_labels(frame.labels, scene.vehicles);
  if (with_mask) {
    std::vector<std::uint8_t> mask(sampled.tags.size(), 0);
    for (std::size_t i = 0; i < sampled.tags.size(); ++i) {
      mask[i] = sampled.tags[i].ground ? 1 : 0;
    }
    frame.ground_mask = dir / "frame_mask.bin";
    rs2ad::write_mask(*frame.ground_mask, mask);
  }
  return frame;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("vehicle category matching is exact") {
  CHECK(rs2ad::is_vehicle_category("car"));
  CHECK(rs2ad::is_vehicle_category("truck"));
  CHECK(rs2ad::is_vehicle_category("bus"));
  CHECK(rs2ad::is_vehicle_category("trailer"));
  CHECK(rs2ad::is_vehicle_category("construction_vehicle"));
  CHECK_FALSE(rs2ad::is_vehicle_category("pedestrian"));
  CHECK_FALSE(rs2ad::is_vehicle_category("traffic_cone"));
  CHECK_FALSE(rs2ad::is_vehicle_category("Car"));
}

TEST_CASE("a single-target run writes consistent artifacts") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, false);

  rs2ad::RunConfig cfg;
  cfg.target.id = "car_1";
  cfg.out_dir = tmp.path / "out";

  const auto outputs = rs2ad::generate(frame, cfg);
  REQUIRE(outputs.size() == 1);
  const rs2ad::TargetOutput& out = outputs[0];
  CHECK(out.target_id == "car_1");
  CHECK(fs::exists(out.cloud));
  CHECK(fs::exists(out.labels));
  CHECK(fs::exists(out.diagnostics));
  CHECK(out.cloud.filename() == "frame_car_1.bin");

  // Bookkeeping identities.
  const rs2ad::StageCounts& c = out.counts;
  CHECK(c.input_points == c.retained + c.range_dropped + c.ego_culled);
  CHECK(c.retained == c.ground_points + c.nonground_points);
  CHECK(c.generated_points == c.nonground_returns + c.ground_returns);
  CHECK(c.generated_points > 0);
  CHECK(c.runtime_ms > 0.0);

  // The written cloud matches the reported count and lives in sensor range.
  const rs2ad::PointCloud cloud = rs2ad::read_cloud(out.cloud, rs2ad::Frame::lidar);
  CHECK(cloud.size() == c.generated_points);
  const rs2ad::LidarModel model = rs2ad::LidarModel::pandar64();
  for (const auto& p : cloud.points) {
    const double r = p.position.norm();
    CHECK(r >= model.min_range());
    CHECK(r <= model.max_range());
  }

  // Labels: every input label present, the target flagged ego at the origin
  // side of the transform.
  const auto labels = rs2ad::parse_labels(
      [&] {
        std::ifstream in(out.labels);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
      }());
  CHECK(labels.size() == 3);
}

TEST_CASE("all-vehicles mode emits one output set per vehicle label") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, false);

  rs2ad::RunConfig cfg;
  cfg.target.all_vehicles = true;
  cfg.out_dir = tmp.path / "out";

  const auto outputs = rs2ad::generate(frame, cfg);
  REQUIRE(outputs.size() == 2);  // car_1 and truck_2; the cone is not a vehicle
  std::set<std::string> ids;
  for (const auto& out : outputs) {
    ids.insert(out.target_id);
    CHECK(fs::exists(out.cloud));
    CHECK(fs::exists(out.labels));
    CHECK(fs::exists(out.diagnostics));
  }
  CHECK(ids == std::set<std::string>{"car_1", "truck_2"});
}

TEST_CASE("an external ground mask replaces segmentation") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, true);

  rs2ad::RunConfig cfg;
  cfg.target.id = "car_1";
  cfg.out_dir = tmp.path / "masked";
  const auto with_mask = rs2ad::generate(frame, cfg);

  rs2ad::FrameBundle no_mask = frame;
  no_mask.ground_mask.reset();
  cfg.out_dir = tmp.path / "segmented";
  const auto without_mask = rs2ad::generate(no_mask, cfg);

  // Both succeed; the mask route must classify at least as much ground as
  // the estimator found (the truth mask is exact for this scene).
  CHECK(with_mask[0].counts.ground_points > 0);
  CHECK(without_mask[0].counts.ground_points > 0);
  // Ground/non-ground splits generally differ between the two routes.
  CHECK(with_mask[0].counts.generated_points > 0);
}

TEST_CASE("a missing target id fails cleanly without leftovers") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, false);

  rs2ad::RunConfig cfg;
  cfg.target.id = "no_such_label";
  cfg.out_dir = tmp.path / "out";
  CHECK_THROWS_AS(rs2ad::generate(frame, cfg), rs2ad::TargetNotFound);
  // The output directory holds no partial artifacts.
  if (fs::exists(cfg.out_dir)) {
    CHECK(fs::is_empty(cfg.out_dir));
  }
}

TEST_CASE("a mismatched external mask fails before any output appears") {
  TempDir tmp;
  rs2ad::FrameBundle frame = make_frame(tmp.path, false);
  frame.ground_mask = tmp.path / "bad_mask.bin";
  rs2ad::write_mask(*frame.ground_mask, {1, 0, 1});  // wrong length

  rs2ad::RunConfig cfg;
  cfg.target.all_vehicles = true;
  cfg.out_dir = tmp.path / "out";
  CHECK_THROWS_AS(rs2ad::generate(frame, cfg), rs2ad::LengthMismatch);
  if (fs::exists(cfg.out_dir)) {
    CHECK(fs::is_empty(cfg.out_dir));
  }
}

TEST_CASE("a failing later target removes earlier outputs too") {
  TempDir tmp;
  // Scene with one workable vehicle and one parked far outside sensor range:
  // the second target's view contains no points at all, which aborts the run
  // after the first target's files were already written.
  rs2ad::AnalyticScene scene;
  scene.ground = {0.0, 0.0, 0.0, rs2ad::PlaneModel::Axis::z};
  scene.density = 5.0;
  scene.ground_extent_m = 30.0;

  rs2ad::ObjectLabel near;
  near.id = "near_car";
  near.category = "car";
  near.size = {4.5, 1.9, 1.6};
  near.center = rs2ad::Point3(0.0, 0.0, 0.8);
  scene.vehicles.push_back(near);

  rs2ad::ObjectLabel far = near;
  far.id = "far_car";
  far.center = rs2ad::Point3(500.0, 500.0, 0.8);  // everything out of range
  scene.vehicles.push_back(far);

  const rs2ad::SampledScene sampled = rs2ad::sample_scene(scene, 5);
  rs2ad::FrameBundle frame;
  frame.cloud = tmp.path / "far.bin";
  frame.labels = tmp.path / "far_labels.json";
  frame.frame_id = "far";
  rs2ad::write_cloud(frame.cloud, sampled.cloud);
  rs2ad::write_labels(frame.labels, scene.vehicles);

  rs2ad::RunConfig cfg;
  cfg.target.all_vehicles = true;
  cfg.out_dir = tmp.path / "out";
  CHECK_THROWS_AS(rs2ad::generate(frame, cfg), rs2ad::Error);
  if (fs::exists(cfg.out_dir)) {
    CHECK(fs::is_empty(cfg.out_dir));
  }
}

TEST_CASE("ego culling only ever removes points") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, false);

  rs2ad::RunConfig plain;
  plain.target.id = "truck_2";
  plain.out_dir = tmp.path / "plain";
  rs2ad::RunConfig culled = plain;
  culled.ego_cull = true;
  culled.out_dir = tmp.path / "culled";

  const auto a = rs2ad::generate(frame, plain);
  const auto b = rs2ad::generate(frame, culled);
  CHECK(a[0].counts.ego_culled == 0);
  CHECK(b[0].counts.retained <= a[0].counts.retained);
  CHECK(b[0].counts.input_points == a[0].counts.input_points);
}

TEST_CASE("repeated runs are deterministic apart from the clock") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, false);

  rs2ad::RunConfig cfg;
  cfg.target.id = "car_1";

  cfg.out_dir = tmp.path / "run1";
  const auto first = rs2ad::generate(frame, cfg);
  cfg.out_dir = tmp.path / "run2";
  const auto second = rs2ad::generate(frame, cfg);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  CHECK(slurp(first[0].cloud) == slurp(second[0].cloud));
  CHECK(slurp(first[0].labels) == slurp(second[0].labels));
}

TEST_CASE("a custom lidar config file drives the run") {
  TempDir tmp;
  const rs2ad::FrameBundle frame = make_frame(tmp.path, false);

  // A coarse 8-beam sensor: far fewer returns than the default 64-beam one.
  rs2ad::LidarConfig small;
  small.vertical_fov_deg = {-20.0, 4.0};
  small.elevation_table_deg = {-20.0, -15.0, -10.0, -6.0, -3.0, -1.0, 1.0, 4.0};
  small.azimuth_resolution_deg = 1.0;
  small.range_m = {0.5, 120.0};
  const fs::path cfg_path = tmp.path / "small.cfg";
  rs2ad::save_lidar_config(cfg_path, small);

  rs2ad::RunConfig cfg;
  cfg.target.id = "car_1";
  cfg.lidar_config = cfg_path;
  cfg.out_dir = tmp.path / "small_out";
  const auto small_run = rs2ad::generate(frame, cfg);

  rs2ad::RunConfig big;
  big.target.id = "car_1";
  big.out_dir = tmp.path / "big_out";
  const auto big_run = rs2ad::generate(frame, big);

  CHECK(small_run[0].counts.generated_points > 0);
  CHECK(small_run[0].counts.generated_points < big_run[0].counts.generated_points);
}

}  // TEST_SUITE
