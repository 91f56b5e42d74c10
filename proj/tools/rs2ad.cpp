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

// Command line front end for the rs2ad toolkit: generation of vehicle-view
// clouds from roadside frames, ground segmentation, distribution metrics,
// synthetic scene sampling, and cloud statistics.
//
// Exit codes: 0 success, 1 usage error, 2 data/processing error.

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rs2ad/errors.hpp"
#include "rs2ad/ground_seg.hpp"
#include "rs2ad/io.hpp"
#include "rs2ad/log.hpp"
#include "rs2ad/metrics.hpp"
#include "rs2ad/pipeline.hpp"
#include "rs2ad/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct GenerateFlags {
  std::string cloud;
  std::string labels;
  std::string lidar_config;
  std::string target_id;
  bool all_vehicles = false;
  std::string out_dir = ".";
  bool ego_cull = false;
  std::string ground_mask;
  std::string rotation_format = "axis-angle";
};

rs2ad::RunConfig to_run_config(const GenerateFlags& flags) {
  rs2ad::RunConfig cfg;
  if (!flags.lidar_config.empty()) cfg.lidar_config = flags.lidar_config;
  cfg.target.all_vehicles = flags.all_vehicles;
  cfg.target.id = flags.target_id;
  cfg.out_dir = flags.out_dir;
  cfg.ego_cull = flags.ego_cull;
  cfg.rotation_format = flags.rotation_format == "yaw"
                            ? rs2ad::RotationFormat::yaw_only
                            : rs2ad::RotationFormat::axis_angle;
  return cfg;
}

void add_target_flags(CLI::App* cmd, GenerateFlags& flags) {
  auto* id = cmd->add_option("--target-id", flags.target_id,
                             "Anchor the virtual sensor on the label with this id");
  auto* all = cmd->add_flag("--all-vehicles", flags.all_vehicles,
                            "Anchor one virtual sensor on every vehicle label");
  id->excludes(all);
  all->excludes(id);
  cmd->add_option("--lidar-config", flags.lidar_config,
                  "Sensor config file (defaults to the built-in 64-beam sensor)");
  cmd->add_option("--out-dir", flags.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_flag("--ego-cull", flags.ego_cull,
                "Drop points inside the target's own (inflated) box");
  cmd->add_option("--rotation-format", flags.rotation_format,
                  "Label rotation encoding: axis-angle or yaw")
      ->check(CLI::IsMember({"axis-angle", "yaw"}))
      ->capture_default_str();
}

void require_one_target(const GenerateFlags& flags) {
  if (flags.all_vehicles != flags.target_id.empty()) {
    throw CLI::ValidationError(
        "target", "exactly one of --target-id or --all-vehicles is required");
  }
}

void print_outputs(const std::vector<rs2ad::TargetOutput>& outputs) {
  for (const rs2ad::TargetOutput& out : outputs) {
    std::cout << out.target_id << "\t" << out.cloud.string() << "\t"
              << out.counts.generated_points << " points\n";
  }
}

int run_generate(const GenerateFlags& flags) {
  rs2ad::FrameBundle frame;
  frame.cloud = flags.cloud;
  frame.labels = flags.labels;
  frame.frame_id = frame.cloud.stem().string();
  if (!flags.ground_mask.empty()) frame.ground_mask = flags.ground_mask;
  print_outputs(rs2ad::generate(frame, to_run_config(flags)));
  return kExitOk;
}

int run_batch(const GenerateFlags& flags, const std::string& manifest, int jobs) {
  const std::vector<rs2ad::FrameBundle> frames = rs2ad::read_manifest(manifest);
  std::set<std::string> ids;
  for (const rs2ad::FrameBundle& f : frames) {
    if (!ids.insert(f.frame_id).second) {
      throw rs2ad::Error("manifest: duplicate frame id '" + f.frame_id +
                         "' would collide in the output directory");
    }
  }
  const rs2ad::RunConfig cfg = to_run_config(flags);

  std::atomic<std::size_t> next{0};
  std::mutex out_mutex;
  std::vector<std::string> errors;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= frames.size()) return;
      try {
        const auto outputs = rs2ad::generate(frames[i], cfg);
        std::lock_guard<std::mutex> lock(out_mutex);
        std::cout << frames[i].frame_id << ": " << outputs.size() << " target(s)\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(out_mutex);
        errors.push_back(frames[i].frame_id + ": " + e.what());
      }
    }
  };
  const int thread_count =
      std::max(1, std::min<int>(jobs, static_cast<int>(frames.size())));
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    return kExitData;
  }
  return kExitOk;
}

int run_segment(const std::string& cloud_path, const std::string& mask_path) {
  const rs2ad::PointCloud cloud = rs2ad::read_cloud(cloud_path, rs2ad::Frame::lidar);
  const rs2ad::GroundSplit split = rs2ad::segment(cloud);
  std::vector<std::uint8_t> mask(cloud.size(), 0);
  for (std::size_t i : split.ground_indices) mask[i] = 1;
  rs2ad::write_mask(mask_path, mask);
  std::cout << split.ground.size() << " ground / " << split.nonground.size()
            << " non-ground\n";
  return kExitOk;
}

int run_metrics(const std::string& a_path, const std::string& b_path,
                const std::string& out_path) {
  const rs2ad::ClassHistogram a = rs2ad::read_histogram(a_path);
  rs2ad::ClassHistogram b = rs2ad::read_histogram(b_path);
  if (a.classes != b.classes) {
    // Accept a permuted class order by realigning b to a.
    rs2ad::ClassHistogram aligned;
    for (const std::string& name : a.classes) {
      const auto it = std::find(b.classes.begin(), b.classes.end(), name);
      if (it == b.classes.end()) {
        throw rs2ad::Error("metrics: class '" + name + "' missing from '" + b_path +
                           "'");
      }
      aligned.classes.push_back(name);
      aligned.weights.push_back(b.weights[it - b.classes.begin()]);
    }
    if (b.classes.size() != a.classes.size()) {
      throw rs2ad::Error("metrics: histograms list different classes");
    }
    b = std::move(aligned);
  }
  const std::vector<double> p = rs2ad::normalize(a);
  const std::vector<double> q = rs2ad::normalize(b);
  const double js = rs2ad::js_distance(p, q);
  const double cosine = rs2ad::cosine_similarity(p, q);
  std::cout << rs2ad::format_metric_report(js, cosine);
  if (!out_path.empty()) rs2ad::write_metric_report(out_path, js, cosine);
  return kExitOk;
}

int run_synth(const std::string& scene_path, std::uint64_t seed,
              const std::string& out_cloud, const std::string& out_labels,
              const std::string& out_mask) {
  const rs2ad::AnalyticScene scene = rs2ad::load_scene(scene_path);
  const rs2ad::SampledScene sampled = rs2ad::sample_scene(scene, seed);
  rs2ad::write_cloud(out_cloud, sampled.cloud);
  if (!out_labels.empty()) rs2ad::write_labels(out_labels, scene.vehicles);
  if (!out_mask.empty()) {
    std::vector<std::uint8_t> mask(sampled.tags.size(), 0);
    for (std::size_t i = 0; i < sampled.tags.size(); ++i) {
      mask[i] = sampled.tags[i].ground ? 1 : 0;
    }
    rs2ad::write_mask(out_mask, mask);
  }
  std::cout << sampled.cloud.size() << " points\n";
  return kExitOk;
}

int run_stats(const std::string& cloud_path, const std::string& lidar_config) {
  const rs2ad::PointCloud cloud = rs2ad::read_cloud(cloud_path, rs2ad::Frame::lidar);
  rs2ad::CloudStats stats;
  if (!lidar_config.empty()) {
    const rs2ad::LidarModel model(rs2ad::load_lidar_config(lidar_config));
    stats = rs2ad::cloud_stats(cloud, model);
  } else {
    stats = rs2ad::cloud_stats(cloud);
  }
  std::cout << rs2ad::format_cloud_stats(stats);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rs2ad: vehicle-view LiDAR clouds resampled from roadside frames"};
  app.require_subcommand(1);

  GenerateFlags gen_flags;
  auto* generate = app.add_subcommand(
      "generate", "Generate vehicle-view clouds and labels for one frame");
  generate->add_option("--cloud", gen_flags.cloud, "Input cloud (.bin)")->required();
  generate->add_option("--labels", gen_flags.labels, "Input labels (.json)")->required();
  generate->add_option("--ground-mask", gen_flags.ground_mask,
                       "External per-point ground mask (one 0/1 byte per point)");
  add_target_flags(generate, gen_flags);

  GenerateFlags batch_flags;
  std::string manifest;
  int jobs = 1;
  auto* batch = app.add_subcommand(
      "batch", "Run generate over every frame listed in a manifest");
  batch->add_option("--manifest", manifest,
                    "Tab-separated lines: cloud, labels, optional mask")
      ->required();
  batch->add_option("--jobs", jobs, "Frames processed concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_target_flags(batch, batch_flags);

  std::string seg_cloud, seg_mask;
  auto* segment = app.add_subcommand(
      "segment", "Split a lidar-frame cloud into ground and non-ground");
  segment->add_option("--cloud", seg_cloud, "Input cloud (.bin), lidar frame")
      ->required();
  segment->add_option("--out-mask", seg_mask, "Output mask path")->required();

  std::string metrics_a, metrics_b, metrics_out;
  auto* metrics = app.add_subcommand(
      "metrics", "Distribution similarity between two class histograms");
  metrics->add_option("--a", metrics_a, "First histogram JSON")->required();
  metrics->add_option("--b", metrics_b, "Second histogram JSON")->required();
  metrics->add_option("--out", metrics_out, "Also write the report JSON here");

  std::string synth_scene, synth_cloud, synth_labels, synth_mask;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand(
      "synth", "Sample an analytic scene into a cloud, labels, and truth mask");
  synth->add_option("--scene", synth_scene, "Scene description JSON")->required();
  synth->add_option("--seed", synth_seed, "Sampling seed")->capture_default_str();
  synth->add_option("--out-cloud", synth_cloud, "Output cloud (.bin)")->required();
  synth->add_option("--out-labels", synth_labels, "Output labels for the scene's vehicles");
  synth->add_option("--out-mask", synth_mask, "Output ground-truth mask");

  std::string stats_cloud, stats_config;
  auto* stats = app.add_subcommand("stats", "Descriptive statistics of a cloud");
  stats->add_option("--cloud", stats_cloud, "Input cloud (.bin)")->required();
  stats->add_option("--lidar-config", stats_config,
                    "Sensor config enabling per-beam counts");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) {
      require_one_target(gen_flags);
      return run_generate(gen_flags);
    }
    if (batch->parsed()) {
      require_one_target(batch_flags);
      return run_batch(batch_flags, manifest, jobs);
    }
    if (segment->parsed()) return run_segment(seg_cloud, seg_mask);
    if (metrics->parsed()) return run_metrics(metrics_a, metrics_b, metrics_out);
    if (synth->parsed()) {
      return run_synth(synth_scene, synth_seed, synth_cloud, synth_labels, synth_mask);
    }
    if (stats->parsed()) return run_stats(stats_cloud, stats_config);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const rs2ad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
