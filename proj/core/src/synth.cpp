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

#include "rs2ad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rs2ad/errors.hpp"
#include "rs2ad/io.hpp"

namespace rs2ad {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kGroundIntensity = 10.0;
constexpr double kBoxIntensityBase = 100.0;
constexpr double kWallIntensityBase = 200.0;

// Uniform [0, 1) and standard normal draws built directly on the mt19937_64
// word stream, so sampled scenes are reproducible across standard libraries
// (std::uniform_real_distribution is not specified bit-exactly).
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_gauss(std::mt19937_64& rng) {
  double u1 = next_uniform(rng);
  if (u1 <= 0.0) u1 = std::numeric_limits<double>::min();
  const double u2 = next_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void validate(const AnalyticScene& scene) {
  if (!(scene.density > 0.0)) throw Error("scene: density must be positive");
  if (!(scene.ground_extent_m > 0.0)) throw Error("scene: ground extent must be positive");
  if (scene.noise_sigma < 0.0) throw Error("scene: noise sigma must be nonnegative");
  if (!std::isfinite(scene.ground.a) || !std::isfinite(scene.ground.b) ||
      !std::isfinite(scene.ground.c) || scene.ground.axis != PlaneModel::Axis::z) {
    throw Error("scene: ground plane must be a finite z-form plane");
  }
  for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
    const auto& s = scene.boxes[i].size;
    if (!(s.x() > 0.0) || !(s.y() > 0.0) || !(s.z() > 0.0)) {
      throw Error("scene: box " + std::to_string(i) + " has a non-positive size");
    }
  }
  for (std::size_t i = 0; i < scene.walls.size(); ++i) {
    const SceneWall& w = scene.walls[i];
    if (!((w.p1 - w.p0).norm() > 0.0) || !(w.z1 > w.z0)) {
      throw Error("scene: wall " + std::to_string(i) + " is degenerate");
    }
  }
}

int grid_count(double edge, double density) {
  return std::max(1, static_cast<int>(std::lround(edge * std::sqrt(density))));
}

// Samples a planar rectangle given by an origin corner and two edge vectors,
// on an exact stratified grid with in-cell jitter and perpendicular noise.
void sample_rect(const Point3& corner, const Eigen::Vector3d& edge_u,
                 const Eigen::Vector3d& edge_v, const Eigen::Vector3d& unit_normal,
                 double density, double noise_sigma, double intensity,
                 const TruthTag& tag, std::mt19937_64& rng, SampledScene& out) {
  const int nu = grid_count(edge_u.norm(), density);
  const int nv = grid_count(edge_v.norm(), density);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double fu = (i + next_uniform(rng)) / nu;
      const double fv = (j + next_uniform(rng)) / nv;
      Point3 p = corner + fu * edge_u + fv * edge_v;
      if (noise_sigma > 0.0) p += noise_sigma * next_gauss(rng) * unit_normal;
      out.cloud.points.push_back({p, intensity});
      out.tags.push_back(tag);
    }
  }
}

Eigen::Matrix3d yaw_matrix(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix3d m;
  m << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return m;
}

}  // namespace

SampledScene sample_scene(const AnalyticScene& scene, std::uint64_t seed) {
  validate(scene);
  std::mt19937_64 rng(seed);
  SampledScene out;
  out.cloud.frame = Frame::world;

  // Ground: stratified over the extent square, lifted onto the plane.
  {
    const double e = scene.ground_extent_m;
    const int n = grid_count(2.0 * e, scene.density);
    const Eigen::Vector3d normal =
        Eigen::Vector3d(-scene.ground.a, -scene.ground.b, 1.0).normalized();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = -e + (i + next_uniform(rng)) * (2.0 * e / n);
        const double y = -e + (j + next_uniform(rng)) * (2.0 * e / n);
        Point3 p{x, y, scene.ground.a * x + scene.ground.b * y + scene.ground.c};
        if (scene.noise_sigma > 0.0) {
          p += scene.noise_sigma * next_gauss(rng) * normal;
        }
        out.cloud.points.push_back({p, kGroundIntensity});
        out.tags.push_back({true, -1});
      }
    }
  }

  for (std::size_t bi = 0; bi < scene.boxes.size(); ++bi) {
    const SceneBox& box = scene.boxes[bi];
    const Eigen::Matrix3d rot = yaw_matrix(box.yaw);
    const Eigen::Vector3d half = box.size * 0.5;
    const TruthTag tag{false, static_cast<int>(bi)};
    const double intensity = kBoxIntensityBase + static_cast<double>(bi);
    // Six faces; local +axis and -axis pairs.
    for (int axis = 0; axis < 3; ++axis) {
      const int u_axis = (axis + 1) % 3;
      const int v_axis = (axis + 2) % 3;
      for (int sign : {-1, 1}) {
        Eigen::Vector3d corner_local = -half;
        corner_local[axis] = sign * half[axis];
        Eigen::Vector3d edge_u = Eigen::Vector3d::Zero();
        Eigen::Vector3d edge_v = Eigen::Vector3d::Zero();
        edge_u[u_axis] = box.size[u_axis];
        edge_v[v_axis] = box.size[v_axis];
        Eigen::Vector3d normal_local = Eigen::Vector3d::Zero();
        normal_local[axis] = sign;
        sample_rect(box.center + rot * corner_local, rot * edge_u, rot * edge_v,
                    rot * normal_local, scene.density, scene.noise_sigma, intensity,
                    tag, rng, out);
      }
    }
  }

  for (std::size_t wi = 0; wi < scene.walls.size(); ++wi) {
    const SceneWall& wall = scene.walls[wi];
    const Eigen::Vector2d seg = wall.p1 - wall.p0;
    const Eigen::Vector3d corner{wall.p0.x(), wall.p0.y(), wall.z0};
    const Eigen::Vector3d edge_u{seg.x(), seg.y(), 0.0};
    const Eigen::Vector3d edge_v{0.0, 0.0, wall.z1 - wall.z0};
    const Eigen::Vector3d normal =
        Eigen::Vector3d(-seg.y(), seg.x(), 0.0).normalized();
    sample_rect(corner, edge_u, edge_v, normal, scene.density, scene.noise_sigma,
                kWallIntensityBase + static_cast<double>(wi),
                {false, static_cast<int>(scene.boxes.size() + wi)}, rng, out);
  }
  return out;
}

namespace {

struct Candidate {
  double t = std::numeric_limits<double>::infinity();
  bool ground = false;
  double intensity = 0.0;
};

// Slab test of a ray against an axis-aligned box [-half, half] in the box's
// local frame. Returns the entry parameter (or the exit when the origin is
// inside), infinity on miss.
double ray_box(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
               const Eigen::Vector3d& half) {
  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(dir[axis]) < 1e-15) {
      if (std::abs(origin[axis]) > half[axis]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    double lo = (-half[axis] - origin[axis]) / dir[axis];
    double hi = (half[axis] - origin[axis]) / dir[axis];
    if (lo > hi) std::swap(lo, hi);
    t_min = std::max(t_min, lo);
    t_max = std::min(t_max, hi);
  }
  if (t_min > t_max || t_max <= 1e-12) {
    return std::numeric_limits<double>::infinity();
  }
  return t_min > 1e-12 ? t_min : t_max;
}

}  // namespace

GeneratedCloud oracle_cast(const AnalyticScene& scene,
                           const RigidTransform& world_to_lidar,
                           const LidarModel& model) {
  validate(scene);
  if (!world_to_lidar.is_rigid()) {
    throw NonOrthonormalInput("oracle_cast: transform is not rigid");
  }
  const RigidTransform lidar_to_world = invert(world_to_lidar);
  const Eigen::Vector3d origin_w = lidar_to_world.translation;

  struct BoxFrame {
    Eigen::Matrix3d rot;
    Point3 center;
    Eigen::Vector3d half;
  };
  std::vector<BoxFrame> boxes;
  boxes.reserve(scene.boxes.size());
  for (const SceneBox& b : scene.boxes) {
    boxes.push_back({yaw_matrix(b.yaw), b.center, b.size * 0.5});
  }

  const Eigen::Vector3d ground_n{scene.ground.a, scene.ground.b, -1.0};

  GeneratedCloud out;
  for (std::size_t ordinal = 0; ordinal < model.ray_count(); ++ordinal) {
    const RayIndex ray = model.ray_from_ordinal(ordinal);
    const Eigen::Vector3d dir_l = model.ray_direction(ray);
    const Eigen::Vector3d dir_w = lidar_to_world.rotation * dir_l;

    Candidate best;
    // Ground plane: ground_n . p = -c along p = origin + t dir.
    {
      const double denom = ground_n.dot(dir_w);
      if (std::abs(denom) > 1e-12) {
        const double t = (-scene.ground.c - ground_n.dot(origin_w)) / denom;
        if (t > 1e-12 && t < best.t) best = {t, true, kGroundIntensity};
      }
    }
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
      const BoxFrame& b = boxes[bi];
      const Eigen::Vector3d o_local = b.rot.transpose() * (origin_w - b.center);
      const Eigen::Vector3d d_local = b.rot.transpose() * dir_w;
      const double t = ray_box(o_local, d_local, b.half);
      if (t < best.t) {
        best = {t, false, kBoxIntensityBase + static_cast<double>(bi)};
      }
    }
    for (std::size_t wi = 0; wi < scene.walls.size(); ++wi) {
      const SceneWall& w = scene.walls[wi];
      const Eigen::Vector2d seg = w.p1 - w.p0;
      const Eigen::Vector3d n{-seg.y(), seg.x(), 0.0};
      const double denom = n.dot(dir_w);
      if (std::abs(denom) < 1e-15) continue;
      const Eigen::Vector3d p0{w.p0.x(), w.p0.y(), w.z0};
      const double t = n.dot(p0 - origin_w) / denom;
      if (t <= 1e-12 || t >= best.t) continue;
      const Eigen::Vector3d hit = origin_w + t * dir_w;
      const double along =
          (Eigen::Vector2d(hit.x(), hit.y()) - w.p0).dot(seg) / seg.squaredNorm();
      if (along < 0.0 || along > 1.0 || hit.z() < w.z0 || hit.z() > w.z1) continue;
      best = {t, false, kWallIntensityBase + static_cast<double>(wi)};
    }

    if (!std::isfinite(best.t) || best.t < model.min_range() ||
        best.t > model.max_range()) {
      continue;
    }
    GeneratedPoint gen;
    gen.position = best.t * dir_l;  // lidar frame, exactly on the ray
    gen.intensity = best.intensity;
    gen.ray = ray;
    gen.origin = best.ground ? GeneratedPoint::Origin::ground
                             : GeneratedPoint::Origin::nonground;
    out.points.push_back(gen);
  }
  return out;
}

namespace {

[[noreturn]] void scene_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

double expect_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) scene_fail(path, "expected a number");
  return j.get<double>();
}

Eigen::Vector2d expect_vec2(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) scene_fail(path, "expected 2 numbers");
  return {expect_number(j[0], path + "[0]"), expect_number(j[1], path + "[1]")};
}

Eigen::Vector3d expect_vec3(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) scene_fail(path, "expected 3 numbers");
  return {expect_number(j[0], path + "[0]"), expect_number(j[1], path + "[1]"),
          expect_number(j[2], path + "[2]")};
}

}  // namespace

AnalyticScene parse_scene(const std::string& text, const std::string& source_name) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw SchemaError(source_name + ": invalid JSON: " + e.what());
  }
  if (!root.is_object()) scene_fail(source_name, "expected a top-level object");
  static const char* known[] = {"ground",      "boxes",           "walls",
                                "density",     "noise_sigma",     "ground_extent_m",
                                "vehicles"};
  for (const auto& [key, value] : root.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return key == k;
        }) == std::end(known)) {
      scene_fail(source_name + "." + key, "unknown key");
    }
  }

  AnalyticScene scene;
  if (root.contains("ground")) {
    const ordered_json& g = root["ground"];
    const std::string path = source_name + ".ground";
    if (!g.is_object()) scene_fail(path, "expected an object");
    scene.ground.a = g.contains("a") ? expect_number(g["a"], path + ".a") : 0.0;
    scene.ground.b = g.contains("b") ? expect_number(g["b"], path + ".b") : 0.0;
    scene.ground.c = g.contains("c") ? expect_number(g["c"], path + ".c") : 0.0;
  }
  if (root.contains("boxes")) {
    const ordered_json& arr = root["boxes"];
    if (!arr.is_array()) scene_fail(source_name + ".boxes", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = source_name + ".boxes[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) scene_fail(path, "expected an object");
      SceneBox box;
      box.center = expect_vec3(arr[i].value("center", ordered_json::array({0, 0, 0})),
                               path + ".center");
      box.size = expect_vec3(arr[i].value("size", ordered_json::array({1, 1, 1})),
                             path + ".size");
      box.yaw = arr[i].contains("yaw") ? expect_number(arr[i]["yaw"], path + ".yaw")
                                       : 0.0;
      scene.boxes.push_back(box);
    }
  }
  if (root.contains("walls")) {
    const ordered_json& arr = root["walls"];
    if (!arr.is_array()) scene_fail(source_name + ".walls", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = source_name + ".walls[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) scene_fail(path, "expected an object");
      SceneWall wall;
      if (!arr[i].contains("p0") || !arr[i].contains("p1") || !arr[i].contains("z")) {
        scene_fail(path, "needs p0, p1, and z");
      }
      wall.p0 = expect_vec2(arr[i]["p0"], path + ".p0");
      wall.p1 = expect_vec2(arr[i]["p1"], path + ".p1");
      const Eigen::Vector2d z = expect_vec2(arr[i]["z"], path + ".z");
      wall.z0 = z.x();
      wall.z1 = z.y();
      scene.walls.push_back(wall);
    }
  }
  if (root.contains("density")) {
    scene.density = expect_number(root["density"], source_name + ".density");
  }
  if (root.contains("noise_sigma")) {
    scene.noise_sigma = expect_number(root["noise_sigma"], source_name + ".noise_sigma");
  }
  if (root.contains("ground_extent_m")) {
    scene.ground_extent_m =
        expect_number(root["ground_extent_m"], source_name + ".ground_extent_m");
  }
  if (root.contains("vehicles")) {
    scene.vehicles =
        parse_labels(root["vehicles"].dump(), source_name + ".vehicles");
  }
  validate(scene);
  return scene;
}

AnalyticScene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open scene '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene(buffer.str(), path.string());
}

std::string format_scene(const AnalyticScene& scene) {
  validate(scene);
  ordered_json root;
  root["ground"] = {{"a", scene.ground.a}, {"b", scene.ground.b}, {"c", scene.ground.c}};
  root["boxes"] = ordered_json::array();
  for (const SceneBox& b : scene.boxes) {
    root["boxes"].push_back({{"center", {b.center.x(), b.center.y(), b.center.z()}},
                             {"size", {b.size.x(), b.size.y(), b.size.z()}},
                             {"yaw", b.yaw}});
  }
  root["walls"] = ordered_json::array();
  for (const SceneWall& w : scene.walls) {
    root["walls"].push_back({{"p0", {w.p0.x(), w.p0.y()}},
                             {"p1", {w.p1.x(), w.p1.y()}},
                             {"z", {w.z0, w.z1}}});
  }
  root["density"] = scene.density;
  root["noise_sigma"] = scene.noise_sigma;
  root["ground_extent_m"] = scene.ground_extent_m;
  root["vehicles"] = ordered_json::parse(format_labels(scene.vehicles));
  return root.dump(2) + "\n";
}

void save_scene(const std::filesystem::path& path, const AnalyticScene& scene) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write scene '" + path.string() + "'");
  out << format_scene(scene);
  if (!out) throw IoFailure("failed writing scene '" + path.string() + "'");
}

}  // namespace rs2ad
