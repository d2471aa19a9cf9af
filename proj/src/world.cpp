#include "lvr/world.hpp"

#include "lvr/errors.hpp"
#include "lvr/parallel.hpp"
#include "lvr/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace lvr {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinElevationDeg = -24.0;
constexpr double kMaxElevationDeg = 2.0;

std::optional<double> intersect_box(const Box& b, const Vec3& o, const Vec3& d) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < b.min[a] || o[a] > b.max[a]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d[a];
    double lo = (b.min[a] - o[a]) * inv;
    double hi = (b.max[a] - o[a]) * inv;
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 <= 1e-9) return std::nullopt;  // origin inside or on the box
  return t0;
}

double box_surface_distance(const Box& b, const Vec3& p) {
  const Vec3 clamped = p.cwiseMax(b.min).cwiseMin(b.max);
  if (clamped != p) return (p - clamped).norm();
  const Vec3 lo = p - b.min;
  const Vec3 hi = b.max - p;
  return std::min(lo.minCoeff(), hi.minCoeff());
}

}  // namespace

void SyntheticWorldConfig::validate() const {
  const bool ok = extent > 0.0 && n_landmark_surfaces > 0 && trajectory_length > 0.0 &&
                  frame_spacing > 0.0 && depth_noise_sigma >= 0.0 && scan_range > 0.0 &&
                  scan_points > 0 && scan_spacing > 0.0 && image_width > 0 && image_height > 0 &&
                  horizontal_fov_deg > 0.0 && horizontal_fov_deg < 180.0 &&
                  depth_max_range > 0.0 && camera_height > 0.0 && lidar_height > 0.0 &&
                  lidar_beams > 0 && scan_points >= lidar_beams && road_half_width > 0.0 &&
                  road_wavelength > 0.0 && extent / 2.0 > road_half_width;
  if (!ok) fail(ErrorCode::InvalidArgument, "invalid synthetic world configuration");
}

std::optional<double> WorldGeometry::cast(const Vec3& origin, const Vec3& dir,
                                          double max_range) const {
  double best = std::numeric_limits<double>::infinity();
  if (dir.z() < 0.0 && origin.z() > ground_z) best = (ground_z - origin.z()) / dir.z();
  for (const Box& b : boxes) {
    if (auto t = intersect_box(b, origin, dir); t && *t < best) best = *t;
  }
  if (best > max_range) return std::nullopt;
  return best;
}

double WorldGeometry::distance_to_surface(const Vec3& p) const {
  double best = std::abs(p.z() - ground_z);
  for (const Box& b : boxes) best = std::min(best, box_surface_distance(b, p));
  return best;
}

Vec3 road_point(const SyntheticWorldConfig& cfg, double s) {
  return {s, cfg.road_amplitude * std::sin(kTwoPi * s / cfg.road_wavelength), 0.0};
}

double road_heading(const SyntheticWorldConfig& cfg, double s) {
  const double dy = cfg.road_amplitude * kTwoPi / cfg.road_wavelength *
                    std::cos(kTwoPi * s / cfg.road_wavelength);
  return std::atan2(dy, 1.0);
}

RigidTransform camera_pose_at(const SyntheticWorldConfig& cfg, double s) {
  const double psi = road_heading(cfg, s);
  const Vec3 forward(std::cos(psi), std::sin(psi), 0.0);
  const Vec3 left(-std::sin(psi), std::cos(psi), 0.0);
  RigidTransform t;
  t.rotation.col(0) = -left;
  t.rotation.col(1) = -Vec3::UnitZ();
  t.rotation.col(2) = forward;
  t.translation = road_point(cfg, s) + Vec3(0.0, 0.0, cfg.camera_height);
  return t;
}

RigidTransform lidar_pose_at(const SyntheticWorldConfig& cfg, double s, bool reverse) {
  const double psi = road_heading(cfg, s) + (reverse ? std::numbers::pi : 0.0);
  RigidTransform t;
  t.rotation = rot_z(psi);
  t.translation = road_point(cfg, s) + Vec3(0.0, 0.0, cfg.lidar_height);
  return t;
}

CameraIntrinsics make_intrinsics(const SyntheticWorldConfig& cfg) {
  CameraIntrinsics k;
  k.width = cfg.image_width;
  k.height = cfg.image_height;
  k.cx = (cfg.image_width - 1) / 2.0;
  k.cy = (cfg.image_height - 1) / 2.0;
  k.fx = (cfg.image_width / 2.0) / std::tan(deg2rad(cfg.horizontal_fov_deg) / 2.0);
  k.fy = k.fx;
  return k;
}

DepthImage render_depth(const WorldGeometry& world, const CameraIntrinsics& k,
                        const RigidTransform& pose, double max_range, double noise_sigma,
                        std::uint64_t noise_seed) {
  DepthImage img;
  img.width = k.width;
  img.height = k.height;
  img.pose = pose;
  img.depth.assign(std::size_t{k.width} * k.height, 0.0);
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  for (std::uint32_t v = 0; v < k.height; ++v) {
    for (std::uint32_t u = 0; u < k.width; ++u) {
      const Vec3 ray_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const double len = ray_cam.norm();
      const Vec3 dir = pose.rotation * (ray_cam / len);
      const double n = noise_sigma > 0.0 ? noise(rng) : 0.0;  // drawn for every pixel
      const auto t = world.cast(pose.translation, dir, max_range);
      if (!t) continue;
      const double depth = *t / len + n;
      if (depth > 0.0) img.depth[std::size_t{v} * k.width + u] = depth;
    }
  }
  return img;
}

PointCloud cast_scan(const WorldGeometry& world, const RigidTransform& pose, double range,
                     std::size_t points, std::uint32_t beams) {
  PointCloud out;
  const std::size_t azimuths = points / beams;
  for (std::uint32_t b = 0; b < beams; ++b) {
    const double el = deg2rad(beams == 1 ? 0.0
                                         : kMinElevationDeg + (kMaxElevationDeg - kMinElevationDeg) *
                                                                  b / (beams - 1.0));
    for (std::size_t a = 0; a < azimuths; ++a) {
      const double az = kTwoPi * static_cast<double>(a) / static_cast<double>(azimuths);
      const Vec3 d(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      if (auto t = world.cast(pose.translation, pose.rotation * d, range)) out.push_back(*t * d);
    }
  }
  return out;
}

SyntheticWorld generate_world(const SyntheticWorldConfig& cfg) {
  cfg.validate();
  SyntheticWorld w;
  w.config = cfg;
  w.intrinsics = make_intrinsics(cfg);

  std::mt19937_64 rng(mix64(cfg.seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 20.0;
  const double band = cfg.extent / 2.0;
  std::size_t attempts = 0;
  while (w.geometry.boxes.size() < cfg.n_landmark_surfaces && attempts < 100 * cfg.n_landmark_surfaces) {
    ++attempts;
    const double x = -margin + unit(rng) * (cfg.trajectory_length + 2.0 * margin);
    const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double half_len = 1.5 + 4.5 * unit(rng);
    const double half_wid = 1.5 + 4.5 * unit(rng);
    const double height = 3.0 + 12.0 * unit(rng);
    const double lateral = cfg.road_half_width + half_wid + unit(rng) * std::max(0.0, band - cfg.road_half_width - half_wid);
    const double y = road_point(cfg, x).y() + side * lateral;
    Box b{{x - half_len, y - half_wid, 0.0}, {x + half_len, y + half_wid, height}};
    bool clear = true;
    for (double xs = b.min.x() - 1.0; xs <= b.max.x() + 1.0 && clear; xs += 0.5) {
      const double ry = road_point(cfg, xs).y();
      const double gap = std::max({b.min.y() - ry, ry - b.max.y(), 0.0});
      if (gap < cfg.road_half_width) clear = false;
    }
    if (clear) w.geometry.boxes.push_back(b);
  }

  const auto n_frames = static_cast<std::size_t>(std::floor(cfg.trajectory_length / cfg.frame_spacing)) + 1;
  w.frames.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const double s = static_cast<double>(i) * cfg.frame_spacing;
    w.trajectory.push_back(static_cast<double>(i) * 0.1, camera_pose_at(cfg, s));
  }
  parallel_for(n_frames, [&](std::size_t i) {
    const auto& stamped = w.trajectory[i];
    w.frames[i] = render_depth(w.geometry, w.intrinsics, stamped.pose, cfg.depth_max_range,
                               cfg.depth_noise_sigma, hash_combine(cfg.seed, i));
    w.frames[i].timestamp = stamped.timestamp;
  });

  std::vector<std::pair<double, bool>> scan_sites;
  for (double s = 0.0; s <= cfg.trajectory_length + 1e-9; s += cfg.scan_spacing) scan_sites.push_back({s, false});
  if (cfg.reverse_revisits) {
    for (double s = cfg.trajectory_length - cfg.scan_spacing / 2.0; s >= 0.0; s -= cfg.scan_spacing) {
      scan_sites.push_back({s, true});
    }
  }
  w.scans.resize(scan_sites.size());
  parallel_for(scan_sites.size(), [&](std::size_t i) {
    LidarScan& scan = w.scans[i];
    scan.id = i;
    scan.pose = lidar_pose_at(cfg, scan_sites[i].first, scan_sites[i].second);
    scan.timestamp = 1000.0 + static_cast<double>(i) * 0.1;
    scan.cloud = cast_scan(w.geometry, scan.pose, cfg.scan_range, cfg.scan_points, cfg.lidar_beams);
  });
  return w;
}

}  // namespace lvr
