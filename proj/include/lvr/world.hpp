#pragma once

#include "lvr/depth_submap.hpp"
#include "lvr/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lvr {

/// Procedural road scene. Core fields follow the evaluation setup; the
/// remaining ones shape the sensors.
struct SyntheticWorldConfig {
  std::uint64_t seed = 0;
  double extent = 60.0;                 ///< width of the band (m) boxes are scattered in
  std::size_t n_landmark_surfaces = 120;
  double trajectory_length = 400.0;
  double frame_spacing = 1.0;
  double depth_noise_sigma = 0.05;
  double scan_range = 40.0;
  std::size_t scan_points = 5760;

  double scan_spacing = 5.0;
  bool reverse_revisits = true;
  std::uint32_t image_width = 96;
  std::uint32_t image_height = 64;
  double horizontal_fov_deg = 90.0;
  double depth_max_range = 40.0;
  double camera_height = 1.65;
  double lidar_height = 1.73;
  std::uint32_t lidar_beams = 16;
  double road_half_width = 6.0;
  double road_amplitude = 15.0;
  double road_wavelength = 250.0;

  void validate() const;
};

struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

struct WorldGeometry {
  double ground_z = 0.0;
  std::vector<Box> boxes;

  /// Nearest hit distance along a unit direction, if any within max_range.
  std::optional<double> cast(const Vec3& origin, const Vec3& dir, double max_range) const;
  /// Unsigned distance from p to the nearest surface.
  double distance_to_surface(const Vec3& p) const;
};

struct LidarScan {
  std::uint64_t id = 0;
  PointCloud cloud;       ///< sensor frame
  RigidTransform pose;    ///< sensor → world
  double timestamp = 0.0;
};

struct SyntheticWorld {
  SyntheticWorldConfig config;
  WorldGeometry geometry;
  CameraIntrinsics intrinsics;
  Trajectory trajectory;  ///< camera poses, one per frame
  std::vector<DepthImage> frames;
  std::vector<LidarScan> scans;
};

/// Road centreline position and heading (radians) at arc parameter s.
Vec3 road_point(const SyntheticWorldConfig& cfg, double s);
double road_heading(const SyntheticWorldConfig& cfg, double s);

/// Camera convention: x right, y down, z forward.
RigidTransform camera_pose_at(const SyntheticWorldConfig& cfg, double s);
/// LiDAR convention: x forward, y left, z up. `reverse` turns the sensor by 180°.
RigidTransform lidar_pose_at(const SyntheticWorldConfig& cfg, double s, bool reverse);

CameraIntrinsics make_intrinsics(const SyntheticWorldConfig& cfg);

/// Renders a depth image; `noise_seed` drives the per-pixel Gaussian depth noise.
DepthImage render_depth(const WorldGeometry& world, const CameraIntrinsics& k,
                        const RigidTransform& pose, double max_range, double noise_sigma,
                        std::uint64_t noise_seed);

/// 360° LiDAR sweep in the sensor frame.
PointCloud cast_scan(const WorldGeometry& world, const RigidTransform& pose, double range,
                     std::size_t points, std::uint32_t beams);

/// Deterministic in cfg (bit-identical for equal configs).
SyntheticWorld generate_world(const SyntheticWorldConfig& cfg);

}  // namespace lvr
